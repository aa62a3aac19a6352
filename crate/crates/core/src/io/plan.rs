//! Plan text format:
//!
//! ```text
//! stocks 2 c 10
//! stock 1: 6×1 div item=1 piece=4 residual=2 trim=0 usable=0
//! stock 2: 6×1 res item=1 len=2 trim=2 usable=0
//! pct=10.0000
//! trim=2 welds=1 leftovers=[]
//! ```
//!
//! Whole pieces are written as `length×count`, divisions and placed
//! residuals by item id. Unit indices are implicit: per item, units are
//! numbered in stock order with whole pieces before the divided one, and
//! each residual is matched to a division of the same item and residual
//! length in another stock.

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use super::ParseError;
use crate::model::{
    CuttingPlan, Division, Instance, ItemId, Params, PlacedResidual, PlanStats, StockPattern,
};

/// One `stock` line as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StockLine {
    pub index: usize,
    pub whole: Vec<(u64, u32)>,
    /// `(item, piece, residual)`
    pub divisions: Vec<(ItemId, u64, u64)>,
    /// `(item, length)`
    pub residuals: Vec<(ItemId, u64)>,
    pub trim: u64,
    pub usable: bool,
}

/// Footer totals as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Totals {
    pub trim: u64,
    pub welds: u64,
    pub leftovers: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanFile {
    pub stock_length: u64,
    pub stocks: Vec<StockLine>,
    pub percentage: Option<f64>,
    pub totals: Totals,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("plan is for stock length {plan}, instance has {instance}")]
    StockLengthMismatch { plan: u64, instance: u64 },
    #[error("stock {stock}: no item of length {length}")]
    UnknownLength { stock: usize, length: u64 },
}

pub fn write_plan(plan: &CuttingPlan, stats: &PlanStats) -> String {
    let inst = &plan.instance;
    let mut out = format!("stocks {} c {}\n", plan.patterns.len(), inst.stock_length);
    for p in &plan.patterns {
        let _ = write!(out, "stock {}:", p.stock_index);
        for &(id, count) in &p.whole_items {
            let len = inst.item(id).map_or(0, |it| it.length);
            let _ = write!(out, " {len}×{count}");
        }
        for d in &p.divisions {
            let _ = write!(
                out,
                " div item={} piece={} residual={}",
                d.item_id, d.piece_here, d.residual
            );
        }
        for r in &p.placed_residuals {
            let _ = write!(out, " res item={} len={}", r.item_id, r.length);
        }
        let _ = writeln!(
            out,
            " trim={} usable={}",
            p.trim,
            u8::from(p.leftover_usable)
        );
    }
    let _ = writeln!(out, "pct={:.4}", stats.trim_percentage);
    let leftovers: Vec<String> = stats
        .leftover_groups()
        .iter()
        .map(|(len, n)| format!("{len}*{n}"))
        .collect();
    let _ = writeln!(
        out,
        "trim={} welds={} leftovers=[{}]",
        stats.total_trim_loss,
        stats.weld_count,
        leftovers.join(" ")
    );
    out
}

pub fn parse_plan(text: &str) -> Result<PlanFile, ParseError> {
    let mut header: Option<(usize, u64)> = None;
    let mut stocks: Vec<StockLine> = Vec::new();
    let mut percentage = None;
    let mut totals = None;
    let mut last = 0;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last = lineno;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if totals.is_some() {
            return Err(ParseError::syntax(lineno, "content after footer"));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((count, _)) = header else {
            match fields[..] {
                ["stocks", n, "c", c] => {
                    header = Some((num(n, lineno)?, num(c, lineno)?));
                    continue;
                }
                _ => {
                    return Err(ParseError::syntax(
                        lineno,
                        "expected `stocks <n> c <length>`",
                    ))
                }
            }
        };
        if fields[0] == "stock" {
            if percentage.is_some() {
                return Err(ParseError::syntax(lineno, "stock line after pct"));
            }
            let stock = parse_stock(&fields, lineno)?;
            if stock.index != stocks.len() + 1 {
                return Err(ParseError::syntax(
                    lineno,
                    format!("expected stock {}, found {}", stocks.len() + 1, stock.index),
                ));
            }
            if stocks.len() == count {
                return Err(ParseError::syntax(lineno, "more stock lines than declared"));
            }
            stocks.push(stock);
        } else if let Some(value) = line.strip_prefix("pct=") {
            if percentage.is_some() {
                return Err(ParseError::syntax(lineno, "duplicate pct line"));
            }
            let pct: f64 = value
                .parse()
                .map_err(|_| ParseError::syntax(lineno, "bad pct value"))?;
            percentage = Some(pct);
        } else if line.starts_with("trim=") {
            totals = Some(parse_footer(line, lineno)?);
        } else {
            return Err(ParseError::syntax(
                lineno,
                format!("unexpected `{}`", fields[0]),
            ));
        }
    }

    let eof = last + 1;
    let Some((count, stock_length)) = header else {
        return Err(ParseError::syntax(eof, "missing `stocks` header"));
    };
    if stocks.len() != count {
        return Err(ParseError::syntax(
            eof,
            format!("declared {count} stocks, found {}", stocks.len()),
        ));
    }
    let Some(totals) = totals else {
        return Err(ParseError::syntax(eof, "missing footer"));
    };
    Ok(PlanFile {
        stock_length,
        stocks,
        percentage,
        totals,
    })
}

fn num<T: std::str::FromStr>(token: &str, line: usize) -> Result<T, ParseError> {
    token
        .parse()
        .map_err(|_| ParseError::syntax(line, format!("`{token}` is not a valid number")))
}

fn keyed<T: std::str::FromStr>(
    token: Option<&&str>,
    key: &str,
    line: usize,
) -> Result<T, ParseError> {
    let token = token.ok_or_else(|| ParseError::syntax(line, format!("missing `{key}=`")))?;
    let value = token
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| ParseError::syntax(line, format!("expected `{key}=`, found `{token}`")))?;
    num(value, line)
}

fn parse_stock(fields: &[&str], line: usize) -> Result<StockLine, ParseError> {
    let index = fields
        .get(1)
        .and_then(|t| t.strip_suffix(':'))
        .ok_or_else(|| ParseError::syntax(line, "expected `stock <j>:`"))?;
    let mut stock = StockLine {
        index: num(index, line)?,
        whole: Vec::new(),
        divisions: Vec::new(),
        residuals: Vec::new(),
        trim: 0,
        usable: false,
    };
    let mut trim = None;
    let mut usable = None;
    let mut rest = fields[2..].iter();
    while let Some(&token) = rest.next() {
        if trim.is_some() && usable.is_some() {
            return Err(ParseError::syntax(line, "tokens after usable="));
        }
        match token {
            "div" => {
                let item = keyed(rest.next(), "item", line)?;
                let piece = keyed(rest.next(), "piece", line)?;
                let residual = keyed(rest.next(), "residual", line)?;
                stock.divisions.push((item, piece, residual));
            }
            "res" => {
                let item = keyed(rest.next(), "item", line)?;
                let len = keyed(rest.next(), "len", line)?;
                stock.residuals.push((item, len));
            }
            t if t.starts_with("trim=") && trim.is_none() => {
                trim = Some(keyed(Some(&t), "trim", line)?);
            }
            t if t.starts_with("usable=") && trim.is_some() => {
                usable = Some(match &t["usable=".len()..] {
                    "0" => false,
                    "1" => true,
                    _ => return Err(ParseError::syntax(line, "usable must be 0 or 1")),
                });
            }
            t => {
                let (len, count) = t
                    .split_once('×')
                    .or_else(|| t.split_once('x'))
                    .ok_or_else(|| ParseError::syntax(line, format!("unexpected `{t}`")))?;
                stock.whole.push((num(len, line)?, num(count, line)?));
            }
        }
    }
    stock.trim = trim.ok_or_else(|| ParseError::syntax(line, "missing trim="))?;
    stock.usable = usable.ok_or_else(|| ParseError::syntax(line, "missing usable="))?;
    Ok(stock)
}

fn parse_footer(line: &str, lineno: usize) -> Result<Totals, ParseError> {
    let (head, list) = line
        .split_once("leftovers=[")
        .ok_or_else(|| ParseError::syntax(lineno, "missing leftovers=[...]"))?;
    let list = list
        .strip_suffix(']')
        .ok_or_else(|| ParseError::syntax(lineno, "unterminated leftovers list"))?;
    let fields: Vec<&str> = head.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(ParseError::syntax(lineno, "expected `trim=<t> welds=<w>`"));
    }
    let trim = keyed(fields.first(), "trim", lineno)?;
    let welds = keyed(fields.get(1), "welds", lineno)?;
    let mut leftovers = Vec::new();
    for token in list.split_whitespace() {
        let (len, count) = token
            .split_once('*')
            .ok_or_else(|| ParseError::syntax(lineno, format!("bad leftover `{token}`")))?;
        leftovers.push((num(len, lineno)?, num(count, lineno)?));
    }
    Ok(Totals {
        trim,
        welds,
        leftovers,
    })
}

impl PlanFile {
    /// Rebuilds a [`CuttingPlan`] over `instance`, assigning unit indices and
    /// pairing residuals with divisions. Pairing prefers a division in another
    /// stock with the same residual length; leftover residuals fall back to
    /// any same-item division so the checker can report what is wrong.
    pub fn into_plan(
        &self,
        instance: &Instance,
        params: &Params,
    ) -> Result<CuttingPlan, PlanError> {
        if self.stock_length != instance.stock_length {
            return Err(PlanError::StockLengthMismatch {
                plan: self.stock_length,
                instance: instance.stock_length,
            });
        }
        let mut next_unit: HashMap<ItemId, u32> = HashMap::new();
        let mut patterns = Vec::with_capacity(self.stocks.len());
        // (stock position, item, unit, residual length) per division
        let mut divs: Vec<(usize, ItemId, u32, u64)> = Vec::new();
        for (pos, line) in self.stocks.iter().enumerate() {
            let mut whole_items = Vec::new();
            for &(length, count) in &line.whole {
                let item = instance
                    .item_by_length(length)
                    .ok_or(PlanError::UnknownLength {
                        stock: line.index,
                        length,
                    })?;
                whole_items.push((item.id, count));
                let slot = next_unit.entry(item.id).or_insert(1);
                *slot = slot.saturating_add(count);
            }
            let mut divisions = Vec::new();
            for &(item_id, piece, residual) in &line.divisions {
                let slot = next_unit.entry(item_id).or_insert(1);
                divisions.push(Division {
                    item_id,
                    unit_index: *slot,
                    piece_here: piece,
                    residual,
                });
                divs.push((pos, item_id, *slot, residual));
                *slot = slot.saturating_add(1);
            }
            patterns.push(StockPattern {
                stock_index: line.index,
                whole_items,
                divisions,
                placed_residuals: Vec::new(),
                trim: line.trim,
                leftover_usable: line.usable,
            });
        }

        // residual tokens: (stock position, item, length)
        let res: Vec<(usize, ItemId, u64)> = self
            .stocks
            .iter()
            .enumerate()
            .flat_map(|(pos, l)| l.residuals.iter().map(move |&(i, len)| (pos, i, len)))
            .collect();
        let mut owner: Vec<Option<usize>> = vec![None; divs.len()];
        let strict = |r: usize, d: usize| {
            let (rp, ri, rl) = res[r];
            let (dp, di, _, dl) = divs[d];
            ri == di && rl == dl && rp != dp
        };
        let same_len = |r: usize, d: usize| {
            let (_, ri, rl) = res[r];
            let (_, di, _, dl) = divs[d];
            ri == di && rl == dl
        };
        let same_item = |r: usize, d: usize| res[r].1 == divs[d].1;
        let mut unit_of: Vec<Option<u32>> = vec![None; res.len()];
        for rule in [
            &strict as &dyn Fn(usize, usize) -> bool,
            &same_len,
            &same_item,
        ] {
            for r in 0..res.len() {
                if unit_of[r].is_none() {
                    let mut seen = vec![false; divs.len()];
                    augment(r, &rule, &mut owner, &mut seen, &unit_of);
                }
            }
            for (d, o) in owner.iter().enumerate() {
                if let Some(r) = *o {
                    unit_of[r] = Some(divs[d].2);
                }
            }
        }
        for (r, &(pos, item_id, length)) in res.iter().enumerate() {
            patterns[pos].placed_residuals.push(PlacedResidual {
                item_id,
                unit_index: unit_of[r].unwrap_or(0),
                length,
            });
        }

        Ok(CuttingPlan {
            instance: instance.clone(),
            params: params.clone(),
            patterns,
        })
    }
}

/// Kuhn augmenting path from residual `r`. Residuals already fixed by an
/// earlier, stricter rule are never displaced.
fn augment(
    r: usize,
    edge: &dyn Fn(usize, usize) -> bool,
    owner: &mut [Option<usize>],
    seen: &mut [bool],
    fixed: &[Option<u32>],
) -> bool {
    // the earliest free division keeps chains of equal residuals in order
    if let Some(d) = (0..owner.len()).find(|&d| owner[d].is_none() && edge(r, d)) {
        owner[d] = Some(r);
        return true;
    }
    for d in 0..owner.len() {
        if seen[d] || !edge(r, d) {
            continue;
        }
        seen[d] = true;
        match owner[d] {
            None => {
                owner[d] = Some(r);
                return true;
            }
            Some(other) if fixed[other].is_none() => {
                if augment(other, edge, owner, seen, fixed) {
                    owner[d] = Some(r);
                    return true;
                }
            }
            Some(_) => {}
        }
    }
    false
}
