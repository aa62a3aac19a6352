//! Shared generators and independent reference evaluators for the
//! integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use divcut::model::Cost;
use divcut::{CuttingPlan, Instance, Params};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance with up to `n_max` distinct lengths in `1..=c` and
/// demands in `1..=v_max`.
pub fn random_instance(rng: &mut impl Rng, c: u64, n_max: usize, v_max: u32) -> Instance {
    let n = rng.gen_range(1..=n_max.min(c as usize));
    let mut pairs: Vec<(u64, u32)> = Vec::with_capacity(n);
    while pairs.len() < n {
        let w = rng.gen_range(1..=c);
        if pairs.iter().all(|&(l, _)| l != w) {
            pairs.push((w, rng.gen_range(1..=v_max)));
        }
    }
    Instance::new(c, &pairs).expect("generated instance is valid")
}

/// Instance with at most `max_units` demand units in total.
pub fn small_instance(rng: &mut impl Rng, c: u64, max_units: u32, min_len: u64) -> Instance {
    let budget = rng.gen_range(1..=max_units);
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    let mut left = budget;
    while left > 0 {
        let w = rng.gen_range(min_len.min(c)..=c);
        let v = rng.gen_range(1..=left);
        match pairs.iter_mut().find(|(l, _)| *l == w) {
            Some(p) => p.1 += v,
            None => pairs.push((w, v)),
        }
        left -= v;
    }
    Instance::new(c, &pairs).expect("generated instance is valid")
}

/// Random parameters scaled to the stock length.
pub fn random_params(rng: &mut impl Rng, c: u64) -> Params {
    let beta = if rng.gen_bool(0.3) {
        Params::NO_BANKING
    } else {
        rng.gen_range(0..=c)
    };
    let theta = rng.gen_range(1..=(c / 3).max(1));
    let gamma = rng.gen_range(0..=3);
    let delta = rng.gen_range(0..=c as i128);
    Params::integral(beta, theta, gamma, delta).unwrap()
}

/// Minimum of `(cost, stocks, welds)` over every plan, found by placing
/// units one at a time: whole into a stock, or split at every integer point
/// with the two pieces in two distinct stocks. Only for tiny inputs.
pub fn brute_force(instance: &Instance, params: &Params, divisible: bool) -> (Cost, usize, u64) {
    let units: Vec<u64> = instance
        .items
        .iter()
        .flat_map(|it| std::iter::repeat_n(it.length, it.demand as usize))
        .collect();
    let mut best = None;
    let mut stocks: Vec<(u64, bool)> = Vec::new();
    place(
        &units,
        0,
        instance.stock_length,
        params,
        divisible,
        &mut stocks,
        0,
        &mut best,
    );
    best.expect("every unit fits an empty stock")
}

#[allow(clippy::too_many_arguments)]
fn place(
    units: &[u64],
    i: usize,
    c: u64,
    params: &Params,
    divisible: bool,
    stocks: &mut Vec<(u64, bool)>,
    welds: u64,
    best: &mut Option<(Cost, usize, u64)>,
) {
    if i == units.len() {
        let trim: u64 = stocks
            .iter()
            .map(|&(load, _)| params.counted_trim(c - load))
            .sum();
        let key = (params.cost_of(trim, welds), stocks.len(), welds);
        if best.as_ref().is_none_or(|b| key < *b) {
            *best = Some(key);
        }
        return;
    }
    let w = units[i];
    // a fresh stock is always the next one, which fixes stock labels
    let open = stocks.len();
    for j in 0..=open {
        if j == open {
            stocks.push((0, false));
        }
        if stocks[j].0 + w <= c {
            stocks[j].0 += w;
            place(units, i + 1, c, params, divisible, stocks, welds, best);
            stocks[j].0 -= w;
        }
        if j == open {
            stocks.pop();
        }
    }
    if !divisible || !params.is_divisible(w) {
        return;
    }
    for piece in params.theta..=w - params.theta {
        let residual = w - piece;
        for d in 0..=open {
            let d_new = d == open;
            if d_new {
                stocks.push((0, false));
            }
            if !stocks[d].1 && stocks[d].0 + piece <= c {
                stocks[d].0 += piece;
                stocks[d].1 = true;
                let open2 = stocks.len();
                for r in 0..=open2 {
                    if r == d {
                        continue;
                    }
                    if r == open2 {
                        stocks.push((0, false));
                    }
                    if stocks[r].0 + residual <= c {
                        stocks[r].0 += residual;
                        place(units, i + 1, c, params, divisible, stocks, welds + 1, best);
                        stocks[r].0 -= residual;
                    }
                    if r == open2 {
                        stocks.pop();
                    }
                }
                stocks[d].1 = false;
                stocks[d].0 -= piece;
            }
            if d_new {
                stocks.pop();
            }
        }
    }
}

/// Constraint numbers violated by the plan, evaluated directly on the
/// model's decision variables rebuilt from it:
/// x (whole counts), z and α (divisions), b (residual placements), t, u.
///
/// Stock loads use the division piece as recorded and each placed residual
/// as the α of its division in another stock; a residual without such a
/// division contributes nothing.
/// (item, unit index)
type Unit = (u32, u32);

pub fn model_violations(plan: &CuttingPlan) -> BTreeSet<u8> {
    let inst = &plan.instance;
    let params = &plan.params;
    let c = u128::from(inst.stock_length);
    let mut bad = BTreeSet::new();

    // z[(i, k)] = list of (stock, alpha, piece)
    let mut z: HashMap<Unit, Vec<(usize, u64, u64)>> = HashMap::new();
    // b[(i, k)] = list of (stock, recorded length)
    let mut b: HashMap<Unit, Vec<(usize, u64)>> = HashMap::new();
    let mut x: HashMap<u32, u64> = HashMap::new();
    for (j, p) in plan.patterns.iter().enumerate() {
        for &(i, n) in &p.whole_items {
            *x.entry(i).or_default() += u64::from(n);
        }
        for d in &p.divisions {
            z.entry((d.item_id, d.unit_index))
                .or_default()
                .push((j, d.residual, d.piece_here));
        }
        for r in &p.placed_residuals {
            b.entry((r.item_id, r.unit_index))
                .or_default()
                .push((j, r.length));
        }
    }

    // (3)
    for (j, p) in plan.patterns.iter().enumerate() {
        let mut load = 0u128;
        for &(i, n) in &p.whole_items {
            match inst.item(i) {
                Some(item) => load += u128::from(item.length) * u128::from(n),
                None => {
                    bad.insert(4);
                }
            }
        }
        for d in &p.divisions {
            load += u128::from(d.piece_here);
        }
        for r in &p.placed_residuals {
            let alpha = z
                .get(&(r.item_id, r.unit_index))
                .and_then(|at| at.iter().find(|&&(l, _, _)| l != j))
                .map_or(0, |&(_, a, _)| a);
            load += u128::from(alpha);
        }
        if load + u128::from(p.trim) != c || p.stock_index != j + 1 {
            bad.insert(3);
        }
    }

    // (4): every unit once, whole or divided
    for item in &inst.items {
        let divided: u64 = z
            .iter()
            .filter(|((i, _), _)| *i == item.id)
            .map(|(_, at)| at.len() as u64)
            .sum();
        let ks_ok = z
            .iter()
            .filter(|((i, _), _)| *i == item.id)
            .all(|(&(_, k), at)| (1..=item.demand).contains(&k) && at.len() == 1);
        if x.get(&item.id).copied().unwrap_or(0) + divided != u64::from(item.demand) || !ks_ok {
            bad.insert(4);
        }
    }
    if z.keys().any(|(i, _)| inst.item(*i).is_none()) {
        bad.insert(4);
    }

    // (5): per divided unit, its residual is used exactly once, at length α
    for (key, at) in &z {
        let uses = b.get(key).map_or(0, Vec::len);
        let lengths_ok = b
            .get(key)
            .is_none_or(|bs| bs.iter().all(|&(_, len)| len == at[0].1));
        if uses != at.len() || !lengths_ok {
            bad.insert(5);
        }
    }
    for key in b.keys() {
        if !z.contains_key(key) {
            bad.insert(5);
        }
    }
    // a residual in its own dividing stock has no l != j term
    for (key, bs) in &b {
        if let Some(at) = z.get(key) {
            if bs.iter().any(|&(l, _)| at.iter().any(|&(j, _, _)| j == l)) {
                bad.insert(3);
            }
        }
    }

    // (6)
    if plan.patterns.iter().any(|p| p.divisions.len() > 1) {
        bad.insert(6);
    }

    // (7), (8): the recorded piece must be w − α
    for (&(i, _), at) in &z {
        let Some(item) = inst.item(i) else { continue };
        for &(_, alpha, piece) in at {
            if alpha < params.theta {
                bad.insert(7);
            }
            if piece < params.theta
                || u128::from(piece) + u128::from(alpha) != u128::from(item.length)
            {
                bad.insert(8);
            }
        }
    }

    // (9)
    for p in &plan.patterns {
        let u = p.trim < params.beta;
        if p.leftover_usable == u {
            bad.insert(9);
        }
    }
    bad
}

fn reclassify(plan: &mut CuttingPlan, stock: usize) {
    let trim = plan.patterns[stock].trim;
    plan.patterns[stock].leftover_usable = plan.params.is_usable(trim);
}

fn append_residual_stock(plan: &mut CuttingPlan, item_id: u32, unit_index: u32, length: u64) {
    let c = plan.instance.stock_length;
    let trim = c - length;
    plan.patterns.push(divcut::StockPattern {
        stock_index: plan.patterns.len() + 1,
        whole_items: vec![],
        divisions: vec![],
        placed_residuals: vec![divcut::PlacedResidual {
            item_id,
            unit_index,
            length,
        }],
        trim,
        leftover_usable: plan.params.is_usable(trim),
    });
}

/// Whole units `(stock, slot in whole_items, item id, length)` of the plan.
fn whole_units(plan: &CuttingPlan) -> Vec<(usize, usize, u32, u64)> {
    let mut out = Vec::new();
    for (j, p) in plan.patterns.iter().enumerate() {
        for (slot, &(id, n)) in p.whole_items.iter().enumerate() {
            if n > 0 {
                out.push((j, slot, id, plan.instance.item(id).unwrap().length));
            }
        }
    }
    out
}

fn take_whole(plan: &mut CuttingPlan, j: usize, slot: usize) {
    let entry = &mut plan.patterns[j].whole_items[slot];
    entry.1 -= 1;
    if entry.1 == 0 {
        plan.patterns[j].whole_items.remove(slot);
    }
}

/// Placed residuals `(stock, slot)` together with the stock of their division.
fn residual_links(plan: &CuttingPlan) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (l, p) in plan.patterns.iter().enumerate() {
        for (slot, r) in p.placed_residuals.iter().enumerate() {
            let home = plan.patterns.iter().position(|q| {
                q.divisions
                    .iter()
                    .any(|d| d.item_id == r.item_id && d.unit_index == r.unit_index)
            });
            if let Some(j) = home {
                out.push((l, slot, j));
            }
        }
    }
    out
}

/// Applies one random edit to a feasible plan that breaks the model
/// constraint `target`, or returns `None` when the plan offers no place for
/// such an edit.
pub fn mutate(plan: &CuttingPlan, target: u8, rng: &mut impl Rng) -> Option<CuttingPlan> {
    let mut m = plan.clone();
    let theta = m.params.theta;
    let pick = |rng: &mut dyn rand::RngCore, n: usize| -> Option<usize> {
        (n > 0).then(|| rng.gen_range(0..n))
    };
    match target {
        3 => {
            let links = residual_links(&m);
            if !links.is_empty() && rng.gen_bool(0.5) {
                // residual moved into the stock that divides its unit
                let (l, slot, j) = links[rng.gen_range(0..links.len())];
                let r = m.patterns[l].placed_residuals.remove(slot);
                m.patterns[j].placed_residuals.push(r);
            } else {
                let j = rng.gen_range(0..m.patterns.len());
                if rng.gen_bool(0.5) || m.patterns[j].trim == 0 {
                    m.patterns[j].trim += 1;
                } else {
                    m.patterns[j].trim -= 1;
                }
                reclassify(&mut m, j);
            }
        }
        4 => {
            let units = whole_units(&m);
            let i = pick(rng, units.len())?;
            let (j, slot, _, w) = units[i];
            take_whole(&mut m, j, slot);
            m.patterns[j].trim += w;
            reclassify(&mut m, j);
        }
        5 => {
            let links = residual_links(&m);
            let (l, slot, _) = links[pick(rng, links.len())?];
            if rng.gen_bool(0.5) {
                let r = m.patterns[l].placed_residuals.remove(slot);
                m.patterns[l].trim += r.length;
            } else if m.patterns[l].trim > 0 {
                m.patterns[l].placed_residuals[slot].length += 1;
                m.patterns[l].trim -= 1;
            } else {
                m.patterns[l].placed_residuals[slot].length -= 1;
                m.patterns[l].trim += 1;
            }
            reclassify(&mut m, l);
        }
        6 => {
            // a stock gets a second division: whole units are opened until
            // it holds two, each leaving a θ residual in a fresh stock
            let candidates: Vec<usize> = (0..m.patterns.len())
                .filter(|&j| {
                    let p = &m.patterns[j];
                    let divisible = p
                        .whole_items
                        .iter()
                        .map(|&(id, n)| {
                            if m.params.is_divisible(m.instance.item(id).unwrap().length) {
                                n as usize
                            } else {
                                0
                            }
                        })
                        .sum::<usize>();
                    p.divisions.len() < 2 && p.divisions.len() + divisible >= 2
                })
                .collect();
            let j = candidates[pick(rng, candidates.len())?];
            let mut fresh = u32::MAX;
            while m.patterns[j].divisions.len() < 2 {
                let slot = m.patterns[j].whole_items.iter().position(|&(id, _)| {
                    m.params.is_divisible(m.instance.item(id).unwrap().length)
                })?;
                let id = m.patterns[j].whole_items[slot].0;
                let w = m.instance.item(id).unwrap().length;
                take_whole(&mut m, j, slot);
                m.patterns[j].divisions.push(divcut::Division {
                    item_id: id,
                    unit_index: fresh,
                    piece_here: w - theta,
                    residual: theta,
                });
                m.patterns[j].trim += theta;
                append_residual_stock(&mut m, id, fresh, theta);
                fresh -= 1;
            }
            reclassify(&mut m, j);
            m.canonicalize_units();
        }
        7 | 8 => {
            // a whole unit is opened with one piece a millimetre short of θ
            if theta < 2 {
                return None;
            }
            let units: Vec<_> = whole_units(&m)
                .into_iter()
                .filter(|&(j, _, _, w)| w + 1 >= 2 * theta && m.patterns[j].divisions.is_empty())
                .collect();
            let (j, slot, id, w) = units[pick(rng, units.len())?];
            let short = theta - 1;
            let (piece, residual) = if target == 7 {
                (w - short, short)
            } else {
                (short, w - short)
            };
            take_whole(&mut m, j, slot);
            m.patterns[j].divisions.push(divcut::Division {
                item_id: id,
                unit_index: u32::MAX,
                piece_here: piece,
                residual,
            });
            m.patterns[j].trim += residual;
            reclassify(&mut m, j);
            append_residual_stock(&mut m, id, u32::MAX, residual);
            m.canonicalize_units();
        }
        9 => {
            let j = rng.gen_range(0..m.patterns.len());
            m.patterns[j].leftover_usable = !m.patterns[j].leftover_usable;
        }
        _ => return None,
    }
    Some(m)
}

/// A heuristic plan over a random instance with cheap welds and a small θ,
/// so that divisions and residuals are common.
pub fn rich_plan(rng: &mut impl Rng) -> CuttingPlan {
    let c = rng.gen_range(20..=300);
    let inst = random_instance(rng, c, 6, 6);
    let beta = if rng.gen_bool(0.5) {
        Params::NO_BANKING
    } else {
        rng.gen_range(1..=c)
    };
    let theta = rng.gen_range(2..=(c / 6).max(2));
    let params = Params::integral(beta, theta, 1, rng.gen_range(0..=2)).unwrap();
    divcut::solve_heuristic_with(&inst, &params, divcut::DivisionMode::Enabled).unwrap()
}
