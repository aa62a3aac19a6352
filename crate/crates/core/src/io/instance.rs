//! Instance text format:
//!
//! ```text
//! # comment
//! c 12000
//! 3050 4
//! 1200 10
//! ```
//!
//! The first data line gives the stock length, every following data line an
//! item length and its demand. Blank lines and lines starting with `#` are
//! ignored.

use std::fmt::Write;

use super::ParseError;
use crate::model::{validate_instance, Instance, RawInstance};

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut stock_length = None;
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if stock_length.is_none() {
            match fields[..] {
                ["c", value] => stock_length = Some(int(value, lineno)?),
                _ => return Err(ParseError::syntax(lineno, "expected `c <stock length>`")),
            }
            continue;
        }
        match fields[..] {
            [w, v] => items.push((int(w, lineno)?, int(v, lineno)?)),
            _ => return Err(ParseError::syntax(lineno, "expected `<length> <demand>`")),
        }
    }
    let Some(stock_length) = stock_length else {
        return Err(ParseError::syntax(
            text.lines().count().max(1),
            "missing `c <stock length>` line",
        ));
    };
    Ok(validate_instance(&RawInstance {
        stock_length,
        items,
    })?)
}

fn int(token: &str, line: usize) -> Result<i128, ParseError> {
    token
        .parse::<i128>()
        .map_err(|_| ParseError::syntax(line, format!("`{token}` is not an integer")))
}

pub fn write_instance(instance: &Instance) -> String {
    let mut out = format!("c {}\n", instance.stock_length);
    for item in &instance.items {
        let _ = writeln!(out, "{} {}", item.length, item.demand);
    }
    out
}
