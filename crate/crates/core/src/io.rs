//! Instance text format.
//!
//! ```text
//! # comment
//! n t
//! x₁
//! …
//! xₙ
//! ```
//!
//! Repeated values encode multiplicity. Blank lines and lines starting with
//! `#` are skipped; line numbers in errors count every physical line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::multiset::MultiSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub x: MultiSet,
    pub t: u64,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number(line: usize, s: &str, what: &str) -> Result<u64> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("{what}: expected a non-negative integer, got {s:?}") })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header `n t`".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, t] = fields[..] else {
        return Err(Error::Parse { line: hline, msg: "header must be `n t`".into() });
    };
    let n = number(hline, n, "n")?;
    let t = number(hline, t, "t")?;
    if n == 0 {
        return Err(Error::Parse { line: hline, msg: "n must be positive".into() });
    }
    let mut values = Vec::with_capacity(n.min(1 << 24) as usize);
    let mut last = hline;
    for (line, l) in lines {
        last = line;
        if values.len() as u64 == n {
            return Err(Error::Parse { line, msg: format!("more than n = {n} values") });
        }
        let v = number(line, l, "value")?;
        if v == 0 {
            return Err(Error::Parse { line, msg: "values must be positive".into() });
        }
        values.push(v);
    }
    if (values.len() as u64) < n {
        return Err(Error::Parse { line: last, msg: format!("expected {n} values, found {}", values.len()) });
    }
    Ok(Instance { x: MultiSet::from_values(&values)?, t })
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn format_instance(x: &MultiSet, t: u64) -> String {
    let mut out = format!("{} {t}\n", x.len());
    for v in x.iter() {
        writeln!(out, "{v}").expect("writing to a string");
    }
    out
}

/// Whitespace-separated positive integers, `#` comments allowed.
pub fn parse_values(text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        for tok in l.split_whitespace() {
            let v = number(line, tok, "value")?;
            if v == 0 {
                return Err(Error::Parse { line, msg: "values must be positive".into() });
            }
            out.push(v);
        }
    }
    Ok(out)
}
