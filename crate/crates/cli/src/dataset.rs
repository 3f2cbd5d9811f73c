//! Text formats for databases, profits and membership functions.
//!
//! A dataset file starts with `periods: m` and has one transaction per line:
//!
//! ```text
//! periods: 2
//! 1 | A:3 C:1
//! 2 | B:7
//! ```
//!
//! Transaction ids are the 1-based ordinals of transaction lines. A profit
//! file has one `<item> <profit>` pair per line. In both files blank lines
//! are ignored and `#` starts a comment.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tfum::{Database, Membership, RawTransaction, TemporalDatabase};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Parse(#[from] ParseError),
}

/// A malformed input, located by file and line (line 0 when the problem is
/// not tied to a line).
#[derive(Debug, Error, PartialEq, Eq)]
pub struct ParseError {
    pub file: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}: {}", self.file, self.message)
        } else {
            write!(f, "{}:{}: {}", self.file, self.line, self.message)
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub fn parse_profits(file: &str, text: &str) -> Result<Vec<(String, f64)>, ParseError> {
    let err = |line, message: String| ParseError {
        file: file.to_string(),
        line,
        message,
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (n, line) in content_lines(text) {
        let mut fields = line.split_whitespace();
        let (Some(item), Some(profit), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err(n, format!("expected `<item> <profit>`, got {line:?}")));
        };
        let profit: f64 = profit
            .parse()
            .map_err(|_| err(n, format!("profit {profit:?} is not a number")))?;
        if !(profit.is_finite() && profit > 0.0) {
            return Err(err(n, format!("profit of {item:?} must be positive")));
        }
        if !seen.insert(item.to_string()) {
            return Err(err(n, format!("item {item:?} listed twice")));
        }
        out.push((item.to_string(), profit));
    }
    Ok(out)
}

pub fn parse_dataset(
    file: &str,
    text: &str,
    profits: Vec<(String, f64)>,
) -> Result<Database, ParseError> {
    let err = |line, message: String| ParseError {
        file: file.to_string(),
        line,
        message,
    };
    let known: HashSet<&str> = profits.iter().map(|(name, _)| name.as_str()).collect();
    let mut lines = content_lines(text);

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| err(0, "missing `periods: m` header".into()))?;
    let period_count: u32 = header
        .strip_prefix("periods:")
        .and_then(|m| m.trim().parse().ok())
        .filter(|&m| m >= 1)
        .ok_or_else(|| {
            err(
                header_line,
                format!("expected `periods: m` with m ≥ 1, got {header:?}"),
            )
        })?;

    let mut transactions = Vec::new();
    for (n, line) in lines {
        let (period, items) = line.split_once('|').ok_or_else(|| {
            err(
                n,
                format!("expected `<period> | <item>:<qty> ...`, got {line:?}"),
            )
        })?;
        let period: u32 = period.trim().parse().map_err(|_| {
            err(
                n,
                format!("period {:?} is not a positive integer", period.trim()),
            )
        })?;
        if !(1..=period_count).contains(&period) {
            return Err(err(
                n,
                format!("period {period} outside 1..={period_count}"),
            ));
        }
        let mut entries = Vec::new();
        for token in items.split_whitespace() {
            let (item, qty) = token
                .split_once(':')
                .ok_or_else(|| err(n, format!("expected `<item>:<qty>`, got {token:?}")))?;
            let qty: u32 = qty.parse().map_err(|_| {
                err(
                    n,
                    format!("quantity {qty:?} of {item:?} is not a non-negative integer"),
                )
            })?;
            if qty == 0 {
                return Err(err(n, format!("quantity of {item:?} must be positive")));
            }
            if !known.contains(item) {
                return Err(err(n, format!("item {item:?} has no profit")));
            }
            if entries.iter().any(|(seen, _)| seen == item) {
                return Err(err(n, format!("item {item:?} listed twice")));
            }
            entries.push((item.to_string(), qty));
        }
        if entries.is_empty() {
            return Err(err(n, "transaction has no items".into()));
        }
        transactions.push(RawTransaction {
            tid: transactions.len() as u32 + 1,
            period,
            entries,
        });
    }
    TemporalDatabase::new(period_count, profits, transactions).map_err(|e| err(0, e.to_string()))
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_database(dataset: &Path, profits: &Path) -> Result<Database, InputError> {
    let profit_text = read(profits)?;
    let data_text = read(dataset)?;
    let profits = parse_profits(&profits.display().to_string(), &profit_text)?;
    Ok(parse_dataset(
        &dataset.display().to_string(),
        &data_text,
        profits,
    )?)
}

pub fn load_membership(path: &Path) -> Result<Membership, InputError> {
    let text = read(path)?;
    Membership::from_json(&text).map_err(|e| {
        InputError::Parse(ParseError {
            file: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })
    })
}

/// Writes a database in the dataset format, transactions in tid order.
pub fn write_dataset<W: Write>(db: &Database, mut out: W) -> io::Result<()> {
    writeln!(out, "periods: {}", db.period_count())?;
    let mut txs: Vec<_> = db.transactions().iter().collect();
    txs.sort_by_key(|tx| tx.tid);
    for tx in txs {
        write!(out, "{} |", tx.period.0)?;
        for &(item, qty) in &tx.entries {
            write!(out, " {}:{}", db.catalog().name(item), qty)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_profits<W: Write>(db: &Database, mut out: W) -> io::Result<()> {
    for item in db.catalog().ids() {
        writeln!(out, "{} {}", db.catalog().name(item), db.utility(item))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROFITS: &str = "A 9\nB 5\n";

    fn profits() -> Vec<(String, f64)> {
        parse_profits("p.txt", PROFITS).unwrap()
    }

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# demo\nperiods: 2\n\n1 | A:3 B:1  # first\n2 | B:7\n";
        let db = parse_dataset("d.txt", text, profits()).unwrap();
        assert_eq!(db.period_count(), 2);
        assert_eq!(db.transactions().len(), 2);
        assert_eq!(db.transactions()[1].tid, 2);
        assert_eq!(db.transactions()[1].entries.len(), 1);
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("periods: 2\n1 | A:0\n", 2, "positive"),
            ("periods: 3\n\n4 | A:1\n", 3, "outside"),
            ("periods: 1\n1 | Z:1\n", 2, "no profit"),
            ("periods: 1\n1 | A:1 A:2\n", 2, "twice"),
            ("periods: 1\n1 A:1\n", 2, "expected"),
            ("periods: 1\n1 | A:x\n", 2, "quantity"),
            ("periods: 1\n1 |\n", 2, "no items"),
            ("period 1\n", 1, "periods: m"),
        ];
        for (text, line, needle) in cases {
            let e = parse_dataset("d.txt", text, profits()).unwrap_err();
            assert_eq!(e.line, line, "{text:?}");
            assert!(e.message.contains(needle), "{e}");
            assert!(e.to_string().starts_with(&format!("d.txt:{line}:")));
        }
    }

    #[test]
    fn profit_errors() {
        assert_eq!(parse_profits("p", "A 1\nA 2\n").unwrap_err().line, 2);
        assert_eq!(parse_profits("p", "A -1\n").unwrap_err().line, 1);
        assert_eq!(parse_profits("p", "A\n").unwrap_err().line, 1);
        assert_eq!(parse_profits("p", "A one\n").unwrap_err().line, 1);
    }

    #[test]
    fn round_trip() {
        let text = "periods: 3\n2 | B:7\n1 | A:3 B:1\n3 | A:12\n";
        let db = parse_dataset("d.txt", text, profits()).unwrap();
        let mut data = Vec::new();
        let mut prof = Vec::new();
        write_dataset(&db, &mut data).unwrap();
        write_profits(&db, &mut prof).unwrap();
        assert_eq!(String::from_utf8(data.clone()).unwrap(), text);
        let again = parse_dataset(
            "d.txt",
            std::str::from_utf8(&data).unwrap(),
            parse_profits("p", std::str::from_utf8(&prof).unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(again, db);
    }
}
