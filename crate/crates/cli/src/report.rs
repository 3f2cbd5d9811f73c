use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use tfum::{format_itemset, Database, GlobalOrder, Membership, MinerConfig, OracleResult, Outcome};

pub const CSV_HEADER: &str = "itemset,length,tfur,sumFu";

/// One output line: members in ≺ order joined by `&`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultRow {
    pub itemset: String,
    pub length: usize,
    pub tfur: f64,
    pub sum_fu: f64,
}

pub fn miner_rows(outcome: &Outcome, db: &Database, mf: &Membership) -> Vec<ResultRow> {
    outcome
        .results
        .iter()
        .map(|r| ResultRow {
            itemset: format_itemset(&r.itemset, db, mf),
            length: r.itemset.len(),
            tfur: r.tfur,
            sum_fu: r.sum_fu,
        })
        .collect()
}

/// Oracle itemsets laid out exactly like miner output.
pub fn oracle_rows(
    result: &OracleResult<f64>,
    order: &GlobalOrder<f64>,
    db: &Database,
    mf: &Membership,
) -> Vec<ResultRow> {
    let mut sets: Vec<_> = result
        .itemsets
        .iter()
        .map(|(itemset, entry)| {
            let mut members = itemset.clone();
            members.sort_by(|&a, &b| order.cmp_fuzzy(a, b));
            (members, entry)
        })
        .collect();
    sets.sort_by(|a, b| order.cmp_itemsets(&a.0, &b.0));
    sets.into_iter()
        .map(|(members, entry)| ResultRow {
            itemset: format_itemset(&members, db, mf),
            length: members.len(),
            tfur: entry.tfur,
            sum_fu: entry.sum_fu,
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{:.10},{:.6}",
            row.itemset, row.length, row.tfur, row.sum_fu
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricsReport {
    pub visited_nodes: u64,
    pub candidates: u64,
    pub constructed_lists: u64,
    pub aborts_by_s3: u64,
    pub pruned_by_s2: u64,
    pub prune_ratio: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MineReport {
    pub gamma: f64,
    pub rounding: String,
    pub delta: f64,
    pub item_order: Vec<String>,
    pub metrics: MetricsReport,
    pub results: Vec<ResultRow>,
}

impl MineReport {
    pub fn new(
        outcome: &Outcome,
        config: &MinerConfig,
        db: &Database,
        rows: Vec<ResultRow>,
    ) -> Self {
        let m = &outcome.metrics;
        MineReport {
            gamma: config.gamma,
            rounding: config.rounding.to_string(),
            delta: outcome.delta,
            item_order: outcome
                .order()
                .sequence()
                .iter()
                .map(|&item| db.catalog().name(item).to_string())
                .collect(),
            metrics: MetricsReport {
                visited_nodes: m.visited_nodes,
                candidates: m.candidates,
                constructed_lists: m.constructed_lists,
                aborts_by_s3: m.aborts_by_s3,
                pruned_by_s2: m.pruned_by_s2,
                prune_ratio: m.prune_ratio(),
                wall_time_ms: m.elapsed.as_secs_f64() * 1e3,
            },
            results: rows,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Mismatch {
    MinerOnly(String),
    OracleOnly(String),
    Ratio {
        itemset: String,
        miner: f64,
        oracle: f64,
    },
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mismatch::MinerOnly(s) => write!(f, "only the miner reports {s}"),
            Mismatch::OracleOnly(s) => write!(f, "only the oracle reports {s}"),
            Mismatch::Ratio {
                itemset,
                miner,
                oracle,
            } => {
                write!(f, "{itemset}: miner tfur {miner} vs oracle {oracle}")
            }
        }
    }
}

pub fn compare(miner: &[ResultRow], oracle: &[ResultRow], tolerance: f64) -> Vec<Mismatch> {
    let m: BTreeMap<&str, f64> = miner.iter().map(|r| (r.itemset.as_str(), r.tfur)).collect();
    let o: BTreeMap<&str, f64> = oracle
        .iter()
        .map(|r| (r.itemset.as_str(), r.tfur))
        .collect();
    let mut out = Vec::new();
    for (&k, &v) in &m {
        match o.get(k) {
            None => out.push(Mismatch::MinerOnly(k.to_string())),
            Some(&w) if (v - w).abs() > tolerance => out.push(Mismatch::Ratio {
                itemset: k.to_string(),
                miner: v,
                oracle: w,
            }),
            Some(_) => {}
        }
    }
    out.extend(
        o.keys()
            .filter(|k| !m.contains_key(*k))
            .map(|k| Mismatch::OracleOnly(k.to_string())),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(itemset: &str, tfur: f64) -> ResultRow {
        ResultRow {
            itemset: itemset.into(),
            length: itemset.split('&').count(),
            tfur,
            sum_fu: 1.0,
        }
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_csv(&[row("D.Middle&A.Low", 0.2176910)], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "itemset,length,tfur,sumFu\nD.Middle&A.Low,2,0.2176910000,1.000000\n"
        );
    }

    #[test]
    fn comparison_reports_each_kind() {
        let miner = [row("A.Low", 0.3), row("B.Low", 0.5)];
        let oracle = [row("A.Low", 0.3 + 1e-12), row("C.Low", 0.4)];
        assert_eq!(
            compare(&miner, &oracle, 1e-9),
            vec![
                Mismatch::MinerOnly("B.Low".into()),
                Mismatch::OracleOnly("C.Low".into())
            ]
        );
        assert_eq!(
            compare(&miner, &[row("A.Low", 0.31), row("B.Low", 0.5)], 1e-9).len(),
            1
        );
        assert!(compare(&miner, &miner, 0.0).is_empty());
    }
}
