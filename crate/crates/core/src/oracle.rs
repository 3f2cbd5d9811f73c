//! Reference miner that evaluates the ratio definition directly.
//!
//! Nothing here reuses the profiling, indexing or list code of the miner:
//! itemsets are enumerated from each transaction's fuzzified contents and
//! every ratio is recomputed from raw quantities. Only the database model and
//! [`MembershipFunction::fuzzify`] are shared.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::membership::{MembershipFunction, RegionId, RoundingMode};
use crate::preprocess::FuzzyItem;
use crate::scalar::Scalar;
use crate::tqdb::{ItemId, PeriodId, QuantTransaction, TemporalDatabase};

/// Largest number of distinct fuzzy items the oracle agrees to enumerate.
pub const MAX_FUZZY_ITEMS: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("database has {0} distinct fuzzy items; the reference enumeration is limited to {MAX_FUZZY_ITEMS}")]
    TooManyFuzzyItems(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleEntry<T> {
    pub tfur: T,
    pub sum_fu: T,
}

/// Itemsets (members sorted by item id) with their ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<T> {
    pub itemsets: BTreeMap<Vec<FuzzyItem>, OracleEntry<T>>,
}

impl<T: Scalar> OracleResult<T> {
    pub fn len(&self) -> usize {
        self.itemsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.itemsets.is_empty()
    }

    pub fn get(&self, itemset: &[FuzzyItem]) -> Option<&OracleEntry<T>> {
        let mut key = itemset.to_vec();
        key.sort();
        self.itemsets.get(&key)
    }

    /// Keeps the itemsets whose ratio is at least `gamma`, up to
    /// [`Scalar::threshold_slack`].
    pub fn at_least(&self, gamma: T) -> OracleResult<T> {
        let gamma = T::threshold_cut(gamma);
        OracleResult {
            itemsets: self
                .itemsets
                .iter()
                .filter(|(_, e)| e.tfur >= gamma)
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }
}

fn fuzzified<T: Scalar>(
    tx: &QuantTransaction,
    mf: &MembershipFunction<T>,
    mode: RoundingMode,
) -> Vec<(ItemId, Vec<(RegionId, T)>)> {
    let mut out: Vec<_> = tx
        .entries
        .iter()
        .map(|&(item, q)| (item, mf.fuzzify(q, mode)))
        .filter(|(_, regions)| !regions.is_empty())
        .collect();
    out.sort_by_key(|(item, _)| *item);
    out
}

/// Every fuzzy itemset (at most one region per item) contained in at least
/// one transaction.
pub fn enumerate_fuzzy_itemsets<T: Scalar>(
    db: &TemporalDatabase<T>,
    mf: &MembershipFunction<T>,
    mode: RoundingMode,
) -> Result<BTreeSet<Vec<FuzzyItem>>, OracleError> {
    let contents: Vec<_> = db
        .transactions()
        .iter()
        .map(|tx| fuzzified(tx, mf, mode))
        .collect();
    let distinct: BTreeSet<FuzzyItem> = contents
        .iter()
        .flatten()
        .flat_map(|(item, regions)| regions.iter().map(|&(r, _)| FuzzyItem::new(*item, r)))
        .collect();
    if distinct.len() > MAX_FUZZY_ITEMS {
        return Err(OracleError::TooManyFuzzyItems(distinct.len()));
    }
    let mut found = BTreeSet::new();
    for tx in &contents {
        let mut current = Vec::new();
        expand(tx, 0, &mut current, &mut found);
    }
    Ok(found)
}

fn expand<T>(
    tx: &[(ItemId, Vec<(RegionId, T)>)],
    next: usize,
    current: &mut Vec<FuzzyItem>,
    found: &mut BTreeSet<Vec<FuzzyItem>>,
) {
    for i in next..tx.len() {
        let (item, regions) = &tx[i];
        for &(region, _) in regions {
            current.push(FuzzyItem::new(*item, region));
            found.insert(current.clone());
            expand(tx, i + 1, current, found);
            current.pop();
        }
    }
}

/// Ratio of every supported fuzzy itemset.
pub fn oracle_ratios<T: Scalar>(
    db: &TemporalDatabase<T>,
    mf: &MembershipFunction<T>,
    mode: RoundingMode,
) -> Result<OracleResult<T>, OracleError> {
    let itemsets = enumerate_fuzzy_itemsets(db, mf, mode)?;
    let degree_in = |tx: &QuantTransaction, fi: FuzzyItem| -> Option<T> {
        let &(_, q) = tx.entries.iter().find(|(item, _)| *item == fi.item)?;
        mf.fuzzify(q, mode)
            .into_iter()
            .find(|&(r, _)| r == fi.region)
            .map(|(_, d)| d)
    };
    let transaction_tfu = |tx: &QuantTransaction| -> T {
        let mut total = T::zero();
        for &(item, q) in &tx.entries {
            for (_, d) in mf.fuzzify(q, mode) {
                total = total + d * T::from_count(u64::from(q)) * db.utility(item);
            }
        }
        total
    };
    let tfu: Vec<T> = db.transactions().iter().map(transaction_tfu).collect();
    let start_period = |fi: FuzzyItem| -> PeriodId {
        db.transactions()
            .iter()
            .filter(|tx| degree_in(tx, fi).is_some())
            .map(|tx| tx.period)
            .min()
            .expect("enumerated fuzzy items occur somewhere")
    };

    let mut out = BTreeMap::new();
    for itemset in itemsets {
        let mut fuzzy_utility = T::zero();
        for tx in db.transactions() {
            let degrees: Option<Vec<T>> = itemset.iter().map(|&fi| degree_in(tx, fi)).collect();
            let Some(degrees) = degrees else { continue };
            let min_degree = degrees.into_iter().fold(T::one(), |m, d| m.min_of(d));
            let mut crisp = T::zero();
            for fi in &itemset {
                let &(_, q) = tx
                    .entries
                    .iter()
                    .find(|(item, _)| *item == fi.item)
                    .unwrap();
                crisp = crisp + T::from_count(u64::from(q)) * db.utility(fi.item);
            }
            fuzzy_utility = fuzzy_utility + min_degree * crisp;
        }
        let latest = itemset.iter().map(|&fi| start_period(fi)).max().unwrap();
        let mut denominator = T::zero();
        for (tx, t) in db.transactions().iter().zip(&tfu) {
            if tx.period >= latest {
                denominator = denominator + *t;
            }
        }
        let tfur = if denominator > T::zero() {
            fuzzy_utility / denominator
        } else {
            T::zero()
        };
        out.insert(
            itemset,
            OracleEntry {
                tfur,
                sum_fu: fuzzy_utility,
            },
        );
    }
    Ok(OracleResult { itemsets: out })
}

/// Itemsets whose ratio is at least `gamma`.
pub fn oracle_mine<T: Scalar>(
    db: &TemporalDatabase<T>,
    mf: &MembershipFunction<T>,
    mode: RoundingMode,
    gamma: T,
) -> Result<OracleResult<T>, OracleError> {
    Ok(oracle_ratios(db, mf, mode)?.at_least(gamma))
}
