//! Temporal quantitative databases.
//!
//! Transactions carry integer purchase quantities and belong to exactly one
//! period. Periods are dense integers `1..=m`, declared up front so that empty
//! periods can exist. Items are interned into an [`ItemCatalog`]; item ids
//! follow the natural order of item names (numeric names compare
//! numerically), which is also the tie-break order used when ranking items.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemId(pub u32);

impl ItemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A period number, starting at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodId(pub u32);

impl fmt::Display for PeriodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

pub type Tid = u32;

#[derive(Debug, Error, PartialEq)]
pub enum DatabaseError {
    #[error("database must declare at least one period")]
    NoPeriods,
    #[error("transaction {tid}: period {period} outside 1..={period_count}")]
    PeriodOutOfRange {
        tid: Tid,
        period: u32,
        period_count: u32,
    },
    #[error("duplicate transaction id {0}")]
    DuplicateTid(Tid),
    #[error("transaction {tid}: item {item:?} listed twice")]
    DuplicateItem { tid: Tid, item: String },
    #[error("transaction {tid}: item {item:?} has no external utility")]
    MissingUtility { tid: Tid, item: String },
    #[error("item {0:?} has a non-positive external utility")]
    NonPositiveUtility(String),
    #[error("item {0:?} has more than one external utility")]
    DuplicateUtility(String),
}

/// Natural ordering of item names: all-digit names compare numerically and
/// sort before other names, which compare lexicographically.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let numeric = |s: &str| !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit());
    match (numeric(a), numeric(b)) {
        (true, true) => {
            let (ta, tb) = (a.trim_start_matches('0'), b.trim_start_matches('0'));
            ta.len()
                .cmp(&tb.len())
                .then_with(|| ta.cmp(tb))
                .then_with(|| a.cmp(b))
        }
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => a.cmp(b),
    }
}

/// Interned item names.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ItemCatalog {
    names: Vec<String>,
    ids: HashMap<String, ItemId>,
}

impl ItemCatalog {
    /// Builds a catalog whose ids follow [`natural_cmp`] order of the names.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        names.sort_by(|a, b| natural_cmp(a, b));
        names.dedup();
        let ids = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), ItemId(i as u32)))
            .collect();
        ItemCatalog { names, ids }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<ItemId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: ItemId) -> &str {
        &self.names[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        (0..self.names.len() as u32).map(ItemId)
    }
}

/// A transaction as supplied by a caller, with item names.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTransaction {
    pub tid: Tid,
    pub period: u32,
    pub entries: Vec<(String, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantTransaction {
    pub tid: Tid,
    pub period: PeriodId,
    /// `(item, quantity)` with distinct items and quantities ≥ 1, in the
    /// order they were supplied.
    pub entries: Vec<(ItemId, u32)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemporalDatabase<T> {
    period_count: u32,
    catalog: ItemCatalog,
    utilities: Vec<T>,
    transactions: Vec<QuantTransaction>,
}

impl<T: Scalar> TemporalDatabase<T> {
    /// Validates and interns a database. Every item named in a transaction
    /// must have a positive utility; zero-quantity entries are dropped.
    /// Transactions are stored ordered by `(period, tid)`.
    pub fn new(
        period_count: u32,
        utilities: Vec<(String, T)>,
        transactions: Vec<RawTransaction>,
    ) -> Result<Self, DatabaseError> {
        if period_count == 0 {
            return Err(DatabaseError::NoPeriods);
        }
        let mut seen_names = HashSet::new();
        for (name, value) in &utilities {
            if !seen_names.insert(name.as_str()) {
                return Err(DatabaseError::DuplicateUtility(name.clone()));
            }
            if *value <= T::zero() {
                return Err(DatabaseError::NonPositiveUtility(name.clone()));
            }
        }
        let catalog = ItemCatalog::from_names(utilities.iter().map(|(n, _)| n.clone()));
        let mut table = vec![T::zero(); catalog.len()];
        for (name, value) in utilities {
            table[catalog.id(&name).expect("interned").index()] = value;
        }

        let mut tids = HashSet::new();
        let mut converted = Vec::with_capacity(transactions.len());
        for raw in transactions {
            if raw.period == 0 || raw.period > period_count {
                return Err(DatabaseError::PeriodOutOfRange {
                    tid: raw.tid,
                    period: raw.period,
                    period_count,
                });
            }
            if !tids.insert(raw.tid) {
                return Err(DatabaseError::DuplicateTid(raw.tid));
            }
            let mut entries = Vec::with_capacity(raw.entries.len());
            let mut seen = HashSet::new();
            for (name, quantity) in raw.entries {
                let Some(item) = catalog.id(&name) else {
                    return Err(DatabaseError::MissingUtility {
                        tid: raw.tid,
                        item: name,
                    });
                };
                if !seen.insert(item) {
                    return Err(DatabaseError::DuplicateItem {
                        tid: raw.tid,
                        item: name,
                    });
                }
                if quantity > 0 {
                    entries.push((item, quantity));
                }
            }
            converted.push(QuantTransaction {
                tid: raw.tid,
                period: PeriodId(raw.period),
                entries,
            });
        }
        converted.sort_by_key(|t| (t.period, t.tid));
        Ok(TemporalDatabase {
            period_count,
            catalog,
            utilities: table,
            transactions: converted,
        })
    }

    /// Re-expresses the utilities in another scalar type.
    pub fn convert<U: Scalar>(&self) -> Option<TemporalDatabase<U>> {
        let utilities = self
            .utilities
            .iter()
            .map(|v| U::from_f64(v.as_f64()))
            .collect::<Option<Vec<_>>>()?;
        Some(TemporalDatabase {
            period_count: self.period_count,
            catalog: self.catalog.clone(),
            utilities,
            transactions: self.transactions.clone(),
        })
    }

    pub fn utility(&self, item: ItemId) -> T {
        self.utilities[item.index()]
    }
}

impl<T> TemporalDatabase<T> {
    pub fn period_count(&self) -> u32 {
        self.period_count
    }

    pub fn periods(&self) -> impl Iterator<Item = PeriodId> {
        (1..=self.period_count).map(PeriodId)
    }

    pub fn catalog(&self) -> &ItemCatalog {
        &self.catalog
    }

    pub fn item_count(&self) -> usize {
        self.catalog.len()
    }

    /// Transactions ordered by `(period, tid)`.
    pub fn transactions(&self) -> &[QuantTransaction] {
        &self.transactions
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn utilities(&self) -> &[T] {
        &self.utilities
    }
}

/// Period → tids index.
#[derive(Clone, Debug, PartialEq)]
pub struct TpTable {
    periods: Vec<PeriodId>,
    tids: HashMap<PeriodId, Vec<Tid>>,
}

impl TpTable {
    pub fn periods(&self) -> &[PeriodId] {
        &self.periods
    }

    /// Tids of a period in ascending order; empty for an undeclared or
    /// empty period.
    pub fn tids(&self, period: PeriodId) -> &[Tid] {
        self.tids.get(&period).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn period_of(&self, tid: Tid) -> Option<PeriodId> {
        self.periods
            .iter()
            .copied()
            .find(|p| self.tids(*p).binary_search(&tid).is_ok())
    }

    pub fn is_empty(&self) -> bool {
        self.tids.values().all(Vec::is_empty)
    }
}

/// Builds the TP-table in one pass over the transactions.
pub fn build_tp_table<T>(db: &TemporalDatabase<T>) -> TpTable {
    let periods: Vec<PeriodId> = db.periods().collect();
    let mut tids: HashMap<PeriodId, Vec<Tid>> = periods.iter().map(|&p| (p, Vec::new())).collect();
    for tx in db.transactions() {
        tids.entry(tx.period).or_default().push(tx.tid);
    }
    TpTable { periods, tids }
}
