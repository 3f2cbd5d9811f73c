//! Revised temporal fuzzy-lists.
//!
//! Each list describes one fuzzy itemset by the transactions containing it.
//! An entry stores the crisp utility `u` of the itemset in the transaction,
//! its region value `R` (the minimum member degree, so the entry's fuzzy
//! utility is `u × R`), and the remaining measure `rmtfu`: the summed
//! maximal fuzzy utilities of the crisp items that follow the itemset in the
//! revised transaction. `sum_fu + sum_rmtfu` bounds the fuzzy utility of
//! the itemset and of every extension of it.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::membership::MembershipFunction;
use crate::preprocess::{format_itemset, FuzzyItem, GlobalOrder, RevisedDatabase, TemporalIndex};
use crate::scalar::Scalar;
use crate::tqdb::{PeriodId, TemporalDatabase};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RtfEntry<T> {
    /// Position of the transaction in database order.
    pub tx: u32,
    pub utility: T,
    pub remaining: T,
    pub region: T,
}

impl<T: Scalar> RtfEntry<T> {
    pub fn fuzzy_utility(&self) -> T {
        self.utility * self.region
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RtfList<T> {
    itemset: Vec<FuzzyItem>,
    last_rank: u32,
    latest_stp: PeriodId,
    entries: Vec<RtfEntry<T>>,
    sum_fu: T,
    sum_rmtfu: T,
}

impl<T: Scalar> RtfList<T> {
    fn empty(itemset: Vec<FuzzyItem>, last_rank: u32, latest_stp: PeriodId) -> Self {
        RtfList {
            itemset,
            last_rank,
            latest_stp,
            entries: Vec::new(),
            sum_fu: T::zero(),
            sum_rmtfu: T::zero(),
        }
    }

    fn push(&mut self, entry: RtfEntry<T>) {
        debug_assert!(self.entries.last().is_none_or(|e| e.tx < entry.tx));
        self.sum_fu = self.sum_fu + entry.fuzzy_utility();
        self.sum_rmtfu = self.sum_rmtfu + entry.remaining;
        self.entries.push(entry);
    }

    /// Members in ≺ order.
    pub fn itemset(&self) -> &[FuzzyItem] {
        &self.itemset
    }

    pub fn last(&self) -> FuzzyItem {
        *self
            .itemset
            .last()
            .expect("lists describe non-empty itemsets")
    }

    /// Latest start period among the members.
    pub fn latest_stp(&self) -> PeriodId {
        self.latest_stp
    }

    pub fn entries(&self) -> &[RtfEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum_fu(&self) -> T {
        self.sum_fu
    }

    pub fn sum_rmtfu(&self) -> T {
        self.sum_rmtfu
    }

    /// `sum_fu + sum_rmtfu`.
    pub fn upper_bound(&self) -> T {
        self.sum_fu + self.sum_rmtfu
    }

    /// Whether the cached sums equal a fresh fold over the entries.
    pub fn sums_consistent(&self) -> bool {
        let (fu, rm) = self
            .entries
            .iter()
            .fold((T::zero(), T::zero()), |(fu, rm), e| {
                (fu + e.fuzzy_utility(), rm + e.remaining)
            });
        fu == self.sum_fu && rm == self.sum_rmtfu
    }

    /// Text dump: a header with the itemset and latest start period, then
    /// one `tid u rmtfu R` line per entry with four decimals.
    pub fn dump(&self, db: &TemporalDatabase<T>, mf: &MembershipFunction<T>) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{{{}}} L_STP={}",
            format_itemset(&self.itemset, db, mf),
            self.latest_stp
        );
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{} {:.4} {:.4} {:.4}",
                db.transactions()[e.tx as usize].tid,
                e.utility.as_f64(),
                e.remaining.as_f64(),
                e.region.as_f64()
            );
        }
        out
    }
}

/// Builds one list per fuzzy item occurring in the revised database, in ≺
/// order. The remaining measure of a fuzzy item counts only later crisp
/// items: other regions of the same item can never join it.
pub fn build_initial_lists<T: Scalar>(
    revised: &RevisedDatabase<T>,
    index: &TemporalIndex<T>,
    order: &GlobalOrder<T>,
) -> Vec<RtfList<T>> {
    let mut lists: HashMap<FuzzyItem, RtfList<T>> = HashMap::new();
    for tx in &revised.transactions {
        let mut remaining = T::zero();
        for ip in tx.items.iter().rev() {
            for r in &ip.regions {
                let fi = FuzzyItem::new(ip.item, r.region);
                let list = lists.entry(fi).or_insert_with(|| {
                    RtfList::empty(
                        vec![fi],
                        order.rank(ip.item).expect("revised items are ranked"),
                        index
                            .fuzzy_stp(fi)
                            .expect("occurring fuzzy items have a start period"),
                    )
                });
                list.push(RtfEntry {
                    tx: tx.position,
                    utility: ip.utility,
                    remaining,
                    region: r.degree,
                });
            }
            remaining = remaining + ip.max_fuzzy_utility;
        }
    }
    let mut lists: Vec<RtfList<T>> = lists.into_values().collect();
    lists.sort_by_key(|l| (l.last_rank, l.last().region));
    lists
}

/// Result of [`construct`].
#[derive(Clone, Debug, PartialEq)]
pub enum Joined<T> {
    List(RtfList<T>),
    /// The early-abort budget fell below the threshold; neither the joined
    /// itemset nor any extension of it can reach it.
    Aborted,
}

impl<T> Joined<T> {
    pub fn into_list(self) -> Option<RtfList<T>> {
        match self {
            Joined::List(l) => Some(l),
            Joined::Aborted => None,
        }
    }
}

/// Joins the lists of `Px` and `Py` into the list of `Pxy`.
///
/// `prefix` is the list of `P` (absent at the first level). Utilities are
/// combined as `u(Px) + u(Py) − u(P)`, the region value is the minimum of the
/// two, and `rmtfu` is taken from `Py`. With `abort_below = Some(δ)` the join
/// keeps a budget starting at `Px.sum_fu + Px.sum_rmtfu`, subtracts
/// `fu + rmtfu` of every `Px` entry without a partner in `Py`, and gives up
/// as soon as the budget drops below `δ`.
///
/// Panics if `x` and `y` do not share their prefix, if `y` does not follow
/// `x` under ≺, or if their last members are regions of the same item.
pub fn construct<T: Scalar>(
    prefix: Option<&RtfList<T>>,
    x: &RtfList<T>,
    y: &RtfList<T>,
    abort_below: Option<T>,
) -> Joined<T> {
    let k = x.itemset.len();
    assert_eq!(k, y.itemset.len(), "joined lists must have the same length");
    assert_eq!(
        x.itemset[..k - 1],
        y.itemset[..k - 1],
        "joined lists must share their prefix"
    );
    let (lx, ly) = (x.last(), y.last());
    assert_ne!(
        lx.item, ly.item,
        "regions of one item cannot share an itemset"
    );
    assert!(
        (x.last_rank, lx.region) < (y.last_rank, ly.region),
        "second list must follow the first under the processing order"
    );
    if let Some(p) = prefix {
        debug_assert_eq!(p.itemset[..], x.itemset[..k - 1]);
    }

    let mut itemset = x.itemset.clone();
    itemset.push(ly);
    let mut out = RtfList::empty(itemset, y.last_rank, x.latest_stp.max(y.latest_stp));
    let mut budget = x.upper_bound();
    let prefix_entries = prefix.map(|p| p.entries.as_slice());
    let mut pi = 0;
    let mut yi = 0;
    for ex in &x.entries {
        while yi < y.entries.len() && y.entries[yi].tx < ex.tx {
            yi += 1;
        }
        match y.entries.get(yi) {
            Some(ey) if ey.tx == ex.tx => {
                let utility = match prefix_entries {
                    Some(pe) => {
                        while pe[pi].tx < ex.tx {
                            pi += 1;
                        }
                        debug_assert_eq!(pe[pi].tx, ex.tx, "prefix must contain every tid of Px");
                        ex.utility + ey.utility - pe[pi].utility
                    }
                    None => ex.utility + ey.utility,
                };
                out.push(RtfEntry {
                    tx: ex.tx,
                    utility,
                    remaining: ey.remaining,
                    region: ex.region.min_of(ey.region),
                });
            }
            _ => {
                if let Some(delta) = abort_below {
                    budget = budget - (ex.fuzzy_utility() + ex.remaining);
                    if budget < delta {
                        return Joined::Aborted;
                    }
                }
            }
        }
    }
    debug_assert!(out.sums_consistent());
    Joined::List(out)
}
