//! The single database pass that precedes the search: per-transaction fuzzy
//! profiles, start periods, period suffix sums of `tfu`, item upper-bound
//! ratios, the global item order and the revised database.

use std::cmp::Ordering;

use crate::membership::{MembershipFunction, RegionId, RoundingMode};
use crate::scalar::{sum, Scalar};
use crate::tqdb::{ItemId, PeriodId, QuantTransaction, TemporalDatabase, Tid};

/// An `(item, region)` pair such as `A.Low`.
///
/// The derived order (item id, then region) is only a canonical order for
/// sets; the search order is given by [`GlobalOrder::cmp_fuzzy`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuzzyItem {
    pub item: ItemId,
    pub region: RegionId,
}

impl FuzzyItem {
    pub fn new(item: ItemId, region: RegionId) -> Self {
        FuzzyItem { item, region }
    }
}

/// Renders an itemset as `D.Middle&A.Low`.
pub fn format_itemset<T>(
    itemset: &[FuzzyItem],
    db: &TemporalDatabase<T>,
    mf: &MembershipFunction<T>,
) -> String
where
    T: Scalar,
{
    itemset
        .iter()
        .map(|fi| format!("{}.{}", db.catalog().name(fi.item), mf.label(fi.region)))
        .collect::<Vec<_>>()
        .join("&")
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionUtility<T> {
    pub region: RegionId,
    pub degree: T,
    /// degree × quantity × unit profit
    pub fuzzy_utility: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ItemProfile<T> {
    pub item: ItemId,
    pub quantity: u32,
    /// Crisp utility, quantity × unit profit.
    pub utility: T,
    /// Regions with positive degree, in region order.
    pub regions: Vec<RegionUtility<T>>,
    /// Largest region fuzzy utility (zero when no region is active).
    pub max_fuzzy_utility: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransactionProfile<T> {
    pub tid: Tid,
    pub period: PeriodId,
    pub items: Vec<ItemProfile<T>>,
    /// Sum of every region fuzzy utility in the transaction.
    pub tfu: T,
    /// Sum over items of their maximal region fuzzy utility.
    pub mtfu: T,
}

impl<T> TransactionProfile<T> {
    pub fn item(&self, item: ItemId) -> Option<&ItemProfile<T>> {
        self.items.iter().find(|p| p.item == item)
    }
}

/// Fuzzifies one transaction. Unknown items cannot occur here: the database
/// constructor already rejects items without an external utility.
pub fn profile_transaction<T: Scalar>(
    tx: &QuantTransaction,
    db: &TemporalDatabase<T>,
    mf: &MembershipFunction<T>,
    mode: RoundingMode,
) -> TransactionProfile<T> {
    let items: Vec<ItemProfile<T>> = tx
        .entries
        .iter()
        .map(|&(item, quantity)| {
            let profit = db.utility(item);
            let q = T::from_count(u64::from(quantity));
            let regions: Vec<RegionUtility<T>> = mf
                .fuzzify(quantity, mode)
                .into_iter()
                .map(|(region, degree)| RegionUtility {
                    region,
                    degree,
                    fuzzy_utility: degree * q * profit,
                })
                .collect();
            let max_fuzzy_utility = regions
                .iter()
                .fold(T::zero(), |m, r| m.max_of(r.fuzzy_utility));
            ItemProfile {
                item,
                quantity,
                utility: q * profit,
                regions,
                max_fuzzy_utility,
            }
        })
        .collect();
    let tfu = sum(items
        .iter()
        .flat_map(|i| i.regions.iter().map(|r| r.fuzzy_utility)));
    let mtfu = sum(items.iter().map(|i| i.max_fuzzy_utility));
    TransactionProfile {
        tid: tx.tid,
        period: tx.period,
        items,
        tfu,
        mtfu,
    }
}

/// Profiles of every transaction, in database order.
pub fn profile_database<T: Scalar>(
    db: &TemporalDatabase<T>,
    mf: &MembershipFunction<T>,
    mode: RoundingMode,
) -> Vec<TransactionProfile<T>> {
    db.transactions()
        .iter()
        .map(|tx| profile_transaction(tx, db, mf, mode))
        .collect()
}

/// Start periods and per-period `tfu` totals.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalIndex<T> {
    region_count: usize,
    fuzzy_stp: Vec<Option<PeriodId>>,
    item_stp: Vec<Option<PeriodId>>,
    stp_all: Option<PeriodId>,
    period_tfu: Vec<T>,
    // suffix_tfu[p - 1] = tfu of periods p..=m; one trailing zero.
    suffix_tfu: Vec<T>,
}

impl<T: Scalar> TemporalIndex<T> {
    /// First period in which the fuzzy item has a positive degree.
    pub fn fuzzy_stp(&self, fi: FuzzyItem) -> Option<PeriodId> {
        self.fuzzy_stp
            .get(fi.item.index() * self.region_count + usize::from(fi.region))
            .copied()
            .flatten()
    }

    /// Earliest start period over the item's regions.
    pub fn item_stp(&self, item: ItemId) -> Option<PeriodId> {
        self.item_stp.get(item.index()).copied().flatten()
    }

    /// Latest start period over all fuzzy items.
    pub fn stp_all(&self) -> Option<PeriodId> {
        self.stp_all
    }

    pub fn period_tfu(&self, period: PeriodId) -> T {
        self.period_tfu[period.0 as usize - 1]
    }

    /// Total `tfu` of all transactions in periods `≥ period`.
    pub fn suffix_tfu(&self, period: PeriodId) -> T {
        let i = (period.0.max(1) as usize - 1).min(self.suffix_tfu.len() - 1);
        self.suffix_tfu[i]
    }

    pub fn total_tfu(&self) -> T {
        self.suffix_tfu[0]
    }

    /// `tfu` over the window from the latest start period to the end; the
    /// smallest denominator any ratio can have. Zero for an empty database.
    pub fn ltp_all_tfu(&self) -> T {
        self.stp_all.map_or(T::zero(), |p| self.suffix_tfu(p))
    }
}

pub fn build_temporal_index<T: Scalar>(
    db: &TemporalDatabase<T>,
    profiles: &[TransactionProfile<T>],
    region_count: usize,
) -> TemporalIndex<T> {
    let mut fuzzy_stp = vec![None; db.item_count() * region_count];
    let mut item_stp = vec![None; db.item_count()];
    let mut period_tfu = vec![T::zero(); db.period_count() as usize];
    for profile in profiles {
        period_tfu[profile.period.0 as usize - 1] =
            period_tfu[profile.period.0 as usize - 1] + profile.tfu;
        for ip in &profile.items {
            for r in &ip.regions {
                let slot = &mut fuzzy_stp[ip.item.index() * region_count + usize::from(r.region)];
                if slot.is_none_or(|p| profile.period < p) {
                    *slot = Some(profile.period);
                }
            }
            if !ip.regions.is_empty() {
                let slot = &mut item_stp[ip.item.index()];
                if slot.is_none_or(|p| profile.period < p) {
                    *slot = Some(profile.period);
                }
            }
        }
    }
    let stp_all = fuzzy_stp.iter().flatten().copied().max();
    let mut suffix_tfu = vec![T::zero(); period_tfu.len() + 1];
    for i in (0..period_tfu.len()).rev() {
        suffix_tfu[i] = suffix_tfu[i + 1] + period_tfu[i];
    }
    TemporalIndex {
        region_count,
        fuzzy_stp,
        item_stp,
        stp_all,
        period_tfu,
        suffix_tfu,
    }
}

/// Item-level upper-bound ratio: the `mtfu` of every transaction in which
/// the item has an active region, over the `tfu` of the latest-start window.
pub fn item_upper_bound_ratio<T: Scalar>(
    item: ItemId,
    profiles: &[TransactionProfile<T>],
    index: &TemporalIndex<T>,
) -> T {
    let Some(stp) = index.item_stp(item) else {
        return T::zero();
    };
    let numerator = sum(profiles
        .iter()
        .filter(|p| p.period >= stp)
        .filter(|p| p.item(item).is_some_and(|ip| !ip.regions.is_empty()))
        .map(|p| p.mtfu));
    ratio(numerator, index.ltp_all_tfu())
}

/// All item ratios in one pass; `None` for items with no active region.
pub fn item_upper_bound_ratios<T: Scalar>(
    item_count: usize,
    profiles: &[TransactionProfile<T>],
    index: &TemporalIndex<T>,
) -> Vec<Option<T>> {
    let mut numerators: Vec<Option<T>> = vec![None; item_count];
    for profile in profiles {
        for ip in profile.items.iter().filter(|ip| !ip.regions.is_empty()) {
            let slot = &mut numerators[ip.item.index()];
            *slot = Some(slot.unwrap_or_else(T::zero) + profile.mtfu);
        }
    }
    let denominator = index.ltp_all_tfu();
    numerators
        .into_iter()
        .map(|n| n.map(|n| ratio(n, denominator)))
        .collect()
}

fn ratio<T: Scalar>(numerator: T, denominator: T) -> T {
    if denominator > T::zero() {
        numerator / denominator
    } else {
        T::zero()
    }
}

/// The processing order ≺: descending item upper-bound ratio, ties broken by
/// ascending item id.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalOrder<T> {
    sequence: Vec<ItemId>,
    rank: Vec<Option<u32>>,
    ratio: Vec<Option<T>>,
}

pub fn compute_global_order<T: Scalar>(ratios: &[Option<T>]) -> GlobalOrder<T> {
    let mut sequence: Vec<ItemId> = ratios
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_some())
        .map(|(i, _)| ItemId(i as u32))
        .collect();
    sequence.sort_by(|a, b| {
        let (ra, rb) = (ratios[a.index()].unwrap(), ratios[b.index()].unwrap());
        rb.partial_cmp(&ra)
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(b))
    });
    let mut rank = vec![None; ratios.len()];
    for (r, item) in sequence.iter().enumerate() {
        rank[item.index()] = Some(r as u32);
    }
    GlobalOrder {
        sequence,
        rank,
        ratio: ratios.to_vec(),
    }
}

impl<T: Scalar> GlobalOrder<T> {
    /// Items in ≺ order.
    pub fn sequence(&self) -> &[ItemId] {
        &self.sequence
    }

    pub fn rank(&self, item: ItemId) -> Option<u32> {
        self.rank.get(item.index()).copied().flatten()
    }

    pub fn ratio(&self, item: ItemId) -> Option<T> {
        self.ratio.get(item.index()).copied().flatten()
    }

    /// Position of a fuzzy item under ≺ (item rank, then region). Items
    /// outside the order sort last.
    pub fn key(&self, fi: FuzzyItem) -> (u32, RegionId) {
        (self.rank(fi.item).unwrap_or(u32::MAX), fi.region)
    }

    pub fn cmp_fuzzy(&self, a: FuzzyItem, b: FuzzyItem) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }

    /// Lexicographic comparison of two ≺-sorted itemsets, shorter first.
    pub fn cmp_itemsets(&self, a: &[FuzzyItem], b: &[FuzzyItem]) -> Ordering {
        a.len().cmp(&b.len()).then_with(|| {
            a.iter()
                .map(|&f| self.key(f))
                .cmp(b.iter().map(|&f| self.key(f)))
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RevisedTransaction<T> {
    /// Index of the transaction in database order; list entries refer to
    /// transactions by this position.
    pub position: u32,
    pub tid: Tid,
    pub period: PeriodId,
    /// Surviving items with at least one active region, sorted by ≺.
    pub items: Vec<ItemProfile<T>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RevisedDatabase<T> {
    pub transactions: Vec<RevisedTransaction<T>>,
}

/// Drops items whose upper-bound ratio is below `gamma`, sorts the rest by ≺
/// and drops transactions left empty.
pub fn revise_database<T: Scalar>(
    profiles: &[TransactionProfile<T>],
    order: &GlobalOrder<T>,
    gamma: T,
) -> RevisedDatabase<T> {
    let transactions = profiles
        .iter()
        .enumerate()
        .filter_map(|(position, profile)| {
            let mut items: Vec<ItemProfile<T>> = profile
                .items
                .iter()
                .filter(|ip| !ip.regions.is_empty())
                .filter(|ip| order.ratio(ip.item).is_some_and(|r| r >= gamma))
                .cloned()
                .collect();
            if items.is_empty() {
                return None;
            }
            items.sort_by_key(|ip| order.rank(ip.item));
            Some(RevisedTransaction {
                position: position as u32,
                tid: profile.tid,
                period: profile.period,
                items,
            })
        })
        .collect();
    RevisedDatabase { transactions }
}

/// Everything computed before revision.
#[derive(Clone, Debug)]
pub struct Preprocessing<T> {
    pub profiles: Vec<TransactionProfile<T>>,
    pub index: TemporalIndex<T>,
    pub order: GlobalOrder<T>,
}

pub fn preprocess<T: Scalar>(
    db: &TemporalDatabase<T>,
    mf: &MembershipFunction<T>,
    mode: RoundingMode,
) -> Preprocessing<T> {
    let profiles = profile_database(db, mf, mode);
    let index = build_temporal_index(db, &profiles, mf.region_count());
    let ratios = item_upper_bound_ratios(db.item_count(), &profiles, &index);
    let order = compute_global_order(&ratios);
    Preprocessing {
        profiles,
        index,
        order,
    }
}
