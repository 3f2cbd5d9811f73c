//! Depth-first search over fuzzy itemsets using revised fuzzy-lists.
//!
//! The pipeline: profile and index the database, rank items by their
//! upper-bound ratio, drop items whose ratio is below `γ`, build one list per
//! fuzzy item and extend lists in ≺ order. Three prunes apply:
//!
//! * item filter: an item whose upper-bound ratio is below `γ` never joins
//!   an itemset;
//! * remaining-measure prune (S2): a list is extended only if
//!   `sum_fu + sum_rmtfu ≥ δ`;
//! * join abort (S3): a join stops as soon as the unmatched entries of the
//!   left list have eaten enough of its bound to fall below `δ`.
//!
//! `δ = γ × tfu(LTP_all)` is the fuzzy utility an itemset needs under the
//! smallest possible denominator, so none of the prunes can lose a result.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::membership::{MembershipFunction, RoundingMode};
use crate::preprocess::{
    preprocess, revise_database, FuzzyItem, GlobalOrder, Preprocessing, TemporalIndex,
};
use crate::rtflist::{build_initial_lists, construct, Joined, RtfList};
use crate::scalar::Scalar;
use crate::tqdb::TemporalDatabase;

#[derive(Debug, Error, PartialEq)]
pub enum MinerError {
    #[error("gamma must be a fraction in [0, 1], got {0}")]
    InvalidGamma(f64),
}

/// Which joined lists stay available as join partners for their siblings.
///
/// A joined list `XY` bounds its own extensions, but it is also the partner
/// that produces `XZY` for a sibling `XZ` with `Z ≺ Y`, and `Z` is not among
/// the remaining items of `XY`. Only [`RetentionRule::NonEmpty`] is complete;
/// the other rules exist for experiments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RetentionRule {
    /// Keep every non-empty `XY`.
    #[default]
    NonEmpty,
    /// Keep `XY` only when `sum_fu + sum_rmtfu ≥ δ`.
    UpperBound,
    /// Keep `XY` only when `sum_rmtfu > δ`.
    RemainingOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinerConfig {
    pub gamma: f64,
    /// Remaining-measure prune on extension (S2).
    pub remaining_prune: bool,
    /// Early abort inside joins (S3).
    pub join_abort: bool,
    pub retention: RetentionRule,
    pub rounding: RoundingMode,
    /// Explore first-level subtrees on the rayon pool.
    pub parallel: bool,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            gamma: 0.2,
            remaining_prune: true,
            join_abort: true,
            retention: RetentionRule::NonEmpty,
            rounding: RoundingMode::Exact,
            parallel: false,
        }
    }
}

impl MinerConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        MinerConfig {
            gamma,
            ..Self::default()
        }
    }

    /// Same configuration with S2 and S3 switched off.
    pub fn unpruned(self) -> Self {
        MinerConfig {
            remaining_prune: false,
            join_abort: false,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), MinerError> {
        if (0.0..=1.0).contains(&self.gamma) {
            Ok(())
        } else {
            Err(MinerError::InvalidGamma(self.gamma))
        }
    }
}

/// Search counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Metrics {
    /// Search-tree nodes reached: every first-level list plus every
    /// attempted join.
    pub visited_nodes: u64,
    /// Non-empty nodes that passed the remaining-measure test (every
    /// non-empty node when S2 is off).
    pub candidates: u64,
    /// Joins that ran to completion.
    pub constructed_lists: u64,
    pub aborts_by_s3: u64,
    /// Nodes rejected by the remaining-measure test.
    pub pruned_by_s2: u64,
    pub elapsed: Duration,
}

impl Metrics {
    fn absorb(&mut self, other: &Metrics) {
        self.visited_nodes += other.visited_nodes;
        self.candidates += other.candidates;
        self.constructed_lists += other.constructed_lists;
        self.aborts_by_s3 += other.aborts_by_s3;
        self.pruned_by_s2 += other.pruned_by_s2;
    }

    pub fn prune_ratio(&self) -> f64 {
        prune_ratio(self)
    }
}

/// `(visited − candidates) / visited`, or zero when nothing was visited.
pub fn prune_ratio(metrics: &Metrics) -> f64 {
    if metrics.visited_nodes == 0 {
        0.0
    } else {
        (metrics.visited_nodes - metrics.candidates) as f64 / metrics.visited_nodes as f64
    }
}

/// One high temporal fuzzy utility itemset.
#[derive(Clone, Debug, PartialEq)]
pub struct Htfui<T> {
    /// Members in ≺ order.
    pub itemset: Vec<FuzzyItem>,
    pub tfur: T,
    pub sum_fu: T,
}

#[derive(Clone, Debug)]
pub struct MiningOutcome<T> {
    /// Sorted by length, then ≺-lexicographically.
    pub results: Vec<Htfui<T>>,
    pub metrics: Metrics,
    /// `γ × tfu(LTP_all)`.
    pub delta: T,
    pub preprocessing: Preprocessing<T>,
}

impl<T: Scalar> MiningOutcome<T> {
    pub fn order(&self) -> &GlobalOrder<T> {
        &self.preprocessing.order
    }
}

/// Temporal fuzzy utility ratio of a list: its fuzzy utility over the `tfu`
/// of all periods from its latest start period on.
pub fn tfur<T: Scalar>(list: &RtfList<T>, index: &TemporalIndex<T>) -> T {
    let denominator = index.suffix_tfu(list.latest_stp());
    debug_assert!(list.is_empty() || denominator > T::zero());
    if denominator > T::zero() {
        list.sum_fu() / denominator
    } else {
        T::zero()
    }
}

/// Mines every fuzzy itemset whose ratio is at least `config.gamma`.
pub fn mine<T: Scalar>(
    db: &TemporalDatabase<T>,
    mf: &MembershipFunction<T>,
    config: &MinerConfig,
) -> Result<MiningOutcome<T>, MinerError> {
    config.validate()?;
    let start = Instant::now();
    let gamma = T::from_f64(config.gamma).ok_or(MinerError::InvalidGamma(config.gamma))?;
    let pre = preprocess(db, mf, config.rounding);
    let ltp_all_tfu = pre.index.ltp_all_tfu();
    let delta = gamma * ltp_all_tfu;
    let mut metrics = Metrics::default();
    if ltp_all_tfu <= T::zero() {
        metrics.elapsed = start.elapsed();
        return Ok(MiningOutcome {
            results: Vec::new(),
            metrics,
            delta,
            preprocessing: pre,
        });
    }

    let cut = T::threshold_cut(gamma);
    let revised = revise_database(&pre.profiles, &pre.order, cut);
    let lists = build_initial_lists(&revised, &pre.index, &pre.order);
    let search = Search {
        index: &pre.index,
        config,
        gamma: cut,
        delta: cut * ltp_all_tfu,
    };
    metrics.visited_nodes += lists.len() as u64;
    for list in &lists {
        if search.extendable(list) {
            metrics.candidates += 1;
        } else {
            metrics.pruned_by_s2 += 1;
        }
    }

    let mut results = Vec::new();
    if config.parallel {
        let parts: Vec<(Vec<Htfui<T>>, Metrics)> = (0..lists.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = Accumulator::default();
                search.visit(None, &lists, i, &mut acc);
                (acc.results, acc.metrics)
            })
            .collect();
        for (part, m) in parts {
            results.extend(part);
            metrics.absorb(&m);
        }
    } else {
        let mut acc = Accumulator::default();
        search.step(None, &lists, &mut acc);
        results = acc.results;
        metrics.absorb(&acc.metrics);
    }

    results.sort_by(|a, b| pre.order.cmp_itemsets(&a.itemset, &b.itemset));
    metrics.elapsed = start.elapsed();
    Ok(MiningOutcome {
        results,
        metrics,
        delta,
        preprocessing: pre,
    })
}

struct Search<'a, T> {
    index: &'a TemporalIndex<T>,
    config: &'a MinerConfig,
    gamma: T,
    delta: T,
}

struct Accumulator<T> {
    results: Vec<Htfui<T>>,
    metrics: Metrics,
}

impl<T> Default for Accumulator<T> {
    fn default() -> Self {
        Accumulator {
            results: Vec::new(),
            metrics: Metrics::default(),
        }
    }
}

impl<T: Scalar> Search<'_, T> {
    fn extendable(&self, list: &RtfList<T>) -> bool {
        !self.config.remaining_prune || list.upper_bound() >= self.delta
    }

    fn retained(&self, list: &RtfList<T>) -> bool {
        if !self.config.remaining_prune {
            return true;
        }
        match self.config.retention {
            RetentionRule::NonEmpty => true,
            RetentionRule::UpperBound => list.upper_bound() >= self.delta,
            RetentionRule::RemainingOnly => list.sum_rmtfu() > self.delta,
        }
    }

    fn step(&self, prefix: Option<&RtfList<T>>, lists: &[RtfList<T>], acc: &mut Accumulator<T>) {
        for i in 0..lists.len() {
            self.visit(prefix, lists, i, acc);
        }
    }

    /// Emits `lists[i]` if it qualifies and explores its extensions.
    fn visit(
        &self,
        prefix: Option<&RtfList<T>>,
        lists: &[RtfList<T>],
        i: usize,
        acc: &mut Accumulator<T>,
    ) {
        let x = &lists[i];
        let ratio = tfur(x, self.index);
        if ratio >= self.gamma {
            acc.results.push(Htfui {
                itemset: x.itemset().to_vec(),
                tfur: ratio,
                sum_fu: x.sum_fu(),
            });
        }
        if !self.extendable(x) {
            return;
        }
        let abort_below = self.config.join_abort.then_some(self.delta);
        let mut extensions = Vec::new();
        for y in &lists[i + 1..] {
            if y.last().item == x.last().item {
                continue;
            }
            acc.metrics.visited_nodes += 1;
            match construct(prefix, x, y, abort_below) {
                Joined::Aborted => acc.metrics.aborts_by_s3 += 1,
                Joined::List(xy) => {
                    acc.metrics.constructed_lists += 1;
                    if xy.is_empty() {
                        continue;
                    }
                    if self.extendable(&xy) {
                        acc.metrics.candidates += 1;
                    } else {
                        acc.metrics.pruned_by_s2 += 1;
                    }
                    if self.retained(&xy) {
                        extensions.push(xy);
                    }
                }
            }
        }
        if !extensions.is_empty() {
            self.step(Some(x), &extensions, acc);
        }
    }
}
