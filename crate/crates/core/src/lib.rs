//! Mining high temporal fuzzy utility itemsets.
//!
//! Given a database of quantitative transactions split into time periods, a
//! table of unit profits and a fuzzy membership function over quantities,
//! the miner finds every fuzzy itemset (such as `{D.Middle, A.Low}`) whose
//! fuzzy utility, relative to the total fuzzy utility of the periods since
//! all its members first appeared, reaches a threshold `γ`.
//!
//! All numeric code is generic over [`Scalar`]; the aliases below fix the
//! scalar to `f64` for everyday use or to [`Exact`] rationals.
//!
//! ```
//! use tfum::{mine, running_example, Membership, MinerConfig};
//!
//! let db = running_example::<f64>();
//! let mf = Membership::low_middle_high();
//! let outcome = mine(&db, &mf, &MinerConfig::with_gamma(0.2)).unwrap();
//! assert_eq!(outcome.results.len(), 7);
//! ```

pub mod example;
pub mod membership;
pub mod miner;
pub mod oracle;
pub mod preprocess;
pub mod rtflist;
pub mod scalar;
pub mod tqdb;

pub use example::running_example;
pub use membership::{
    MembershipError, MembershipFunction, RegionConfig, RegionCurve, RegionId, RoundingMode,
};
pub use miner::{
    mine, prune_ratio, tfur, Htfui, Metrics, MinerConfig, MinerError, MiningOutcome, RetentionRule,
};
pub use oracle::{
    enumerate_fuzzy_itemsets, oracle_mine, oracle_ratios, OracleEntry, OracleError, OracleResult,
};
pub use preprocess::{format_itemset, FuzzyItem, GlobalOrder, Preprocessing, TemporalIndex};
pub use rtflist::{construct, Joined, RtfEntry, RtfList};
pub use scalar::Scalar;
pub use tqdb::{
    build_tp_table, DatabaseError, ItemCatalog, ItemId, PeriodId, RawTransaction, TemporalDatabase,
    Tid, TpTable,
};

/// Exact rational scalar.
pub type Exact = num_rational::Ratio<i64>;

pub type Database = TemporalDatabase<f64>;
pub type Membership = MembershipFunction<f64>;
pub type Outcome = MiningOutcome<f64>;
pub type List = RtfList<f64>;

pub type ExactDatabase = TemporalDatabase<Exact>;
pub type ExactMembership = MembershipFunction<Exact>;
pub type ExactOutcome = MiningOutcome<Exact>;
