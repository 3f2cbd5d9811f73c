//! Piecewise-linear fuzzy membership functions.
//!
//! A [`MembershipFunction`] is an ordered list of [`RegionCurve`]s (for
//! example `Low`, `Middle`, `High`). Fuzzifying a purchase quantity yields the
//! degree of every region whose curve is positive at that quantity. The
//! region's position in the list is its [`RegionId`], which also serves as the
//! secondary sort key between fuzzy items of the same item.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Index of a region within its membership function.
pub type RegionId = u8;

#[derive(Debug, Error)]
pub enum MembershipError {
    #[error("membership function has no regions")]
    NoRegions,
    #[error("too many regions ({0}); at most 255 are supported")]
    TooManyRegions(usize),
    #[error("region {0:?} has no breakpoints")]
    NoBreakpoints(String),
    #[error("region {label:?}: breakpoint quantities must be non-negative and strictly increasing (breakpoint {index})")]
    BadQuantity { label: String, index: usize },
    #[error("region {label:?}: degree at breakpoint {index} is outside [0, 1]")]
    BadDegree { label: String, index: usize },
    #[error("duplicate region label {0:?}")]
    DuplicateLabel(String),
    #[error("value {0} is not representable in the chosen scalar type")]
    Unrepresentable(f64),
    #[error("invalid membership config: {0}")]
    Json(#[from] serde_json::Error),
}

/// How membership degrees are post-processed right after fuzzification.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RoundingMode {
    /// Degrees are used as computed.
    #[default]
    Exact,
    /// Degrees are rounded to two decimals (2/3 becomes 0.67). Useful to
    /// reproduce hand-computed tables that print rounded degrees.
    TwoDecimals,
}

impl RoundingMode {
    fn apply<T: Scalar>(self, degree: T) -> T {
        match self {
            RoundingMode::Exact => degree,
            RoundingMode::TwoDecimals => degree.round_hundredths(),
        }
    }
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoundingMode::Exact => "exact",
            RoundingMode::TwoDecimals => "2-decimals",
        })
    }
}

impl FromStr for RoundingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(RoundingMode::Exact),
            "2-decimals" => Ok(RoundingMode::TwoDecimals),
            other => Err(format!(
                "unknown rounding mode {other:?} (expected \"exact\" or \"2-decimals\")"
            )),
        }
    }
}

/// One linguistic term: a label and its piecewise-linear curve.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionCurve<T> {
    label: String,
    breakpoints: Vec<(T, T)>,
}

impl<T: Scalar> RegionCurve<T> {
    pub fn new(
        label: impl Into<String>,
        breakpoints: Vec<(T, T)>,
    ) -> Result<Self, MembershipError> {
        let label = label.into();
        if breakpoints.is_empty() {
            return Err(MembershipError::NoBreakpoints(label));
        }
        for (index, &(q, d)) in breakpoints.iter().enumerate() {
            if q < T::zero() || (index > 0 && q <= breakpoints[index - 1].0) {
                return Err(MembershipError::BadQuantity { label, index });
            }
            if d < T::zero() || d > T::one() {
                return Err(MembershipError::BadDegree { label, index });
            }
        }
        Ok(RegionCurve { label, breakpoints })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn breakpoints(&self) -> &[(T, T)] {
        &self.breakpoints
    }

    /// Degree at quantity `q`: linear between breakpoints, held constant
    /// outside the first and last breakpoint.
    pub fn degree(&self, q: T) -> T {
        let first = self.breakpoints[0];
        let last = self.breakpoints[self.breakpoints.len() - 1];
        if q <= first.0 {
            return first.1;
        }
        if q >= last.0 {
            return last.1;
        }
        let right = self.breakpoints.partition_point(|&(bq, _)| bq < q);
        let (q1, d1) = self.breakpoints[right];
        if q1 == q {
            return d1;
        }
        let (q0, d0) = self.breakpoints[right - 1];
        let degree = d0 + (d1 - d0) * (q - q0) / (q1 - q0);
        debug_assert!(degree >= T::zero() && degree <= T::one());
        degree
    }
}

/// Ordered set of region curves shared by all items.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipFunction<T> {
    regions: Vec<RegionCurve<T>>,
}

impl<T: Scalar> MembershipFunction<T> {
    pub fn new(regions: Vec<RegionCurve<T>>) -> Result<Self, MembershipError> {
        if regions.is_empty() {
            return Err(MembershipError::NoRegions);
        }
        if regions.len() > usize::from(RegionId::MAX) {
            return Err(MembershipError::TooManyRegions(regions.len()));
        }
        let mut seen = HashSet::new();
        for region in &regions {
            if !seen.insert(region.label.as_str()) {
                return Err(MembershipError::DuplicateLabel(region.label.clone()));
            }
        }
        Ok(MembershipFunction { regions })
    }

    /// Three triangular terms over quantities:
    /// `Low` (0,0)-(3,1)-(6,0), `Middle` (3,0)-(6,1)-(9,0) and `High`
    /// (6,0)-(9,1), with `High` held at 1 above 9.
    pub fn low_middle_high() -> Self {
        let n = |v: u64| T::from_count(v);
        let curve = |label: &str, points: &[(u64, u64)]| {
            RegionCurve::new(label, points.iter().map(|&(q, d)| (n(q), n(d))).collect())
                .expect("built-in curve is valid")
        };
        MembershipFunction::new(vec![
            curve("Low", &[(0, 0), (3, 1), (6, 0)]),
            curve("Middle", &[(3, 0), (6, 1), (9, 0)]),
            curve("High", &[(6, 0), (9, 1)]),
        ])
        .expect("built-in membership function is valid")
    }

    pub fn regions(&self) -> &[RegionCurve<T>] {
        &self.regions
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn label(&self, region: RegionId) -> &str {
        &self.regions[usize::from(region)].label
    }

    pub fn region_by_label(&self, label: &str) -> Option<RegionId> {
        self.regions
            .iter()
            .position(|r| r.label == label)
            .map(|i| i as RegionId)
    }

    /// Fuzzifies a positive quantity into `(region, degree)` pairs, in region
    /// order, omitting regions whose (rounded) degree is zero.
    pub fn fuzzify(&self, quantity: u32, mode: RoundingMode) -> Vec<(RegionId, T)> {
        debug_assert!(quantity >= 1);
        let q = T::from_count(u64::from(quantity));
        self.regions
            .iter()
            .enumerate()
            .filter_map(|(i, curve)| {
                let degree = mode.apply(curve.degree(q));
                (degree > T::zero()).then_some((i as RegionId, degree))
            })
            .collect()
    }

    /// Parses the JSON config format: a list of
    /// `{"label": ..., "breakpoints": [[q, degree], ...]}` objects.
    pub fn from_json(text: &str) -> Result<Self, MembershipError> {
        let config: Vec<RegionConfig> = serde_json::from_str(text)?;
        Self::from_config(&config)
    }

    pub fn from_config(config: &[RegionConfig]) -> Result<Self, MembershipError> {
        let convert = |v: f64| T::from_f64(v).ok_or(MembershipError::Unrepresentable(v));
        let regions = config
            .iter()
            .map(|region| {
                let points = region
                    .breakpoints
                    .iter()
                    .map(|&[q, d]| Ok((convert(q)?, convert(d)?)))
                    .collect::<Result<Vec<_>, MembershipError>>()?;
                RegionCurve::new(region.label.clone(), points)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(regions)
    }

    pub fn to_config(&self) -> Vec<RegionConfig> {
        self.regions
            .iter()
            .map(|r| RegionConfig {
                label: r.label.clone(),
                breakpoints: r
                    .breakpoints
                    .iter()
                    .map(|&(q, d)| [q.as_f64(), d.as_f64()])
                    .collect(),
            })
            .collect()
    }
}

/// Serialized form of one region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionConfig {
    pub label: String,
    pub breakpoints: Vec<[f64; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;
    use proptest::prelude::*;

    fn labelled<T: Scalar>(
        mf: &MembershipFunction<T>,
        q: u32,
        mode: RoundingMode,
    ) -> Vec<(String, T)> {
        mf.fuzzify(q, mode)
            .into_iter()
            .map(|(r, d)| (mf.label(r).to_string(), d))
            .collect()
    }

    fn r(n: i64, d: i64) -> Exact {
        Exact::new(n, d)
    }

    #[test]
    fn seven_is_two_thirds_middle_one_third_high() {
        let mf = MembershipFunction::<Exact>::low_middle_high();
        assert_eq!(
            labelled(&mf, 7, RoundingMode::Exact),
            vec![
                ("Middle".to_string(), r(2, 3)),
                ("High".to_string(), r(1, 3))
            ]
        );
        let mf = MembershipFunction::<f64>::low_middle_high();
        assert_eq!(
            labelled(&mf, 7, RoundingMode::TwoDecimals),
            vec![("Middle".to_string(), 0.67), ("High".to_string(), 0.33)]
        );
    }

    #[test]
    fn canonical_curve_spot_values() {
        let mf = MembershipFunction::<Exact>::low_middle_high();
        let exact = |q| labelled(&mf, q, RoundingMode::Exact);
        assert_eq!(exact(3), vec![("Low".to_string(), r(1, 1))]);
        assert_eq!(exact(9), vec![("High".to_string(), r(1, 1))]);
        assert_eq!(
            exact(5),
            vec![
                ("Low".to_string(), r(1, 3)),
                ("Middle".to_string(), r(2, 3))
            ]
        );
        assert_eq!(exact(2), vec![("Low".to_string(), r(2, 3))]);
        assert_eq!(exact(6), vec![("Middle".to_string(), r(1, 1))]);
        assert_eq!(exact(1), vec![("Low".to_string(), r(1, 3))]);
        assert_eq!(exact(40), vec![("High".to_string(), r(1, 1))]);
    }

    #[test]
    fn rejects_invalid_curves() {
        assert!(matches!(
            RegionCurve::new("x", vec![(1.0, 0.0), (1.0, 1.0)]),
            Err(MembershipError::BadQuantity { index: 1, .. })
        ));
        assert!(matches!(
            RegionCurve::new("x", vec![(1.0, 1.5)]),
            Err(MembershipError::BadDegree { index: 0, .. })
        ));
        assert!(matches!(
            RegionCurve::<f64>::new("x", vec![]),
            Err(MembershipError::NoBreakpoints(_))
        ));
        let a = RegionCurve::new("a", vec![(0.0, 1.0)]).unwrap();
        assert!(matches!(
            MembershipFunction::new(vec![a.clone(), a]),
            Err(MembershipError::DuplicateLabel(_))
        ));
        assert!(matches!(
            MembershipFunction::<f64>::new(vec![]),
            Err(MembershipError::NoRegions)
        ));
    }

    #[test]
    fn json_config_round_trip() {
        let mf = MembershipFunction::<f64>::low_middle_high();
        let text = serde_json::to_string(&mf.to_config()).unwrap();
        assert_eq!(MembershipFunction::<f64>::from_json(&text).unwrap(), mf);
        let bad = r#"[{"label": "Low", "breakpoints": [[3, 1], [2, 0]]}]"#;
        assert!(matches!(
            MembershipFunction::<f64>::from_json(bad),
            Err(MembershipError::BadQuantity { .. })
        ));
        assert!(matches!(
            MembershipFunction::<f64>::from_json("{"),
            Err(MembershipError::Json(_))
        ));
    }

    #[test]
    fn rounding_can_drop_tiny_degrees() {
        let curve = RegionCurve::new("tail", vec![(0.0, 0.0), (1000.0, 1.0)]).unwrap();
        let mf = MembershipFunction::new(vec![curve]).unwrap();
        assert_eq!(mf.fuzzify(1, RoundingMode::Exact).len(), 1);
        assert!(mf.fuzzify(1, RoundingMode::TwoDecimals).is_empty());
    }

    proptest! {
        #[test]
        fn degrees_are_positive_and_bounded(q in 1u32..200, two_dec in any::<bool>()) {
            let mode = if two_dec { RoundingMode::TwoDecimals } else { RoundingMode::Exact };
            let mf = MembershipFunction::<f64>::low_middle_high();
            let fuzzy = mf.fuzzify(q, mode);
            prop_assert!(!fuzzy.is_empty());
            for (_, d) in fuzzy {
                prop_assert!(d > 0.0 && d <= 1.0);
            }
        }

        #[test]
        fn exact_degrees_partition_unity_from_three(q in 3u32..200) {
            let mf = MembershipFunction::<Exact>::low_middle_high();
            let total = mf.fuzzify(q, RoundingMode::Exact).into_iter().fold(Exact::from_integer(0), |a, (_, d)| a + d);
            prop_assert_eq!(total, Exact::from_integer(1));
        }
    }
}
