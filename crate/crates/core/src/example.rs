//! The six-item, ten-transaction, five-period worked example used throughout
//! the tests and shipped as `data/running-example`.

use crate::scalar::Scalar;
use crate::tqdb::{RawTransaction, TemporalDatabase};

const PROFITS: [(&str, u64); 6] = [("A", 9), ("B", 5), ("C", 4), ("D", 2), ("E", 1), ("F", 7)];

// (period, tid, quantities of A..F)
const ROWS: [(u32, u32, [u32; 6]); 10] = [
    (1, 1, [1, 0, 3, 0, 1, 2]),
    (1, 2, [0, 4, 0, 3, 0, 1]),
    (2, 3, [0, 2, 0, 1, 2, 0]),
    (2, 4, [2, 0, 6, 1, 3, 0]),
    (3, 5, [0, 1, 6, 3, 0, 3]),
    (3, 6, [0, 3, 0, 0, 1, 7]),
    (4, 7, [2, 4, 1, 5, 8, 1]),
    (4, 8, [1, 6, 2, 0, 1, 0]),
    (5, 9, [7, 0, 0, 3, 0, 0]),
    (5, 10, [3, 1, 0, 6, 1, 9]),
];

pub fn running_example<T: Scalar>() -> TemporalDatabase<T> {
    let utilities = PROFITS
        .iter()
        .map(|&(n, p)| (n.to_string(), T::from_count(p)))
        .collect();
    let transactions = ROWS
        .iter()
        .map(|&(period, tid, quantities)| RawTransaction {
            tid,
            period,
            entries: PROFITS
                .iter()
                .zip(quantities)
                .filter(|(_, q)| *q > 0)
                .map(|((n, _), q)| (n.to_string(), q))
                .collect(),
        })
        .collect();
    TemporalDatabase::new(5, utilities, transactions).expect("running example is valid")
}
