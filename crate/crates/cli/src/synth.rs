use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfum::{Database, RawTransaction, TemporalDatabase};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("profit range {0}..={1} is empty")]
    EmptyProfitRange(u32, u32),
    #[error("density {density} must lie in [1, {items}]")]
    Density { density: f64, items: u32 },
}

/// Parameters of a seeded synthetic database.
///
/// Items are named `i1..iN`. Each transaction gets a uniform random period,
/// a length drawn uniformly from `1..=2·density−1` (capped at the item count),
/// distinct uniform items, quantities in `1..=max_quantity` and each item a
/// fixed integer profit from `profit_range`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub items: u32,
    pub transactions: u32,
    pub periods: u32,
    pub max_quantity: u32,
    pub profit_range: (u32, u32),
    /// Mean number of items per transaction.
    pub density: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            items: 20,
            transactions: 1000,
            periods: 4,
            max_quantity: 6,
            profit_range: (1, 10),
            density: 5.0,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        for (value, name) in [
            (self.items, "items"),
            (self.transactions, "transactions"),
            (self.periods, "periods"),
            (self.max_quantity, "max quantity"),
            (self.profit_range.0, "minimum profit"),
        ] {
            if value == 0 {
                return Err(GenError::Zero(name));
            }
        }
        let (lo, hi) = self.profit_range;
        if lo > hi {
            return Err(GenError::EmptyProfitRange(lo, hi));
        }
        if !(self.density >= 1.0 && self.density <= f64::from(self.items)) {
            return Err(GenError::Density {
                density: self.density,
                items: self.items,
            });
        }
        Ok(())
    }
}

pub fn generate_synthetic(params: &GenParams) -> Result<Database, GenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let names: Vec<String> = (1..=params.items).map(|i| format!("i{i}")).collect();
    let utilities = names
        .iter()
        .map(|name| {
            let profit = rng.random_range(params.profit_range.0..=params.profit_range.1);
            (name.clone(), f64::from(profit))
        })
        .collect();

    let longest = ((2.0 * params.density).round() as u32)
        .saturating_sub(1)
        .clamp(1, params.items);
    let transactions = (1..=params.transactions)
        .map(|tid| {
            let period = rng.random_range(1..=params.periods);
            let len = rng.random_range(1..=longest) as usize;
            let mut picked = sample(&mut rng, params.items as usize, len).into_vec();
            picked.sort_unstable();
            let entries = picked
                .into_iter()
                .map(|i| (names[i].clone(), rng.random_range(1..=params.max_quantity)))
                .collect();
            RawTransaction {
                tid,
                period,
                entries,
            }
        })
        .collect();
    Ok(
        TemporalDatabase::new(params.periods, utilities, transactions)
            .expect("generated databases are valid"),
    )
}
