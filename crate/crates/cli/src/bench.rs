use std::io::{self, Write};
use std::time::Duration;

use rayon::prelude::*;
use tfum::{mine, Membership, MinerConfig, MinerError, RoundingMode};

use crate::synth::{generate_synthetic, GenError, GenParams};

/// Worker threads for running sweep configurations side by side.
pub const THREADS_ENV: &str = "TFUM_BENCH_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Miner(#[from] MinerError),
    #[error("invalid {THREADS_ENV} value {0:?}")]
    Threads(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug)]
pub struct BenchParams {
    /// Shape of the generated databases; `periods` is overridden by the sweep.
    pub base: GenParams,
    pub gammas: Vec<f64>,
    pub periods: Vec<u32>,
    pub rounding: RoundingMode,
    pub pruning: bool,
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub gamma: f64,
    pub periods: u32,
    pub wall_time: Duration,
    pub visited: u64,
    pub candidates: u64,
    pub prune_ratio: f64,
    pub results: usize,
}

/// Reads the thread count from the environment; unset means one thread.
pub fn threads_from_env() -> Result<usize, BenchError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&n: &usize| n >= 1)
            .ok_or(BenchError::Threads(v)),
    }
}

/// Mines every (γ, periods) pair; rows come back ordered by γ, then periods.
pub fn run_bench(params: &BenchParams, threads: usize) -> Result<Vec<BenchRow>, BenchError> {
    let mf = Membership::low_middle_high();
    let databases = params
        .periods
        .iter()
        .map(|&periods| {
            generate_synthetic(&GenParams {
                periods,
                ..params.base
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(f64, usize)> = params
        .gammas
        .iter()
        .flat_map(|&g| (0..databases.len()).map(move |d| (g, d)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(gamma, d)| {
                let mut config = MinerConfig {
                    rounding: params.rounding,
                    ..MinerConfig::with_gamma(gamma)
                };
                if !params.pruning {
                    config = config.unpruned();
                }
                let outcome = mine(&databases[d], &mf, &config)?;
                let m = outcome.metrics;
                Ok(BenchRow {
                    gamma,
                    periods: params.periods[d],
                    wall_time: m.elapsed,
                    visited: m.visited_nodes,
                    candidates: m.candidates,
                    prune_ratio: m.prune_ratio(),
                    results: outcome.results.len(),
                })
            })
            .collect()
    })
}

pub fn write_table<W: Write>(rows: &[BenchRow], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "{:>8} {:>8} {:>12} {:>12} {:>12} {:>12} {:>8}",
        "gamma", "periods", "time_ms", "visited", "candidates", "prune_ratio", "htfuis"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:>8} {:>8} {:>12.3} {:>12} {:>12} {:>12.4} {:>8}",
            r.gamma,
            r.periods,
            r.wall_time.as_secs_f64() * 1e3,
            r.visited,
            r.candidates,
            r.prune_ratio,
            r.results
        )?;
    }
    Ok(())
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "gamma,periods,timeMs,visited,candidates,pruneRatio,htfuis"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.3},{},{},{:.6},{}",
            r.gamma,
            r.periods,
            r.wall_time.as_secs_f64() * 1e3,
            r.visited,
            r.candidates,
            r.prune_ratio,
            r.results
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_covers_every_pair() {
        let params = BenchParams {
            base: GenParams {
                items: 10,
                transactions: 200,
                density: 4.0,
                seed: 7,
                ..GenParams::default()
            },
            gammas: vec![0.05, 0.2],
            periods: vec![1, 2, 4],
            rounding: RoundingMode::Exact,
            pruning: true,
        };
        let rows = run_bench(&params, 2).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.gamma, r.periods)).collect();
        assert_eq!(
            keys,
            vec![
                (0.05, 1),
                (0.05, 2),
                (0.05, 4),
                (0.2, 1),
                (0.2, 2),
                (0.2, 4)
            ]
        );
        let again = run_bench(&params, 1).unwrap();
        for (a, b) in rows.iter().zip(&again) {
            assert_eq!(
                (a.visited, a.candidates, a.results),
                (b.visited, b.candidates, b.results)
            );
        }
        let mut out = Vec::new();
        write_table(&rows, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 7);
    }
}
