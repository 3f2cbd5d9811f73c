//! Command-line front end for `tfum`.
//!
//! Exit codes: 0 success or agreement, 1 usage error, 2 malformed input,
//! 3 miner/oracle disagreement.

pub mod bench;
pub mod dataset;
pub mod report;
pub mod synth;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use tfum::preprocess::preprocess;
use tfum::{mine, oracle_mine, Database, Membership, MinerConfig, RetentionRule, RoundingMode};

use crate::bench::{run_bench, threads_from_env, BenchParams};
use crate::dataset::{load_database, load_membership, write_dataset, write_profits, InputError};
use crate::report::{compare, miner_rows, oracle_rows, write_csv, MineReport, ResultRow};
use crate::synth::{generate_synthetic, GenParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tfum",
    version,
    about = "Mine high temporal fuzzy utility itemsets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine a database and write the results as CSV.
    Mine(MineArgs),
    /// Brute-force reference results for small databases.
    Oracle(OracleArgs),
    /// Compare the miner against the oracle.
    Diff(DiffArgs),
    /// Generate a seeded synthetic database.
    Gen(GenArgs),
    /// Sweep thresholds and period counts over synthetic databases.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Dataset file (`periods: m` header, then `<period> | <item>:<qty> ...`).
    #[arg(long)]
    data: PathBuf,
    /// Profit file (`<item> <profit>` per line).
    #[arg(long)]
    profits: PathBuf,
    /// Membership function JSON; defaults to Low/Middle/High over 0..9.
    #[arg(long)]
    membership: Option<PathBuf>,
    /// Threshold as a fraction, e.g. 0.2.
    #[arg(long, default_value_t = 0.2)]
    gamma: f64,
    #[arg(long, default_value = "exact", value_parser = parse_rounding)]
    rounding: RoundingMode,
}

#[derive(Debug, Args)]
struct StrategyArgs {
    /// Disable the remaining-measure prune.
    #[arg(long)]
    no_s2: bool,
    /// Disable early abort inside joins.
    #[arg(long)]
    no_s3: bool,
    /// Which joined lists stay available as join partners.
    #[arg(long, value_enum, default_value_t = Retention::NonEmpty)]
    retention: Retention,
    /// Explore first-level subtrees in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Retention {
    NonEmpty,
    UpperBound,
    RemainingOnly,
}

#[derive(Debug, Args)]
struct MineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    strategy: StrategyArgs,
    /// Results CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Results and metrics as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiffArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Debug, Args)]
struct ShapeArgs {
    #[arg(long, default_value_t = 20)]
    items: u32,
    #[arg(long, default_value_t = 1000)]
    transactions: u32,
    #[arg(long, default_value_t = 6)]
    max_quantity: u32,
    #[arg(long, default_value_t = 1)]
    min_profit: u32,
    #[arg(long, default_value_t = 10)]
    max_profit: u32,
    /// Mean number of items per transaction.
    #[arg(long, default_value_t = 5.0)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ShapeArgs {
    fn params(&self, periods: u32) -> GenParams {
        GenParams {
            items: self.items,
            transactions: self.transactions,
            periods,
            max_quantity: self.max_quantity,
            profit_range: (self.min_profit, self.max_profit),
            density: self.density,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 4)]
    periods: u32,
    #[arg(long)]
    out_data: PathBuf,
    #[arg(long)]
    out_profits: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2])]
    gammas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4])]
    periods: Vec<u32>,
    #[arg(long, default_value = "exact", value_parser = parse_rounding)]
    rounding: RoundingMode,
    /// Run with S2 and S3 disabled.
    #[arg(long)]
    no_pruning: bool,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_rounding(s: &str) -> Result<RoundingMode, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    Parse(String),
    Mismatch,
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Io { .. } => Failure::Usage(e.to_string()),
            InputError::Parse(p) => Failure::Parse(p.to_string()),
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

/// Runs one invocation and returns its exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    let outcome = match cli.command {
        Command::Mine(a) => run_mine(a, stdout, stderr),
        Command::Oracle(a) => run_oracle(a, stdout),
        Command::Diff(a) => run_diff(a, stdout, stderr),
        Command::Gen(a) => run_gen(a),
        Command::Bench(a) => run_bench_cmd(a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Parse(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_PARSE
        }
        Err(Failure::Mismatch) => EXIT_MISMATCH,
    }
}

fn load(input: &InputArgs) -> Result<(Database, Membership), Failure> {
    let mf = match &input.membership {
        Some(path) => load_membership(path)?,
        None => Membership::low_middle_high(),
    };
    Ok((load_database(&input.data, &input.profits)?, mf))
}

fn config(input: &InputArgs, strategy: &StrategyArgs) -> Result<MinerConfig, Failure> {
    let config = MinerConfig {
        gamma: input.gamma,
        remaining_prune: !strategy.no_s2,
        join_abort: !strategy.no_s3,
        retention: match strategy.retention {
            Retention::NonEmpty => RetentionRule::NonEmpty,
            Retention::UpperBound => RetentionRule::UpperBound,
            Retention::RemainingOnly => RetentionRule::RemainingOnly,
        },
        rounding: input.rounding,
        parallel: strategy.parallel,
    };
    config.validate().map_err(usage)?;
    Ok(config)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit_csv(
    rows: &[ResultRow],
    path: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let written = match path {
        Some(path) => {
            let mut file = create(path)?;
            write_csv(rows, &mut file).and_then(|()| file.flush())
        }
        None => write_csv(rows, stdout),
    };
    written.map_err(usage)
}

fn mined_rows(
    input: &InputArgs,
    strategy: &StrategyArgs,
) -> Result<(Vec<ResultRow>, MineReport), Failure> {
    let (db, mf) = load(input)?;
    let config = config(input, strategy)?;
    let outcome = mine(&db, &mf, &config).map_err(usage)?;
    let rows = miner_rows(&outcome, &db, &mf);
    let report = MineReport::new(&outcome, &config, &db, rows.clone());
    Ok((rows, report))
}

fn run_mine(args: MineArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let (rows, report) = mined_rows(&args.input, &args.strategy)?;
    emit_csv(&rows, args.out.as_deref(), stdout)?;
    if let Some(path) = &args.json {
        let mut file = create(path)?;
        serde_json::to_writer_pretty(&mut file, &report).map_err(usage)?;
        writeln!(file).and_then(|()| file.flush()).map_err(usage)?;
    }
    let m = &report.metrics;
    let _ = writeln!(
        stderr,
        "{} itemsets; visited {}, candidates {}, prune ratio {:.4}",
        rows.len(),
        m.visited_nodes,
        m.candidates,
        m.prune_ratio
    );
    Ok(())
}

fn reference_rows(input: &InputArgs) -> Result<Vec<ResultRow>, Failure> {
    let (db, mf) = load(input)?;
    MinerConfig::with_gamma(input.gamma)
        .validate()
        .map_err(usage)?;
    let result = oracle_mine(&db, &mf, input.rounding, input.gamma).map_err(usage)?;
    let order = preprocess(&db, &mf, input.rounding).order;
    Ok(oracle_rows(&result, &order, &db, &mf))
}

fn run_oracle(args: OracleArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let rows = reference_rows(&args.input)?;
    emit_csv(&rows, args.out.as_deref(), stdout)
}

fn run_diff(args: DiffArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let (mined, _) = mined_rows(&args.input, &args.strategy)?;
    let reference = reference_rows(&args.input)?;
    let mismatches = compare(&mined, &reference, args.tolerance);
    if mismatches.is_empty() {
        let _ = writeln!(stdout, "agree: {} itemsets", mined.len());
        return Ok(());
    }
    for m in &mismatches {
        let _ = writeln!(stderr, "{m}");
    }
    let _ = writeln!(stderr, "{} disagreements", mismatches.len());
    Err(Failure::Mismatch)
}

fn run_gen(args: GenArgs) -> Result<(), Failure> {
    let db = generate_synthetic(&args.shape.params(args.periods)).map_err(usage)?;
    let mut data = create(&args.out_data)?;
    write_dataset(&db, &mut data)
        .and_then(|()| data.flush())
        .map_err(usage)?;
    let mut profits = create(&args.out_profits)?;
    write_profits(&db, &mut profits)
        .and_then(|()| profits.flush())
        .map_err(usage)
}

fn run_bench_cmd(args: BenchArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    if args.gammas.iter().any(|g| !(0.0..=1.0).contains(g)) {
        return Err(usage("every gamma must be a fraction in [0, 1]"));
    }
    let params = BenchParams {
        base: args.shape.params(1),
        gammas: args.gammas,
        periods: args.periods,
        rounding: args.rounding,
        pruning: !args.no_pruning,
    };
    let threads = threads_from_env().map_err(usage)?;
    let rows = run_bench(&params, threads).map_err(usage)?;
    bench::write_table(&rows, &mut *stdout).map_err(usage)?;
    if let Some(path) = &args.csv {
        let mut file = create(path)?;
        bench::write_csv(&rows, &mut file)
            .and_then(|()| file.flush())
            .map_err(usage)?;
    }
    Ok(())
}
