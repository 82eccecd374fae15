//! Command-line configuration and result rendering for the `pcmc` binary.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};

use crate::consistency::TriadAggregation;
use crate::generator::GENERATOR_NAME;
use crate::montecarlo::{
    CellAggregate, ExperimentConfig, DEFAULT_DEVIATIONS, DEFAULT_ORDERS, DEFAULT_SCALE_MAX,
    DEFAULT_TRIALS,
};
use crate::{MAX_ORDER, MIN_ORDER};

/// Fixed CSV header; columns never move.
pub const CSV_HEADER: &str = "order,D,trials,cf_triad,cf_lambda,dist_gm_euclid,dist_ev_euclid,diff_euclid,wins_gm_euclid_pct,dist_gm_cheb,dist_ev_cheb,diff_cheb,wins_ev_cheb_pct,rank_reversal_pct,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TriadAggArg {
    Max,
    Mean,
}

impl From<TriadAggArg> for TriadAggregation {
    fn from(a: TriadAggArg) -> Self {
        match a {
            TriadAggArg::Max => TriadAggregation::Max,
            TriadAggArg::Mean => TriadAggregation::Mean,
        }
    }
}

/// Monte Carlo comparison of the geometric-means and eigenvector solutions
/// of pairwise comparison matrices.
///
/// The eigenvalue consistency factor is reported as (lambda_max - n)/(n - 1),
/// without division by a random-matrix index; divide by published values
/// externally if needed.
#[derive(Debug, Parser)]
#[command(name = "pcmc", version)]
struct Args {
    /// Matrix orders, comma separated (3..=7).
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ORDERS)]
    orders: Vec<usize>,

    /// Deviations D, comma separated, each in [0, 1).
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DEVIATIONS)]
    deviations: Vec<f64>,

    /// Trials per (order, deviation) cell.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,

    /// Master seed; generated and reported when omitted.
    #[arg(long)]
    seed: Option<u64>,

    /// Base weights are log-uniform on [1/M, M].
    #[arg(long = "scale-max", default_value_t = DEFAULT_SCALE_MAX)]
    scale_max: f64,

    /// Worker threads [default: available parallelism].
    #[arg(long, env = "PCMC_WORKERS")]
    workers: Option<usize>,

    /// Aggregation of per-triad indices into the triad factor.
    #[arg(long = "triad-agg", value_enum, default_value_t = TriadAggArg::Max)]
    triad_agg: TriadAggArg,

    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Output file, or `stdout`.
    #[arg(long, default_value = "stdout")]
    output: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

/// Everything needed to run and report one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArgs {
    pub config: ExperimentConfig,
    pub format: OutputFormat,
    pub output: Destination,
    /// The seed was not given and had to be generated.
    pub seed_generated: bool,
}

fn usage_error(msg: String) -> clap::Error {
    Args::command().error(ErrorKind::ValueValidation, msg)
}

/// Parses and validates a full argument vector (including the program name).
pub fn parse_args<I, S>(argv: I) -> Result<RunArgs, clap::Error>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    if let Some(n) = args
        .orders
        .iter()
        .find(|n| !(MIN_ORDER..=MAX_ORDER).contains(*n))
    {
        return Err(usage_error(format!(
            "order {n} outside {MIN_ORDER}..={MAX_ORDER}"
        )));
    }
    if let Some(d) = args.deviations.iter().find(|d| !(0.0..1.0).contains(*d)) {
        return Err(usage_error(format!("deviation {d} outside [0, 1)")));
    }
    if args.trials == 0 {
        return Err(usage_error("--trials must be at least 1".into()));
    }
    if !(args.scale_max.is_finite() && args.scale_max > 1.0) {
        return Err(usage_error(format!(
            "--scale-max must be > 1, got {}",
            args.scale_max
        )));
    }
    if args.workers == Some(0) {
        return Err(usage_error("--workers must be at least 1".into()));
    }
    let (master_seed, seed_generated) = match args.seed {
        Some(s) => (s, false),
        None => (rand::random(), true),
    };
    let worker_count = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let output = match args.output.as_str() {
        "stdout" | "-" => Destination::Stdout,
        path => Destination::File(PathBuf::from(path)),
    };
    Ok(RunArgs {
        config: ExperimentConfig {
            orders: args.orders,
            deviations: args.deviations,
            trials_per_cell: args.trials,
            master_seed,
            scale_max: args.scale_max,
            worker_count,
            triad_agg: args.triad_agg.into(),
        },
        format: args.format,
        output,
        seed_generated,
    })
}

/// Provenance line describing how a result set was produced.
pub fn run_metadata(config: &ExperimentConfig) -> String {
    format!(
        "pcmc {} seed={} trials={} scale_max={} triad_agg={} rng={}",
        env!("CARGO_PKG_VERSION"),
        config.master_seed,
        config.trials_per_cell,
        config.scale_max,
        config.triad_agg,
        GENERATOR_NAME
    )
}

/// CSV with [`CSV_HEADER`]; reals use the shortest round-trip representation.
pub fn render_csv(results: &[CellAggregate], seed: u64) -> String {
    let mut out = String::with_capacity(64 + results.len() * 256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.order,
            c.deviation,
            c.trials,
            c.mean_cf_triad,
            c.mean_cf_lambda,
            c.mean_dist_gm_euclid,
            c.mean_dist_ev_euclid,
            c.diff_euclid,
            c.wins_gm_euclid_pct,
            c.mean_dist_gm_cheb,
            c.mean_dist_ev_cheb,
            c.diff_cheb,
            c.wins_ev_cheb_pct,
            c.rank_reversal_pct,
            seed
        );
    }
    out
}

/// Aligned table in the layout of the classic GM/EV comparison: the `dist`
/// columns show the winning method's mean (GM for Euclidean, EV for
/// Chebyshev), `wins` are GM-over-EV and EV-over-GM respectively.
pub fn render_table(results: &[CellAggregate], config: &ExperimentConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", run_metadata(config));
    let _ = writeln!(
        out,
        "{:>3} {:>5} | {:>6} {:>6} | {:>7} {:>8} {:>6} | {:>7} {:>8} {:>6} | {:>6}",
        "", "", "cf", "", "Euclid", "", "", "Tcheb", "", "", ""
    );
    let _ = writeln!(
        out,
        "{:>3} {:>5} | {:>6} {:>6} | {:>7} {:>8} {:>6} | {:>7} {:>8} {:>6} | {:>6}",
        "Ord", "D", "triad", "lambda", "dist", "diff", "wins1", "dist", "diff", "wins2", "rr"
    );
    let rule = "-".repeat(88);
    let mut last_order = None;
    for c in results {
        if last_order != Some(c.order) {
            let _ = writeln!(out, "{rule}");
            last_order = Some(c.order);
        }
        let _ = writeln!(
            out,
            "{:>3} {:>5.2} | {:>6.3} {:>6.3} | {:>7.4} {:>8.5} {:>5.1}% | {:>7.4} {:>8.5} {:>5.1}% | {:>5.2}%",
            c.order,
            c.deviation,
            c.mean_cf_triad,
            c.mean_cf_lambda,
            c.winner_dist_euclid(),
            c.diff_euclid,
            c.wins_gm_euclid_pct,
            c.winner_dist_cheb(),
            c.diff_cheb,
            c.wins_ev_cheb_pct,
            c.rank_reversal_pct
        );
    }
    let _ = writeln!(out, "{rule}");
    out
}

/// Writes results in the requested format.
pub fn emit<W: Write>(
    results: &[CellAggregate],
    format: OutputFormat,
    config: &ExperimentConfig,
    dest: &mut W,
) -> io::Result<()> {
    if results.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "no results to emit",
        ));
    }
    let text = match format {
        OutputFormat::Csv => render_csv(results, config.master_seed),
        OutputFormat::Table => render_table(results, config),
    };
    dest.write_all(text.as_bytes())?;
    dest.flush()
}
