//! Monte Carlo comparison of the GM and EV methods over an
//! order x deviation grid.
//!
//! Every trial draws one NSI matrix from its own replayable stream, solves it
//! with both methods, scores both reconstructions under both metrics and
//! records the matrix's consistency factors. Trials are grouped into
//! fixed-size chunks; chunks run in parallel and are merged in index order,
//! so results do not depend on the number of workers.

use rayon::prelude::*;

use crate::consistency::{cf_lambda, cf_triad_with, TriadAggregation};
use crate::error::{Error, Result};
use crate::generator::{generate, trial_rng, PerturbationSpec};
use crate::matrix::SolutionVector;
use crate::metrics::DistancePair;
use crate::solvers::{solve_ev, solve_gm, EvSettings};
use crate::stats::RunningMean;
use crate::{MAX_ORDER, MIN_ORDER};

/// Matrix orders of the default grid.
pub const DEFAULT_ORDERS: [usize; 4] = [4, 5, 6, 7];
/// Deviations of the default grid.
pub const DEFAULT_DEVIATIONS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
/// Trials per cell of the default grid.
pub const DEFAULT_TRIALS: u64 = 1_000_000;
/// Default bound `M` of the log-uniform base weights on `[1/M, M]`.
pub const DEFAULT_SCALE_MAX: f64 = 3.0;

/// Trials per parallel work unit. Fixed so that the merge tree is the same
/// for every worker count.
const CHUNK: u64 = 2048;
/// Failed trial indices retained per cell for reporting.
const MAX_REPORTED_FAILURES: usize = 16;

/// Parameters shared by every trial of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSetup {
    pub order: usize,
    pub deviation: f64,
    pub scale_max: f64,
    pub master_seed: u64,
    pub triad_agg: TriadAggregation,
    pub ev: EvSettings<f64>,
}

impl CellSetup {
    pub fn new(order: usize, deviation: f64, master_seed: u64) -> Self {
        Self {
            order,
            deviation,
            scale_max: DEFAULT_SCALE_MAX,
            master_seed,
            triad_agg: TriadAggregation::default(),
            ev: EvSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub order: usize,
    pub deviation: f64,
    pub index: u64,
    pub cf_triad: f64,
    pub cf_lambda: f64,
    pub dist_gm_euclid: f64,
    pub dist_ev_euclid: f64,
    pub dist_gm_cheb: f64,
    pub dist_ev_cheb: f64,
    pub rank_reversal: bool,
}

/// True iff the two vectors rank stimuli differently (ties broken by index).
pub fn rank_reversal(s_gm: &SolutionVector<f64>, s_ev: &SolutionVector<f64>) -> Result<bool> {
    if s_gm.len() != s_ev.len() {
        return Err(Error::Shape(format!(
            "cannot compare rankings of length {} and {}",
            s_gm.len(),
            s_ev.len()
        )));
    }
    Ok(s_gm.ranking() != s_ev.ranking())
}

/// Generates, solves and scores trial `index` of the cell.
pub fn run_trial(setup: &CellSetup, index: u64) -> Result<TrialRecord> {
    let spec = PerturbationSpec::new(setup.deviation, setup.scale_max)?;
    let mut rng = trial_rng(setup.master_seed, setup.order, setup.deviation, index);
    let instance = generate::<f64, _>(setup.order, &spec, &mut rng)?;
    let a = &instance.perturbed;

    let gm = solve_gm(a);
    let ev = solve_ev(a, setup.ev)?;
    let d_gm = DistancePair::of_solution(a, &gm)?;
    let d_ev = DistancePair::of_solution(a, &ev.solution)?;

    Ok(TrialRecord {
        order: setup.order,
        deviation: setup.deviation,
        index,
        cf_triad: cf_triad_with(a, setup.triad_agg),
        cf_lambda: cf_lambda(ev.lambda_max, setup.order)?,
        dist_gm_euclid: d_gm.euclid_mod,
        dist_ev_euclid: d_ev.euclid_mod,
        dist_gm_cheb: d_gm.cheb,
        dist_ev_cheb: d_ev.cheb,
        rank_reversal: rank_reversal(&gm, &ev.solution)?,
    })
}

/// Table-style summary of one (order, deviation) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellAggregate {
    pub order: usize,
    pub deviation: f64,
    /// Trials that produced a record.
    pub trials: u64,
    pub mean_cf_triad: f64,
    pub mean_cf_lambda: f64,
    pub mean_dist_gm_euclid: f64,
    pub mean_dist_ev_euclid: f64,
    pub diff_euclid: f64,
    /// Percentage of trials where GM is closer under the Euclidean metric.
    pub wins_gm_euclid_pct: f64,
    pub mean_dist_gm_cheb: f64,
    pub mean_dist_ev_cheb: f64,
    pub diff_cheb: f64,
    /// Percentage of trials where EV is closer under the Chebyshev metric.
    pub wins_ev_cheb_pct: f64,
    pub rank_reversal_pct: f64,
    /// Trials whose eigenvector solve failed.
    pub failures: u64,
    /// First few failed trial indices.
    pub failed_trials: Vec<u64>,
}

impl CellAggregate {
    /// Mean Euclidean distance of the method that wins under that metric (GM).
    pub fn winner_dist_euclid(&self) -> f64 {
        self.mean_dist_gm_euclid
    }

    /// Mean Chebyshev distance of the method that wins under that metric (EV).
    pub fn winner_dist_cheb(&self) -> f64 {
        self.mean_dist_ev_cheb
    }
}

/// Mergeable partial sums of a cell.
#[derive(Debug, Clone, Default)]
struct CellAccumulator {
    cf_triad: RunningMean,
    cf_lambda: RunningMean,
    gm_euclid: RunningMean,
    ev_euclid: RunningMean,
    gm_cheb: RunningMean,
    ev_cheb: RunningMean,
    gm_wins_euclid: u64,
    ties_euclid: u64,
    ev_wins_cheb: u64,
    ties_cheb: u64,
    reversals: u64,
    failures: u64,
    failed_trials: Vec<u64>,
}

impl CellAccumulator {
    fn push(&mut self, r: &TrialRecord) {
        self.cf_triad.push(r.cf_triad);
        self.cf_lambda.push(r.cf_lambda);
        self.gm_euclid.push(r.dist_gm_euclid);
        self.ev_euclid.push(r.dist_ev_euclid);
        self.gm_cheb.push(r.dist_gm_cheb);
        self.ev_cheb.push(r.dist_ev_cheb);
        if r.dist_gm_euclid < r.dist_ev_euclid {
            self.gm_wins_euclid += 1;
        } else if r.dist_gm_euclid == r.dist_ev_euclid {
            self.ties_euclid += 1;
        }
        if r.dist_ev_cheb < r.dist_gm_cheb {
            self.ev_wins_cheb += 1;
        } else if r.dist_ev_cheb == r.dist_gm_cheb {
            self.ties_cheb += 1;
        }
        self.reversals += u64::from(r.rank_reversal);
    }

    fn fail(&mut self, index: u64) {
        self.failures += 1;
        if self.failed_trials.len() < MAX_REPORTED_FAILURES {
            self.failed_trials.push(index);
        }
    }

    fn merge(&mut self, o: &CellAccumulator) {
        self.cf_triad.merge(&o.cf_triad);
        self.cf_lambda.merge(&o.cf_lambda);
        self.gm_euclid.merge(&o.gm_euclid);
        self.ev_euclid.merge(&o.ev_euclid);
        self.gm_cheb.merge(&o.gm_cheb);
        self.ev_cheb.merge(&o.ev_cheb);
        self.gm_wins_euclid += o.gm_wins_euclid;
        self.ties_euclid += o.ties_euclid;
        self.ev_wins_cheb += o.ev_wins_cheb;
        self.ties_cheb += o.ties_cheb;
        self.reversals += o.reversals;
        self.failures += o.failures;
        let room = MAX_REPORTED_FAILURES - self.failed_trials.len();
        self.failed_trials.extend(o.failed_trials.iter().take(room));
    }

    fn finish(self, order: usize, deviation: f64) -> Result<CellAggregate> {
        let n = self.cf_triad.count();
        if n == 0 {
            return Err(Error::EmptyCell);
        }
        let pct = |wins: u64, ties: u64| 100.0 * (wins as f64 + 0.5 * ties as f64) / n as f64;
        Ok(CellAggregate {
            order,
            deviation,
            trials: n,
            mean_cf_triad: self.cf_triad.mean(),
            mean_cf_lambda: self.cf_lambda.mean(),
            mean_dist_gm_euclid: self.gm_euclid.mean(),
            mean_dist_ev_euclid: self.ev_euclid.mean(),
            diff_euclid: (self.gm_euclid.mean() - self.ev_euclid.mean()).abs(),
            wins_gm_euclid_pct: pct(self.gm_wins_euclid, self.ties_euclid),
            mean_dist_gm_cheb: self.gm_cheb.mean(),
            mean_dist_ev_cheb: self.ev_cheb.mean(),
            diff_cheb: (self.gm_cheb.mean() - self.ev_cheb.mean()).abs(),
            wins_ev_cheb_pct: pct(self.ev_wins_cheb, self.ties_cheb),
            rank_reversal_pct: 100.0 * self.reversals as f64 / n as f64,
            failures: self.failures,
            failed_trials: self.failed_trials,
        })
    }
}

/// Summarizes records of a single (order, deviation) cell.
pub fn aggregate(records: &[TrialRecord]) -> Result<CellAggregate> {
    let first = records.first().ok_or(Error::EmptyCell)?;
    let mut acc = CellAccumulator::default();
    for r in records {
        if r.order != first.order || r.deviation.to_bits() != first.deviation.to_bits() {
            return Err(Error::Shape(format!(
                "mixed cells: ({}, {}) and ({}, {})",
                first.order, first.deviation, r.order, r.deviation
            )));
        }
        acc.push(r);
    }
    acc.finish(first.order, first.deviation)
}

/// Full grid description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub orders: Vec<usize>,
    pub deviations: Vec<f64>,
    pub trials_per_cell: u64,
    pub master_seed: u64,
    pub scale_max: f64,
    pub worker_count: usize,
    pub triad_agg: TriadAggregation,
}

impl ExperimentConfig {
    /// Orders 4..=7, deviations 0.1..=0.5, one million trials per cell.
    pub fn default_grid(master_seed: u64) -> Self {
        Self {
            orders: DEFAULT_ORDERS.to_vec(),
            deviations: DEFAULT_DEVIATIONS.to_vec(),
            trials_per_cell: DEFAULT_TRIALS,
            master_seed,
            scale_max: DEFAULT_SCALE_MAX,
            worker_count: std::thread::available_parallelism().map_or(1, |n| n.get()),
            triad_agg: TriadAggregation::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() || self.deviations.is_empty() {
            return Err(Error::Parameter(
                "orders and deviations must be non-empty".into(),
            ));
        }
        if let Some(n) = self
            .orders
            .iter()
            .find(|n| !(MIN_ORDER..=MAX_ORDER).contains(*n))
        {
            return Err(Error::Parameter(format!(
                "order must lie in {MIN_ORDER}..={MAX_ORDER}, got {n}"
            )));
        }
        for &d in &self.deviations {
            PerturbationSpec::new(d, self.scale_max)?;
        }
        if self.trials_per_cell == 0 {
            return Err(Error::Parameter(
                "trials per cell must be at least 1".into(),
            ));
        }
        if self.worker_count == 0 {
            return Err(Error::Parameter("worker count must be at least 1".into()));
        }
        Ok(())
    }

    /// Cells in output order: order outer, deviation inner.
    pub fn cells(&self) -> Vec<CellSetup> {
        self.orders
            .iter()
            .flat_map(|&order| {
                self.deviations.iter().map(move |&deviation| CellSetup {
                    order,
                    deviation,
                    scale_max: self.scale_max,
                    master_seed: self.master_seed,
                    triad_agg: self.triad_agg,
                    ev: EvSettings::default(),
                })
            })
            .collect()
    }
}

fn run_chunk(setup: &CellSetup, start: u64, end: u64) -> Result<CellAccumulator> {
    let mut acc = CellAccumulator::default();
    for index in start..end {
        match run_trial(setup, index) {
            Ok(r) => acc.push(&r),
            Err(Error::Convergence { .. }) => acc.fail(index),
            Err(e) => return Err(e),
        }
    }
    Ok(acc)
}

/// Runs every cell of `config`, one aggregate per cell in grid order.
///
/// Eigenvector convergence failures are counted per cell rather than
/// aborting the sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<CellAggregate>> {
    config.validate()?;
    let cells = config.cells();
    let n = config.trials_per_cell;
    let jobs: Vec<(usize, u64, u64)> = (0..cells.len())
        .flat_map(|c| (0..n.div_ceil(CHUNK)).map(move |k| (c, k * CHUNK, ((k + 1) * CHUNK).min(n))))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_count)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    let partials: Vec<Result<CellAccumulator>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, start, end)| run_chunk(&cells[c], start, end))
            .collect()
    });

    let mut merged: Vec<CellAccumulator> = vec![CellAccumulator::default(); cells.len()];
    for (&(c, _, _), partial) in jobs.iter().zip(partials) {
        let cell_err = |e: Error| Error::Cell {
            order: cells[c].order,
            deviation: cells[c].deviation,
            source: Box::new(e),
        };
        merged[c].merge(&partial.map_err(cell_err)?);
    }
    cells
        .iter()
        .zip(merged)
        .map(|(setup, acc)| {
            acc.finish(setup.order, setup.deviation)
                .map_err(|e| Error::Cell {
                    order: setup.order,
                    deviation: setup.deviation,
                    source: Box::new(e),
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::normalize;

    fn sv(v: &[f64]) -> SolutionVector<f64> {
        normalize(v).unwrap()
    }

    #[test]
    fn rank_reversal_examples() {
        let a = sv(&[0.5, 0.3, 0.2]);
        assert!(!rank_reversal(&a, &a).unwrap());
        assert!(!rank_reversal(&a, &sv(&[0.45, 0.35, 0.2])).unwrap());
        assert!(rank_reversal(&sv(&[0.4, 0.35, 0.25]), &sv(&[0.35, 0.4, 0.25])).unwrap());
        assert!(matches!(
            rank_reversal(&a, &sv(&[0.5, 0.5])),
            Err(Error::Shape(_))
        ));
        // Tie in one vector, strict order in the other.
        assert!(!rank_reversal(&sv(&[0.4, 0.4, 0.2]), &sv(&[0.41, 0.39, 0.2])).unwrap());
        assert!(rank_reversal(&sv(&[0.4, 0.4, 0.2]), &sv(&[0.39, 0.41, 0.2])).unwrap());
    }

    #[test]
    fn consistent_trials_are_exact() {
        for n in MIN_ORDER..=MAX_ORDER {
            let setup = CellSetup::new(n, 0.0, 17);
            for i in 0..50 {
                let r = run_trial(&setup, i).unwrap();
                for d in [
                    r.dist_gm_euclid,
                    r.dist_ev_euclid,
                    r.dist_gm_cheb,
                    r.dist_ev_cheb,
                    r.cf_lambda,
                    r.cf_triad,
                ] {
                    assert!(d <= 1e-9, "{r:?}");
                }
                assert!(!r.rank_reversal);
            }
        }
    }

    #[test]
    fn order3_methods_agree() {
        for d in [0.1, 0.5, 0.9] {
            let setup = CellSetup::new(3, d, 4);
            for i in 0..200 {
                let r = run_trial(&setup, i).unwrap();
                assert!((r.dist_gm_euclid - r.dist_ev_euclid).abs() <= 1e-9);
                assert!((r.dist_gm_cheb - r.dist_ev_cheb).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn trial_replay_is_bitwise() {
        let setup = CellSetup::new(6, 0.4, 123);
        assert_eq!(
            run_trial(&setup, 999).unwrap(),
            run_trial(&setup, 999).unwrap()
        );
        assert_ne!(
            run_trial(&setup, 998).unwrap(),
            run_trial(&setup, 999).unwrap()
        );
    }

    fn record(gm_e: f64, ev_e: f64, gm_c: f64, ev_c: f64, rr: bool) -> TrialRecord {
        TrialRecord {
            order: 4,
            deviation: 0.2,
            index: 0,
            cf_triad: 0.1,
            cf_lambda: 0.01,
            dist_gm_euclid: gm_e,
            dist_ev_euclid: ev_e,
            dist_gm_cheb: gm_c,
            dist_ev_cheb: ev_c,
            rank_reversal: rr,
        }
    }

    #[test]
    fn aggregate_single_and_ties() {
        let one = aggregate(&[record(0.1, 0.2, 0.5, 0.4, false)]).unwrap();
        assert_eq!(one.trials, 1);
        assert_eq!(one.mean_dist_gm_euclid, 0.1);
        assert_eq!(one.wins_gm_euclid_pct, 100.0);
        assert_eq!(one.wins_ev_cheb_pct, 100.0);
        assert_eq!(one.mean_cf_triad, 0.1);

        let tie = aggregate(&[record(0.1, 0.1, 0.5, 0.5, true)]).unwrap();
        assert_eq!(tie.wins_gm_euclid_pct, 50.0);
        assert_eq!(tie.wins_ev_cheb_pct, 50.0);
        assert_eq!(tie.rank_reversal_pct, 100.0);

        let lose = aggregate(&[record(0.3, 0.1, 0.1, 0.3, false)]).unwrap();
        assert_eq!(lose.wins_gm_euclid_pct, 0.0);
        assert_eq!(lose.wins_ev_cheb_pct, 0.0);

        let mixed = aggregate(&[
            record(0.1, 0.2, 0.5, 0.4, false),
            record(0.3, 0.1, 0.1, 0.3, true),
            record(0.2, 0.2, 0.3, 0.3, false),
            record(0.1, 0.3, 0.5, 0.4, false),
        ])
        .unwrap();
        assert_eq!(mixed.wins_gm_euclid_pct, 62.5);
        assert_eq!(mixed.rank_reversal_pct, 25.0);
        assert!((mixed.diff_euclid - 0.025).abs() < 1e-15);
    }

    #[test]
    fn aggregate_errors() {
        assert!(matches!(aggregate(&[]), Err(Error::EmptyCell)));
        let mut other = record(0.1, 0.2, 0.3, 0.4, false);
        other.order = 5;
        assert!(matches!(
            aggregate(&[record(0.1, 0.2, 0.3, 0.4, false), other]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn chunked_run_matches_direct_aggregation() {
        let mut config = ExperimentConfig::default_grid(9);
        config.orders = vec![5];
        config.deviations = vec![0.3];
        config.trials_per_cell = 5000;
        config.worker_count = 3;
        let cell = &run_experiment(&config).unwrap()[0];
        let setup = config.cells()[0];
        let records: Vec<TrialRecord> = (0..5000).map(|i| run_trial(&setup, i).unwrap()).collect();
        let direct = aggregate(&records).unwrap();
        assert_eq!(cell.trials, direct.trials);
        assert_eq!(cell.wins_gm_euclid_pct, direct.wins_gm_euclid_pct);
        assert_eq!(cell.rank_reversal_pct, direct.rank_reversal_pct);
        assert!((cell.mean_cf_triad - direct.mean_cf_triad).abs() < 1e-12);
        assert!((cell.mean_dist_ev_cheb - direct.mean_dist_ev_cheb).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::default_grid(1);
        assert!(ok.validate().is_ok());
        assert_eq!(ok.cells().len(), 20);
        assert_eq!((ok.cells()[1].order, ok.cells()[1].deviation), (4, 0.2));
        for bad in [
            ExperimentConfig {
                orders: vec![],
                ..ok.clone()
            },
            ExperimentConfig {
                orders: vec![8],
                ..ok.clone()
            },
            ExperimentConfig {
                deviations: vec![1.0],
                ..ok.clone()
            },
            ExperimentConfig {
                trials_per_cell: 0,
                ..ok.clone()
            },
            ExperimentConfig {
                worker_count: 0,
                ..ok.clone()
            },
            ExperimentConfig {
                scale_max: 1.0,
                ..ok.clone()
            },
        ] {
            assert!(
                matches!(run_experiment(&bad), Err(Error::Parameter(_))),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn failures_are_counted_not_fatal() {
        let mut setup = CellSetup::new(5, 0.3, 1);
        setup.ev = EvSettings {
            tol: 1e-300,
            max_iter: 2,
        };
        let acc = run_chunk(&setup, 0, 40).unwrap();
        assert_eq!(acc.failures, 40);
        assert_eq!(acc.failed_trials.len(), MAX_REPORTED_FAILURES);
        assert!(matches!(acc.finish(5, 0.3), Err(Error::EmptyCell)));
    }
}
