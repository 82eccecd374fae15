//! Pairwise comparison matrices and a Monte Carlo harness comparing the
//! geometric-means (GM) and eigenvector (EV) solution methods.
//!
//! The numerical core ([`matrix`], [`solvers`], [`consistency`], [`metrics`],
//! [`generator`]) is generic over the floating-point [`Scalar`]; the
//! experiment harness ([`montecarlo`], [`cli`]) runs in `f64`.

pub mod cli;
pub mod consistency;
pub mod error;
pub mod generator;
pub mod matrix;
pub mod metrics;
pub mod montecarlo;
pub mod scalar;
pub mod solvers;
pub mod stats;

pub use consistency::{cf_lambda, cf_triad, cf_triad_with, ConsistencyReport, TriadAggregation};
pub use error::{Error, Result};
pub use generator::{GeneratedInstance, PerturbationSpec};
pub use matrix::{triads, PairwiseMatrix, SolutionVector, Triad};
pub use metrics::{dist_cheb, dist_euclid_mod, reconstruct, DistancePair};
pub use montecarlo::{
    aggregate, rank_reversal, run_experiment, run_trial, CellAggregate, CellSetup,
    ExperimentConfig, TrialRecord,
};
pub use scalar::Scalar;
pub use solvers::{normalize, solve_ev, solve_gm, EvResult, EvSettings};

/// Double-precision pairwise comparison matrix.
pub type Matrix64 = PairwiseMatrix<f64>;
/// Single-precision pairwise comparison matrix.
pub type Matrix32 = PairwiseMatrix<f32>;
/// Double-precision solution vector.
pub type Solution64 = SolutionVector<f64>;
/// Single-precision solution vector.
pub type Solution32 = SolutionVector<f32>;
/// Double-precision eigenvector result.
pub type EvResult64 = EvResult<f64>;

/// Smallest matrix order accepted by the generator and the experiment grid.
pub const MIN_ORDER: usize = 3;
/// Largest matrix order accepted by the generator and the experiment grid.
pub const MAX_ORDER: usize = 7;
