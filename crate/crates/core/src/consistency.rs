//! Eigenvalue-based and triad-based consistency factors.
//!
//! The eigenvalue factor is `(lambda_max - n) / (n - 1)` without division by
//! a random-matrix index; callers wanting that convention divide externally.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{triad_iter, PairwiseMatrix};
use crate::scalar::Scalar;
use crate::solvers::EvResult;

/// Numerators within this distance of zero are reported as zero.
const CF_LAMBDA_FLOOR: f64 = 1e-12;

/// How per-triad indices combine into one matrix-level factor.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum TriadAggregation {
    /// Worst triad.
    #[default]
    Max,
    /// Arithmetic mean over all triads.
    Mean,
}

impl fmt::Display for TriadAggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriadAggregation::Max => "max",
            TriadAggregation::Mean => "mean",
        })
    }
}

impl FromStr for TriadAggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(TriadAggregation::Max),
            "mean" => Ok(TriadAggregation::Mean),
            other => Err(Error::Parameter(format!(
                "triad aggregation must be `max` or `mean`, got `{other}`"
            ))),
        }
    }
}

/// Both consistency factors of one matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport<T> {
    pub cf_lambda: T,
    pub cf_triad: T,
}

impl<T: Scalar> ConsistencyReport<T> {
    /// Combines an already computed eigenpair of `a` with its triad factor.
    pub fn new(a: &PairwiseMatrix<T>, ev: &EvResult<T>, agg: TriadAggregation) -> Result<Self> {
        Ok(Self {
            cf_lambda: cf_lambda(ev.lambda_max, a.order())?,
            cf_triad: cf_triad_with(a, agg),
        })
    }
}

/// `(lambda_max - n) / (n - 1)`, floored at zero.
pub fn cf_lambda<T: Scalar>(lambda_max: T, n: usize) -> Result<T> {
    if n < 3 {
        return Err(Error::Shape(format!("cf_lambda needs order >= 3, got {n}")));
    }
    let order = T::lit(n as f64);
    let excess = lambda_max - order;
    if excess <= T::lit(CF_LAMBDA_FLOOR) {
        return Ok(T::zero());
    }
    Ok(excess / (order - T::one()))
}

/// Inconsistency of a single triad:
/// `min(|1 - a_ik / (a_ij a_jk)|, |1 - a_ij a_jk / a_ik|)`.
#[inline]
pub fn triad_index<T: Scalar>(ratio: T) -> T {
    let one = T::one();
    (one - ratio.recip()).abs().min((one - ratio).abs())
}

/// Worst triad index over the matrix.
pub fn cf_triad<T: Scalar>(a: &PairwiseMatrix<T>) -> T {
    cf_triad_with(a, TriadAggregation::Max)
}

/// Triad factor with an explicit aggregation. Orders below 3 have no
/// triads and report zero.
pub fn cf_triad_with<T: Scalar>(a: &PairwiseMatrix<T>, agg: TriadAggregation) -> T {
    let indices = triad_iter(a.order()).map(|t| triad_index(t.ratio(a)));
    match agg {
        TriadAggregation::Max => indices.fold(T::zero(), T::max),
        TriadAggregation::Mean => {
            let (sum, count) = indices.fold((T::zero(), 0usize), |(s, c), x| (s + x, c + 1));
            if count == 0 {
                T::zero()
            } else {
                sum / T::lit(count as f64)
            }
        }
    }
}
