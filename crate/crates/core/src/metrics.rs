//! Reconstruction of a consistent matrix from a solution and the two
//! distances used to score it.

use crate::error::{Error, Result};
use crate::matrix::{PairwiseMatrix, SolutionVector};
use crate::scalar::Scalar;

/// Consistent matrix of quotients `s_i / s_j`.
pub fn reconstruct<T: Scalar>(s: &SolutionVector<T>) -> PairwiseMatrix<T> {
    PairwiseMatrix::from_weights(s.weights()).expect("solution weights are positive")
}

fn same_order<T: Scalar>(a: &PairwiseMatrix<T>, b: &PairwiseMatrix<T>) -> Result<()> {
    if a.order() == b.order() {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "cannot compare matrices of order {} and {}",
            a.order(),
            b.order()
        )))
    }
}

/// `sqrt(sum_ij (a_ij - b_ij)^2) / n^2` over all `n^2` positions.
pub fn dist_euclid_mod<T: Scalar>(a: &PairwiseMatrix<T>, b: &PairwiseMatrix<T>) -> Result<T> {
    same_order(a, b)?;
    let n = T::lit(a.order() as f64);
    let sq: T = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    Ok(sq.sqrt() / (n * n))
}

/// `max_ij |a_ij - b_ij|`.
pub fn dist_cheb<T: Scalar>(a: &PairwiseMatrix<T>, b: &PairwiseMatrix<T>) -> Result<T> {
    same_order(a, b)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max))
}

/// Both distances between a given matrix and a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistancePair<T> {
    pub euclid_mod: T,
    pub cheb: T,
}

impl<T: Scalar> DistancePair<T> {
    pub fn between(a: &PairwiseMatrix<T>, b: &PairwiseMatrix<T>) -> Result<Self> {
        Ok(Self {
            euclid_mod: dist_euclid_mod(a, b)?,
            cheb: dist_cheb(a, b)?,
        })
    }

    /// Distances from `a` to the reconstruction of `s`.
    pub fn of_solution(a: &PairwiseMatrix<T>, s: &SolutionVector<T>) -> Result<Self> {
        Self::between(a, &reconstruct(s))
    }
}
