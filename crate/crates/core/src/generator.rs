//! Random consistent matrices and their "not-so-inconsistent" (NSI)
//! perturbations.
//!
//! A trial's randomness comes from a ChaCha8 stream keyed by
//! `(master_seed, order, deviation)` and selected by the trial index, so any
//! trial can be replayed in isolation. Draws are consumed in a fixed order:
//!
//! 1. `n` base weights, one `f64` each, `w = M^(2u - 1)` (log-uniform on
//!    `[1/M, M]`);
//! 2. for each upper-triangle position, row-major over `i < j`, one `f64`
//!    magnitude `rho` followed by one `u32` whose top bit picks the sign.
//!
//! Because the multiplier draws follow a fixed number of weight draws, the
//! same stream perturbs two different base matrices with identical
//! multipliers.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::PairwiseMatrix;
use crate::scalar::Scalar;
use crate::{MAX_ORDER, MIN_ORDER};

/// Per-trial random stream.
pub type TrialRng = ChaCha8Rng;

/// Name recorded alongside results.
pub const GENERATOR_NAME: &str = "chacha8/seed-order-deviation-key/trial-stream";

/// Stream for trial `index` of the cell `(order, deviation)`.
///
/// The key depends on neither the scale bound nor the worker layout.
pub fn trial_rng(master_seed: u64, order: usize, deviation: f64, index: u64) -> TrialRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(order as u64).to_le_bytes());
    key[16..24].copy_from_slice(&deviation.to_bits().to_le_bytes());
    key[24..].copy_from_slice(b"pcm-nsi\0");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Deviation `D` and scale bound `M` of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub deviation: f64,
    pub scale_max: f64,
}

impl PerturbationSpec {
    pub fn new(deviation: f64, scale_max: f64) -> Result<Self> {
        check_deviation(deviation)?;
        check_scale(scale_max)?;
        Ok(Self {
            deviation,
            scale_max,
        })
    }
}

fn check_deviation(d: f64) -> Result<()> {
    if (0.0..1.0).contains(&d) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "deviation must lie in [0, 1), got {d}"
        )))
    }
}

fn check_scale(m: f64) -> Result<()> {
    if m.is_finite() && m > 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "scale maximum must be finite and > 1, got {m}"
        )))
    }
}

fn check_order(n: usize) -> Result<()> {
    if (MIN_ORDER..=MAX_ORDER).contains(&n) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "order must lie in {MIN_ORDER}..={MAX_ORDER}, got {n}"
        )))
    }
}

#[inline]
fn multiplier_unchecked<R: RngCore>(d: f64, rng: &mut R) -> f64 {
    let rho: f64 = rng.random();
    let negative = rng.next_u32() >> 31 == 1;
    if negative {
        1.0 - rho * d
    } else {
        1.0 + rho * d
    }
}

/// `1 +/- rho * D` with `rho ~ U[0, 1)` and an equiprobable sign.
pub fn randomizing_multiplier<T: Scalar, R: RngCore>(d: f64, rng: &mut R) -> Result<T> {
    check_deviation(d)?;
    Ok(T::lit(multiplier_unchecked(d, rng)))
}

/// `n` log-uniform weights on `[1/M, M]` and their quotient matrix.
pub fn gen_consistent<T: Scalar, R: RngCore>(
    n: usize,
    scale_max: f64,
    rng: &mut R,
) -> Result<(Vec<T>, PairwiseMatrix<T>)> {
    check_order(n)?;
    check_scale(scale_max)?;
    let log_m = scale_max.ln();
    let weights: Vec<T> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            T::lit(((2.0 * u - 1.0) * log_m).exp())
        })
        .collect();
    let matrix = PairwiseMatrix::from_weights(&weights)?;
    Ok((weights, matrix))
}

/// One multiplier per upper-triangle position, row-major.
pub fn draw_multipliers<T: Scalar, R: RngCore>(n: usize, d: f64, rng: &mut R) -> Result<Vec<T>> {
    check_deviation(d)?;
    Ok((0..n * n.saturating_sub(1) / 2)
        .map(|_| T::lit(multiplier_unchecked(d, rng)))
        .collect())
}

/// Multiplies each upper-triangle element by its multiplier and resets the
/// lower triangle to reciprocals. Positions with a unit multiplier are copied
/// unchanged.
pub fn apply_multipliers<T: Scalar>(
    c: &PairwiseMatrix<T>,
    multipliers: &[T],
) -> Result<PairwiseMatrix<T>> {
    let n = c.order();
    if multipliers.len() != n * (n - 1) / 2 {
        return Err(Error::Shape(format!(
            "order {n} needs {} multipliers, got {}",
            n * (n - 1) / 2,
            multipliers.len()
        )));
    }
    if let Some((index, &m)) = multipliers
        .iter()
        .enumerate()
        .find(|(_, &m)| !(m.is_finite() && m > T::zero()))
    {
        return Err(Error::InvalidEntry {
            index,
            value: m.as_f64(),
        });
    }
    let mut entries = c.as_slice().to_vec();
    let mut it = multipliers.iter();
    for i in 0..n {
        entries[i * n + i] = T::one();
        for j in (i + 1)..n {
            let m = *it.next().unwrap();
            if m != T::one() {
                let v = entries[i * n + j] * m;
                entries[i * n + j] = v;
                entries[j * n + i] = v.recip();
            }
        }
    }
    Ok(PairwiseMatrix::from_raw(n, entries))
}

/// NSI perturbation of a consistent matrix.
pub fn perturb<T: Scalar, R: RngCore>(
    c: &PairwiseMatrix<T>,
    d: f64,
    rng: &mut R,
) -> Result<PairwiseMatrix<T>> {
    let multipliers = draw_multipliers(c.order(), d, rng)?;
    apply_multipliers(c, &multipliers)
}

/// Ground-truth weights, their consistent matrix and its perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance<T> {
    pub base_weights: Vec<T>,
    pub consistent: PairwiseMatrix<T>,
    pub perturbed: PairwiseMatrix<T>,
}

/// Draws a full instance in the documented order.
pub fn generate<T: Scalar, R: RngCore>(
    n: usize,
    spec: &PerturbationSpec,
    rng: &mut R,
) -> Result<GeneratedInstance<T>> {
    check_deviation(spec.deviation)?;
    let (base_weights, consistent) = gen_consistent(n, spec.scale_max, rng)?;
    let perturbed = perturb(&consistent, spec.deviation, rng)?;
    Ok(GeneratedInstance {
        base_weights,
        consistent,
        perturbed,
    })
}
