//! Geometric-means (GM) and eigenvector (EV) solutions.

use crate::error::{Error, Result};
use crate::matrix::{PairwiseMatrix, SolutionVector};
use crate::scalar::Scalar;

/// Divides every component by the component sum.
pub fn normalize<T: Scalar>(v: &[T]) -> Result<SolutionVector<T>> {
    SolutionVector::normalized(v)
}

/// Normalized row geometric means, `s_i = (prod_j a_ij)^(1/n)`.
pub fn solve_gm<T: Scalar>(a: &PairwiseMatrix<T>) -> SolutionVector<T> {
    let n = a.order();
    let inv_n = T::one() / T::lit(n as f64);
    let means: Vec<T> = (0..n)
        .map(|i| a.row(i).iter().fold(T::one(), |p, &x| p * x).powf(inv_n))
        .collect();
    // Rows of a positive matrix have positive finite products.
    SolutionVector::normalized(&means).expect("row geometric means are positive")
}

/// Stopping rule for [`solve_ev`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvSettings<T> {
    /// Bound on the componentwise relative residual `|A s - lambda s|_i / s_i`.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for EvSettings<T> {
    fn default() -> Self {
        Self {
            tol: T::default_tolerance(),
            max_iter: 10_000,
        }
    }
}

/// Principal eigenpair of a positive matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EvResult<T> {
    pub solution: SolutionVector<T>,
    /// Rayleigh-quotient estimate of the Perron eigenvalue.
    pub lambda_max: T,
    pub iterations: usize,
    /// `||A s - lambda_max s||_inf` for the returned solution.
    pub residual: T,
}

/// Power iteration from the all-ones vector.
///
/// Each step forms `y = A s`, takes the Rayleigh quotient
/// `lambda = s.y / s.s` and stops once `|y_i - lambda s_i| <= tol * s_i` for
/// every component; otherwise `s <- y / sum(y)`. Since `s` sums to one this
/// also bounds `||A s - lambda s||_inf` by `tol`, and it keeps small
/// components (and hence reconstructed ratios) accurate to `tol` relative. For a positive matrix the Perron root is
/// simple and strictly dominant, so the iteration converges to the positive
/// eigenvector.
pub fn solve_ev<T: Scalar>(a: &PairwiseMatrix<T>, settings: EvSettings<T>) -> Result<EvResult<T>> {
    if settings.tol.is_nan() || settings.tol <= T::zero() {
        return Err(Error::Parameter(
            "eigenvector tolerance must be positive".into(),
        ));
    }
    if settings.max_iter == 0 {
        return Err(Error::Parameter("max_iter must be at least 1".into()));
    }
    let n = a.order();
    let mut s = vec![T::one() / T::lit(n as f64); n];
    let mut y = vec![T::zero(); n];
    let mut residual = T::infinity();

    for iteration in 1..=settings.max_iter {
        a.mul_vec(&s, &mut y);
        let sy: T = s.iter().zip(&y).map(|(&p, &q)| p * q).sum();
        let ss: T = s.iter().map(|&p| p * p).sum();
        let lambda = sy / ss;
        let mut relative = T::zero();
        residual = T::zero();
        for (&p, &q) in s.iter().zip(&y) {
            let r = (q - lambda * p).abs();
            residual = residual.max(r);
            relative = relative.max(r / p);
        }
        if relative <= settings.tol {
            return Ok(EvResult {
                solution: SolutionVector::normalized(&s)?,
                lambda_max: lambda,
                iterations: iteration,
                residual,
            });
        }
        let total: T = y.iter().copied().sum();
        for (p, &q) in s.iter_mut().zip(&y) {
            *p = q / total;
        }
    }
    Err(Error::Convergence {
        iterations: settings.max_iter,
        residual: residual.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn inconsistent3() -> PairwiseMatrix<f64> {
        PairwiseMatrix::from_upper_triangle(3, &[2.0, 8.0, 2.0]).unwrap()
    }

    fn assert_vec_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = tol);
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize(&[2.0, 1.0, 1.0]).unwrap().weights(),
            &[0.5, 0.25, 0.25]
        );
        let once = normalize(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let twice = normalize(once.weights()).unwrap();
        assert_vec_close(once.weights(), twice.weights(), 1e-15);
        assert_eq!(normalize(&[7.5; 4]).unwrap().weights(), &[0.25; 4]);
        assert!(matches!(
            normalize(&[1.0, -1.0]),
            Err(Error::InvalidEntry { index: 1, .. })
        ));
    }

    #[test]
    fn gm_examples() {
        let a = PairwiseMatrix::from_weights(&[4.0, 2.0, 1.0]).unwrap();
        assert_vec_close(
            solve_gm(&a).weights(),
            &[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0],
            1e-15,
        );

        let ones = PairwiseMatrix::from_rows(&vec![vec![1.0; 5]; 5]).unwrap();
        assert_vec_close(solve_gm(&ones).weights(), &[0.2; 5], 1e-15);

        // Row products 16, 1, 1/16; cube roots; normalization (40-digit evaluation).
        assert_vec_close(
            solve_gm(&inconsistent3()).weights(),
            &[
                0.643_359_719_475_146_8,
                0.255_317_473_872_203_4,
                0.101_322_806_652_649_76,
            ],
            1e-14,
        );
    }

    #[test]
    fn ev_examples() {
        let a = PairwiseMatrix::from_weights(&[4.0, 2.0, 1.0]).unwrap();
        let ev = solve_ev(&a, EvSettings::default()).unwrap();
        assert_vec_close(
            ev.solution.weights(),
            &[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0],
            1e-12,
        );
        assert_abs_diff_eq!(ev.lambda_max, 3.0, epsilon = 1e-12);

        let ones = PairwiseMatrix::from_rows(&vec![vec![1.0; 6]; 6]).unwrap();
        let ev = solve_ev(&ones, EvSettings::default()).unwrap();
        assert_vec_close(ev.solution.weights(), &[1.0 / 6.0; 6], 1e-12);
        assert_abs_diff_eq!(ev.lambda_max, 6.0, epsilon = 1e-12);

        let ev = solve_ev(&inconsistent3(), EvSettings::default()).unwrap();
        // 1 + r^(1/3) + r^(-1/3) with r = 1/2, evaluated at 40 digits.
        assert_abs_diff_eq!(ev.lambda_max, 3.053_621_575_878_973, epsilon = 1e-9);
        assert_vec_close(
            ev.solution.weights(),
            solve_gm(&inconsistent3()).weights(),
            1e-9,
        );
    }

    #[test]
    fn ev_rejects_bad_settings_and_reports_nonconvergence() {
        let a = inconsistent3();
        assert!(solve_ev(
            &a,
            EvSettings {
                tol: 0.0,
                max_iter: 10
            }
        )
        .is_err());
        assert!(solve_ev(
            &a,
            EvSettings {
                tol: 1e-12,
                max_iter: 0
            }
        )
        .is_err());
        match solve_ev(
            &a,
            EvSettings {
                tol: 1e-300,
                max_iter: 3,
            },
        ) {
            Err(Error::Convergence {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn single_precision_solvers() {
        let a = PairwiseMatrix::<f32>::from_upper_triangle(3, &[2.0, 8.0, 2.0]).unwrap();
        let gm = solve_gm(&a);
        let ev = solve_ev(&a, EvSettings::default()).unwrap();
        for (x, y) in gm.weights().iter().zip(ev.solution.weights()) {
            assert!((x - y).abs() < 1e-5);
        }
        assert!((ev.lambda_max - 3.053_621_6).abs() < 1e-4);
    }

    fn reciprocal3() -> impl Strategy<Value = PairwiseMatrix<f64>> {
        prop::collection::vec(-2.5f64..2.5, 3).prop_map(|l| {
            PairwiseMatrix::from_upper_triangle(3, &[l[0].exp(), l[1].exp(), l[2].exp()]).unwrap()
        })
    }

    proptest! {
        #[test]
        fn order3_gm_equals_ev(a in reciprocal3()) {
            let gm = solve_gm(&a);
            let ev = solve_ev(&a, EvSettings::default()).unwrap();
            for (x, y) in gm.weights().iter().zip(ev.solution.weights()) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
            prop_assert!(ev.lambda_max >= 3.0 - 1e-9);
        }

        #[test]
        fn consistent_recovery(w in prop::collection::vec(1.0f64 / 9.0..9.0, 3..=7), c in 0.1f64..10.0) {
            let target = normalize(&w).unwrap();
            let scaled: Vec<f64> = w.iter().map(|x| x * c).collect();
            for weights in [&w, &scaled] {
                let a = PairwiseMatrix::from_weights(weights).unwrap();
                let ev = solve_ev(&a, EvSettings::default()).unwrap();
                for ((g, e), t) in solve_gm(&a).weights().iter().zip(ev.solution.weights()).zip(target.weights()) {
                    prop_assert!((g - t).abs() <= 1e-9);
                    prop_assert!((e - t).abs() <= 1e-9);
                }
                prop_assert!((ev.lambda_max - w.len() as f64).abs() <= 1e-9);
            }
        }

        #[test]
        fn ev_residual_contract(n in 3usize..=7, logs in prop::collection::vec(-2.2f64..2.2, 21)) {
            let upper: Vec<f64> = logs[..n * (n - 1) / 2].iter().map(|l| l.exp()).collect();
            let a = PairwiseMatrix::from_upper_triangle(n, &upper).unwrap();
            let settings = EvSettings::default();
            let ev = solve_ev(&a, settings).unwrap();
            prop_assert!(ev.residual <= settings.tol);
            prop_assert!(ev.lambda_max >= n as f64 - 1e-9);
            // Recheck the residual on the normalized output.
            let s = ev.solution.weights();
            let mut y = vec![0.0; n];
            a.mul_vec(s, &mut y);
            let r = s.iter().zip(&y).map(|(p, q)| (q - ev.lambda_max * p).abs()).fold(0.0, f64::max);
            prop_assert!(r <= 10.0 * settings.tol);
            prop_assert!(s.iter().all(|&x| x > 0.0));
        }
    }
}
