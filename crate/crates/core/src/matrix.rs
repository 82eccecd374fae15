//! Pairwise comparison matrices, solution vectors and triad enumeration.
//!
//! A pairwise comparison matrix `A = [a_ij]` holds positive judgments where
//! `a_ij` estimates the ratio `s_i / s_j` of two unknown stimulus values.
//! Matrices are stored densely in row-major order; at the orders this crate
//! targets (at most 7) nothing else pays off.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Square matrix of strictly positive comparison coefficients.
#[derive(Clone, PartialEq)]
pub struct PairwiseMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

fn check_positive<T: Scalar>(index: usize, value: T) -> Result<()> {
    if value.is_finite() && value > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidEntry {
            index,
            value: value.to_f64().unwrap_or(f64::NAN),
        })
    }
}

impl<T: Scalar> PairwiseMatrix<T> {
    /// Builds a reciprocal matrix from its strict upper triangle, given
    /// row-major over `i < j`.
    pub fn from_upper_triangle(n: usize, upper: &[T]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("matrix order must be at least 1".into()));
        }
        let expected = n * (n - 1) / 2;
        if upper.len() != expected {
            return Err(Error::Shape(format!(
                "order {n} needs {expected} upper-triangle entries, got {}",
                upper.len()
            )));
        }
        for (k, &v) in upper.iter().enumerate() {
            check_positive(k, v)?;
        }
        let mut entries = vec![T::one(); n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *it.next().unwrap();
                entries[i * n + j] = v;
                entries[j * n + i] = v.recip();
            }
        }
        Ok(Self { n, entries })
    }

    /// Consistent matrix of quotients `a_ij = s_i / s_j`.
    pub fn from_weights(weights: &[T]) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::Shape("weight vector is empty".into()));
        }
        for (k, &v) in weights.iter().enumerate() {
            check_positive(k, v)?;
        }
        let mut entries = Vec::with_capacity(n * n);
        for &si in weights {
            for &sj in weights {
                entries.push(si / sj);
            }
        }
        Ok(Self { n, entries })
    }

    /// Hand-built matrix from rows. Only positivity and squareness are
    /// checked; the result need not be reciprocal.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Shape("matrix has no rows".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                check_positive(i * n + j, v)?;
                entries.push(v);
            }
        }
        Ok(Self { n, entries })
    }

    /// Unchecked constructor for entries already known to be positive.
    pub(crate) fn from_raw(n: usize, entries: Vec<T>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        Self { n, entries }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    /// Row `i` as a slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// All entries, row-major.
    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    /// Strict upper triangle, row-major over `i < j`.
    pub fn upper_triangle(&self) -> Vec<T> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum();
        }
    }

    /// Simultaneous row/column relabeling: entry `(i, j)` of the result is
    /// entry `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Shape(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for &pi in perm {
            for &pj in perm {
                entries.push(self.get(pi, pj));
            }
        }
        Ok(Self { n, entries })
    }

    /// True iff `|a_ij a_ji - 1| <= tol` for all `i < j` and `|a_ii - 1| <= tol`.
    pub fn is_reciprocal(&self, tol: T) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (self.get(i, i) - T::one()).abs() <= tol
                && ((i + 1)..n).all(|j| (self.get(i, j) * self.get(j, i) - T::one()).abs() <= tol)
        })
    }

    /// True iff `|a_ij a_jk / a_ik - 1| <= tol` over every triad `i < j < k`.
    ///
    /// Assumes the matrix is reciprocal, which makes the ordered triads
    /// sufficient. Matrices of order below 3 are trivially consistent.
    pub fn is_consistent(&self, tol: T) -> bool {
        triad_iter(self.n).all(|t| (t.ratio(self) - T::one()).abs() <= tol)
    }
}

impl<T: fmt::Debug> fmt::Debug for PairwiseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.entries.chunks(self.n.max(1)))
            .finish()
    }
}

/// Positive weight vector normalized to unit sum.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionVector<T> {
    weights: Vec<T>,
}

impl<T: Scalar> SolutionVector<T> {
    /// Wraps `weights` after dividing by their sum.
    pub fn normalized(weights: &[T]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Shape("weight vector is empty".into()));
        }
        for (k, &v) in weights.iter().enumerate() {
            check_positive(k, v)?;
        }
        let total: T = weights.iter().copied().sum();
        Ok(Self {
            weights: weights.iter().map(|&w| w / total).collect(),
        })
    }

    #[inline]
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Stimulus indices sorted by descending weight, ties by ascending index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.weights.len()).collect();
        idx.sort_by(|&a, &b| {
            self.weights[b]
                .partial_cmp(&self.weights[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx
    }
}

/// Index triple `i < j < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triad {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl Triad {
    /// `a_ij a_jk / a_ik`; exactly 1 for a consistent triad.
    #[inline]
    pub fn ratio<T: Scalar>(&self, a: &PairwiseMatrix<T>) -> T {
        a.get(self.i, self.j) * a.get(self.j, self.k) / a.get(self.i, self.k)
    }
}

pub(crate) fn triad_iter(n: usize) -> impl Iterator<Item = Triad> {
    (0..n).flat_map(move |i| {
        ((i + 1)..n).flat_map(move |j| ((j + 1)..n).map(move |k| Triad { i, j, k }))
    })
}

/// All `C(n, 3)` triads in lexicographic order.
pub fn triads(n: usize) -> Result<Vec<Triad>> {
    if n < 3 {
        return Err(Error::Shape(format!("triads need order >= 3, got {n}")));
    }
    Ok(triad_iter(n).collect())
}
