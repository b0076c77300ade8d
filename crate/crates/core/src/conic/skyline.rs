//! Profile (skyline) Cholesky for the ADMM linear system `σI + ρAᵀA`.

use super::SparseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower triangle of a symmetric matrix in variable-band storage: row `i`
/// holds columns `first[i]..=i` contiguously starting at `start[i]`.
#[derive(Clone, Debug)]
pub struct Profile<T> {
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> Profile<T> {
    /// `AᵀA` in profile form.
    pub fn gram(a: &SparseMatrix<T>) -> Self {
        let n = a.cols();
        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..a.rows() {
            let mut cols = a.row(i).map(|(j, _)| j);
            if let Some(lo) = cols.next() {
                for j in cols {
                    first[j] = first[j].min(lo);
                }
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut len = 0;
        for (i, &f) in first.iter().enumerate() {
            start.push(len);
            len += i - f + 1;
        }
        start.push(len);
        let mut p = Self {
            first,
            start,
            values: vec![T::zero(); len],
        };
        for i in 0..a.rows() {
            let entries: Vec<(usize, T)> = a.row(i).collect();
            for (k, &(c1, v1)) in entries.iter().enumerate() {
                for &(c2, v2) in &entries[..=k] {
                    let idx = p.index(c1, c2);
                    p.values[idx] += v1 * v2;
                }
            }
        }
        p
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && j >= self.first[i]);
        self.start[i] + (j - self.first[i])
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Stored entries, a measure of fill.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_bandwidth(&self) -> usize {
        self.first.iter().enumerate().map(|(i, &f)| i - f).max().unwrap_or(0)
    }

    /// Factors `shift·I + scale·self`.
    pub fn factor_shifted(&self, shift: T, scale: T) -> Result<SkylineCholesky<T>> {
        let n = self.dim();
        let mut l = Profile {
            first: self.first.clone(),
            start: self.start.clone(),
            values: self.values.iter().map(|&v| v * scale).collect(),
        };
        for i in 0..n {
            let d = l.index(i, i);
            l.values[d] += shift;
        }
        for i in 0..n {
            let fi = l.first[i];
            let si = l.start[i];
            for j in fi..i {
                let fj = l.first[j];
                let sj = l.start[j];
                let lo = fi.max(fj);
                let mut acc = l.values[si + (j - fi)];
                for k in lo..j {
                    acc -= l.values[si + (k - fi)] * l.values[sj + (k - fj)];
                }
                let ljj = l.values[sj + (j - fj)];
                l.values[si + (j - fi)] = acc / ljj;
            }
            let mut diag = l.values[si + (i - fi)];
            for k in fi..i {
                let v = l.values[si + (k - fi)];
                diag -= v * v;
            }
            if !(diag > T::zero()) {
                return Err(Error::NotPositiveDefinite {
                    index: i,
                    pivot: diag.as_f64(),
                    threshold: 0.0,
                });
            }
            l.values[si + (i - fi)] = diag.sqrt();
        }
        Ok(SkylineCholesky { l })
    }
}

#[derive(Clone, Debug)]
pub struct SkylineCholesky<T> {
    l: Profile<T>,
}

impl<T: Real> SkylineCholesky<T> {
    /// Solves `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [T]) {
        let l = &self.l;
        let n = l.dim();
        for i in 0..n {
            let fi = l.first[i];
            let si = l.start[i];
            let mut acc = x[i];
            for k in fi..i {
                acc -= l.values[si + (k - fi)] * x[k];
            }
            x[i] = acc / l.values[si + (i - fi)];
        }
        for i in (0..n).rev() {
            let fi = l.first[i];
            let si = l.start[i];
            x[i] /= l.values[si + (i - fi)];
            let xi = x[i];
            for k in fi..i {
                x[k] -= l.values[si + (k - fi)] * xi;
            }
        }
    }
}
