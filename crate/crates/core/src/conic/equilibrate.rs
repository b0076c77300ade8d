//! Ruiz equilibration.

use super::{Cone, ConicProblem};
use crate::scalar::Real;

/// `Â = E A D`, `b̂ = E b`, `ĉ = D c`.
#[derive(Clone, Debug)]
pub struct Scaling<T> {
    /// Row scales `E`.
    pub e: Vec<T>,
    /// Column scales `D`.
    pub d: Vec<T>,
}

impl<T: Real> Scaling<T> {
    pub fn identity(rows: usize, cols: usize) -> Self {
        Self {
            e: vec![T::one(); rows],
            d: vec![T::one(); cols],
        }
    }

    /// Maps a scaled iterate back: `x = D x̂`, `s = E⁻¹ ŝ`, `y = E ŷ`.
    pub fn unscale(&self, x: &[T], y: &[T], s: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
        (
            x.iter().zip(&self.d).map(|(&v, &d)| v * d).collect(),
            y.iter().zip(&self.e).map(|(&v, &e)| v * e).collect(),
            s.iter().zip(&self.e).map(|(&v, &e)| v / e).collect(),
        )
    }

    /// Inverse of [`Scaling::unscale`].
    pub fn scale(&self, x: &[T], y: &[T], s: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
        (
            x.iter().zip(&self.d).map(|(&v, &d)| v / d).collect(),
            y.iter().zip(&self.e).map(|(&v, &e)| v / e).collect(),
            s.iter().zip(&self.e).map(|(&v, &e)| v * e).collect(),
        )
    }
}

/// Per-pass clamp on a row or column norm; bounds the change of any one
/// scale factor to `1e4` per pass.
const MIN_NORM: f64 = 1e-8;
const MAX_NORM: f64 = 1e8;

/// Iteratively divides each row and column by the square root of its ∞-norm.
/// Zero rows and columns are left alone.
/// All rows of a PSD block share the mean of their factors, so the scaled
/// slack still lives in the same cone.
pub fn equilibrate<T: Real>(problem: &ConicProblem<T>, iterations: usize) -> (ConicProblem<T>, Scaling<T>) {
    let mut scaled = problem.clone();
    let mut scaling = Scaling::identity(problem.num_rows(), problem.num_vars());
    let (lo, hi) = (T::lit(MIN_NORM), T::lit(MAX_NORM));
    // empty rows and columns keep unit scale
    let fix = |v: T| if v == T::zero() { T::one() } else { v.max(lo).min(hi).sqrt() };
    for _ in 0..iterations {
        let mut row: Vec<T> = scaled.a.row_norms().into_iter().map(fix).collect();
        let col: Vec<T> = scaled.a.col_norms().into_iter().map(fix).collect();
        for (k, offset) in problem.cone_offsets() {
            if let Cone::Psd(_) = k {
                let block = &mut row[offset..offset + k.rows()];
                let mean = block.iter().copied().sum::<T>() / T::of_usize(block.len());
                block.iter_mut().for_each(|r| *r = mean);
            }
        }
        let row_inv: Vec<T> = row.iter().map(|&r| T::one() / r).collect();
        let col_inv: Vec<T> = col.iter().map(|&c| T::one() / c).collect();
        scaled.a.scale_rows_cols(&row_inv, &col_inv);
        for (e, r) in scaling.e.iter_mut().zip(&row_inv) {
            *e *= *r;
        }
        for (d, c) in scaling.d.iter_mut().zip(&col_inv) {
            *d *= *c;
        }
    }
    scaled.b = problem.b.iter().zip(&scaling.e).map(|(&b, &e)| b * e).collect();
    scaled.c = problem.c.iter().zip(&scaling.d).map(|(&c, &d)| c * d).collect();
    (scaled, scaling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::SparseMatrix;

    #[test]
    fn balanced_problem_keeps_unit_scales() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0f64), (1, 1, -1.0), (1, 0, 0.5)]).unwrap();
        let p = ConicProblem::new(vec![1.0, 1.0], a, vec![1.0, 1.0], vec![Cone::NonNeg(2)]).unwrap();
        let (_, s) = equilibrate(&p, 25);
        for v in s.e.iter().chain(&s.d) {
            assert!((v - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn round_trip() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1e6f64), (1, 1, 1e-6)]).unwrap();
        let p = ConicProblem::new(vec![1.0, 1.0], a, vec![1.0, 1.0], vec![Cone::NonNeg(2)]).unwrap();
        let (_, s) = equilibrate(&p, 25);
        let (x, y, z): (Vec<f64>, Vec<f64>, Vec<f64>) = (vec![0.3, -2.0], vec![1.5, 4.0], vec![7.0, 1e-3]);
        let (xs, ys, zs) = s.scale(&x, &y, &z);
        let (x2, y2, z2) = s.unscale(&xs, &ys, &zs);
        for (a, b) in x.iter().chain(&y).chain(&z).zip(x2.iter().chain(&y2).chain(&z2)) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
