use super::{Matrix, SymMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower-triangular Cholesky factor `S = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

/// Factorizes `s`; a pivot at or below `1e-12 * trace(S) / dim` is treated as
/// loss of positive definiteness.
pub fn cholesky<T: Real>(s: &SymMatrix<T>) -> Result<Cholesky<T>> {
    let n = s.dim();
    let threshold = T::lit(1e-12) * (s.trace() / T::of_usize(n)).abs();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = s.get(j, j);
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > threshold) {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: diag.as_f64(),
                threshold: threshold.as_f64(),
            });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(Cholesky { l })
}

impl<T: Real> Cholesky<T> {
    pub fn factor(&self) -> &Matrix<T> {
        &self.l
    }

    /// Solves `S X = B` column by column.
    pub fn solve(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.l.rows();
        assert_eq!(b.rows(), n, "solve: right-hand side has wrong row count");
        let mut x = b.clone();
        for c in 0..b.cols() {
            for i in 0..n {
                let mut v = x[(i, c)];
                for k in 0..i {
                    v -= self.l[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = v / self.l[(i, i)];
            }
            for i in (0..n).rev() {
                let mut v = x[(i, c)];
                for k in (i + 1)..n {
                    v -= self.l[(k, i)] * x[(k, c)];
                }
                x[(i, c)] = v / self.l[(i, i)];
            }
        }
        x
    }
}

/// Solves `S X = B` for symmetric positive definite `S`.
pub fn solve_spd<T: Real>(s: &SymMatrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if b.rows() != s.dim() {
        return Err(Error::Dimension(format!(
            "solve_spd: {}x{} system with {}-row right-hand side",
            s.dim(),
            s.dim(),
            b.rows()
        )));
    }
    Ok(cholesky(s)?.solve(b))
}
