use std::ops::{Add, Sub};

use super::{cholesky, sym_eig, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense symmetric matrix, stored as its symmetric part `(S + Sᵀ)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T>(Matrix<T>);

impl<T: Real> SymMatrix<T> {
    /// Validates symmetry: `max |S_ij - S_ji| <= 1e-12 * (1 + max |S|)`.
    pub fn try_new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::Dimension(format!(
                "symmetric matrix must be square and non-empty, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::Dimension("matrix has non-finite entries".into()));
        }
        let n = m.rows();
        let mut asym = T::zero();
        for i in 0..n {
            for j in 0..i {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        let tol = T::lit(1e-12) * (T::one() + m.max_abs());
        if asym > tol {
            return Err(Error::NotSymmetric {
                asymmetry: asym.as_f64(),
            });
        }
        Ok(Self::from_symmetric_part(m))
    }

    /// Keeps `(M + Mᵀ)/2` without checking how asymmetric `M` was.
    pub fn from_symmetric_part(m: Matrix<T>) -> Self {
        assert!(m.is_square(), "symmetric part of a non-square matrix");
        let n = m.rows();
        let half = T::lit(0.5);
        let mut out = m;
        for i in 0..n {
            for j in 0..i {
                let v = half * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Self(out)
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        Self::try_new(Matrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn scaled_identity(n: usize, s: T) -> Self {
        Self(Matrix::identity(n).scale(s))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    pub fn from_diag(d: &[T]) -> Self {
        Self(Matrix::from_diag(d))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    #[inline]
    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.0[(i, j)]
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale(s))
    }

    /// `Aᵀ S A` for a general `A` with `rows(A) == dim(S)`.
    pub fn congruence(&self, a: &Matrix<T>) -> Self {
        Self::from_symmetric_part(a.tr_matmul(&self.0.matmul(a)))
    }

    /// `A S Aᵀ`.
    pub fn congruence_t(&self, a: &Matrix<T>) -> Self {
        Self::from_symmetric_part(a.matmul(&self.0).matmul(&a.transpose()))
    }

    /// `tr(S X)` for symmetric `X`; equals the Frobenius inner product.
    pub fn trace_product(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim());
        self.0
            .as_slice()
            .iter()
            .zip(other.0.as_slice())
            .map(|(&a, &b)| a * b)
            .sum()
    }

    pub fn trace(&self) -> T {
        self.0.trace()
    }

    pub fn frob_norm(&self) -> T {
        self.0.frob_norm()
    }

    pub fn max_abs(&self) -> T {
        self.0.max_abs()
    }

    pub fn min_eig(&self) -> Result<T> {
        Ok(sym_eig(self)?.eigenvalues[0])
    }

    pub fn max_eig(&self) -> Result<T> {
        Ok(*sym_eig(self)?.eigenvalues.last().expect("dim >= 1"))
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<T> {
        let e = sym_eig(self)?;
        Ok(e.eigenvalues[0].abs().max(e.eigenvalues[e.eigenvalues.len() - 1].abs()))
    }

    /// Inverse via Cholesky; fails when the matrix is not positive definite.
    pub fn inverse_spd(&self) -> Result<Self> {
        let chol = cholesky(self)?;
        Ok(Self::from_symmetric_part(chol.solve(&Matrix::identity(self.dim()))))
    }

    pub fn cast<U: Real>(&self) -> SymMatrix<U> {
        SymMatrix(self.0.cast())
    }
}

impl<T: Real> Add for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn add(self, rhs: Self) -> SymMatrix<T> {
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl<T: Real> Sub for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn sub(self, rhs: Self) -> SymMatrix<T> {
        SymMatrix(&self.0 - &rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes_within_tolerance() {
        let m = Matrix::from_rows(&[[1.0, 2.0 + 1e-14], [2.0, 3.0]]).unwrap();
        let s = SymMatrix::try_new(m).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn clearly_asymmetric_is_rejected() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [2.1, 3.0]]).unwrap();
        assert!(matches!(
            SymMatrix::try_new(m),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn empty_is_rejected() {
        assert!(SymMatrix::<f64>::try_new(Matrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let s = SymMatrix::from_diag(&[3.0f64, -5.0]);
        assert!((s.spectral_norm().unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn frob_norm_of_identity() {
        let s = SymMatrix::<f64>::identity(2);
        assert!((s.frob_norm() - 2f64.sqrt()).abs() < 1e-15);
    }
}
