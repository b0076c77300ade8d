//! Dense linear algebra for the small symmetric matrices used throughout:
//! eigendecomposition, PSD projection, symmetric vectorization and SPD solves.

mod chol;
mod eig;
mod matrix;
mod svec;
mod sym;

pub use chol::{cholesky, solve_spd, Cholesky};
pub use eig::{psd_project, sym_eig, EigenDecomposition};
pub use matrix::Matrix;
pub use svec::{smat, svec, svec_dim, svec_index, svec_len};
pub use sym::SymMatrix;

use crate::error::Result;
use crate::scalar::Real;

pub fn frob_norm<T: Real>(m: &Matrix<T>) -> T {
    m.frob_norm()
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn spectral_norm<T: Real>(s: &SymMatrix<T>) -> Result<T> {
    s.spectral_norm()
}

pub fn min_eig<T: Real>(s: &SymMatrix<T>) -> Result<T> {
    s.min_eig()
}
