//! Symmetric vectorization. The lower triangle is packed column by column
//! with off-diagonal entries scaled by √2, so `svec(A)·svec(B) = tr(AB)`.

use super::{Matrix, SymMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[inline]
pub fn svec_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Position of entry `(i, j)`, `i >= j`, in the packed vector.
#[inline]
pub fn svec_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i >= j && i < dim);
    j * (2 * dim - j + 1) / 2 + (i - j)
}

/// Order of the matrix packed into a vector of length `len`.
pub fn svec_dim(len: usize) -> Result<usize> {
    let mut d = 0;
    while svec_len(d) < len {
        d += 1;
    }
    if svec_len(d) != len || len == 0 {
        return Err(Error::Dimension(format!(
            "{len} is not a triangular number, so it is not an svec length"
        )));
    }
    Ok(d)
}

pub fn svec<T: Real>(s: &SymMatrix<T>) -> Vec<T> {
    let n = s.dim();
    let r2 = T::lit(std::f64::consts::SQRT_2);
    let mut v = Vec::with_capacity(svec_len(n));
    for j in 0..n {
        v.push(s.get(j, j));
        for i in (j + 1)..n {
            v.push(r2 * s.get(i, j));
        }
    }
    v
}

pub fn smat<T: Real>(v: &[T], dim: usize) -> Result<SymMatrix<T>> {
    if v.len() != svec_len(dim) || dim == 0 {
        return Err(Error::Dimension(format!(
            "svec of length {} does not pack a {dim}x{dim} matrix",
            v.len()
        )));
    }
    let inv_r2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut m = Matrix::zeros(dim, dim);
    let mut k = 0;
    for j in 0..dim {
        m[(j, j)] = v[k];
        k += 1;
        for i in (j + 1)..dim {
            let x = v[k] * inv_r2;
            m[(i, j)] = x;
            m[(j, i)] = x;
            k += 1;
        }
    }
    Ok(SymMatrix::from_symmetric_part(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_packing() {
        let s = SymMatrix::from_rows(&[[1.0, 2.0], [2.0, 3.0]]).unwrap();
        assert_eq!(svec(&s), vec![1.0, 2.0 * std::f64::consts::SQRT_2, 3.0]);
    }

    #[test]
    fn identity_inner_product() {
        let v = svec(&SymMatrix::<f64>::identity(3));
        let ip: f64 = v.iter().map(|x| x * x).sum();
        assert_eq!(ip, 3.0);
    }

    #[test]
    fn index_matches_packing_order() {
        for dim in 1..8 {
            let mut k = 0;
            for j in 0..dim {
                for i in j..dim {
                    assert_eq!(svec_index(dim, i, j), k, "dim {dim} ({i},{j})");
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn bad_lengths() {
        assert!(svec_dim(4).is_err());
        assert!(svec_dim(0).is_err());
        assert_eq!(svec_dim(21).unwrap(), 6);
        assert!(smat(&[1.0, 2.0], 2).is_err());
    }
}
