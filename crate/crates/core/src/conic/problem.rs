use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::svec_len;
use crate::scalar::Real;

/// One block of the cone product, in row order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    /// `s = 0`, `k` rows.
    Zero(usize),
    /// `s ≥ 0`, `k` rows.
    NonNeg(usize),
    /// `smat(s) ⪰ 0` for a `d×d` block, `d(d+1)/2` rows in svec order.
    Psd(usize),
}

impl Cone {
    pub fn rows(self) -> usize {
        match self {
            Cone::Zero(k) | Cone::NonNeg(k) => k,
            Cone::Psd(d) => svec_len(d),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Cone::Zero(_) => "zero",
            Cone::NonNeg(_) => "nonneg",
            Cone::Psd(_) => "psd",
        }
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cone::Zero(k) => write!(f, "zero({k})"),
            Cone::NonNeg(k) => write!(f, "nonneg({k})"),
            Cone::Psd(d) => write!(f, "psd({d})"),
        }
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseMatrix<T> {
    /// Duplicate entries are summed; explicit zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, T)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::InvalidProblem(format!(
                    "entry ({i}, {j}) outside a {rows}x{cols} matrix"
                )));
            }
            sorted.push((i, j, v));
        }
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<T> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().expect("previous entry") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut m = Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        };
        m.drop_zeros();
        Ok(m)
    }

    fn drop_zeros(&mut self) {
        let mut row_ptr = vec![0; self.rows + 1];
        let mut col_idx = Vec::with_capacity(self.col_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.values[k] != T::zero() {
                    col_idx.push(self.col_idx[k]);
                    values.push(self.values[k]);
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column, value)` pairs of row `i`, ascending by column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `out = A x`.
    pub fn mul_vec_into(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.cols);
        for (i, o) in out.iter_mut().enumerate().take(self.rows) {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// `out = Aᵀ y`.
    pub fn tr_mul_vec_into(&self, y: &[T], out: &mut [T]) {
        debug_assert_eq!(y.len(), self.rows);
        out.iter_mut().for_each(|o| *o = T::zero());
        for (i, &yi) in y.iter().enumerate() {
            if yi == T::zero() {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[self.col_idx[k]] += self.values[k] * yi;
            }
        }
    }

    pub fn tr_mul_vec(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        self.tr_mul_vec_into(y, &mut out);
        out
    }

    /// `diag(row) · A · diag(col)` in place.
    pub fn scale_rows_cols(&mut self, row: &[T], col: &[T]) {
        for i in 0..self.rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                self.values[k] = self.values[k] * row[i] * col[self.col_idx[k]];
            }
        }
    }

    /// ∞-norm of each row.
    pub fn row_norms(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).fold(T::zero(), |m, (_, v)| m.max(v.abs())))
            .collect()
    }

    /// ∞-norm of each column.
    pub fn col_norms(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for (_, j, v) in self.triplets() {
            out[j] = out[j].max(v.abs());
        }
        out
    }
}

/// `minimize cᵀx  subject to  Ax + s = b,  s ∈ K`.
#[derive(Clone, Debug)]
pub struct ConicProblem<T> {
    pub c: Vec<T>,
    pub a: SparseMatrix<T>,
    pub b: Vec<T>,
    pub cones: Vec<Cone>,
}

impl<T: Real> ConicProblem<T> {
    pub fn new(c: Vec<T>, a: SparseMatrix<T>, b: Vec<T>, cones: Vec<Cone>) -> Result<Self> {
        let p = Self { c, a, b, cones };
        p.validate()?;
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let cone_rows: usize = self.cones.iter().map(|k| k.rows()).sum();
        if self.a.rows() != self.b.len() {
            return Err(Error::InvalidProblem(format!(
                "A has {} rows but b has {} entries",
                self.a.rows(),
                self.b.len()
            )));
        }
        if self.a.cols() != self.c.len() {
            return Err(Error::InvalidProblem(format!(
                "A has {} columns but c has {} entries",
                self.a.cols(),
                self.c.len()
            )));
        }
        if cone_rows != self.b.len() {
            return Err(Error::InvalidProblem(format!(
                "cones cover {cone_rows} rows but the problem has {}",
                self.b.len()
            )));
        }
        if let Some(k) = self.cones.iter().find(|k| matches!(k, Cone::Psd(0))) {
            return Err(Error::InvalidProblem(format!("empty cone {k}")));
        }
        if !self.a.is_finite()
            || !self.b.iter().all(|v| v.is_finite())
            || !self.c.iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidProblem("non-finite problem data".into()));
        }
        Ok(())
    }

    /// `(cone, first row)` for each block.
    pub fn cone_offsets(&self) -> Vec<(Cone, usize)> {
        let mut offset = 0;
        self.cones
            .iter()
            .map(|&k| {
                let o = offset;
                offset += k.rows();
                (k, o)
            })
            .collect()
    }
}
