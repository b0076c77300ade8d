//! Encoding of the relaxed scheduling problem as a standard-form conic program.

use std::io::Write;

use crate::conic::{Cone, ConicProblem, SparseMatrix};
use crate::error::{Error, Result};
use crate::linalg::{svec, svec_index, svec_len, Matrix, SymMatrix};
use crate::lqg::SystemModel;
use crate::scalar::Real;

/// Where each decision variable and constraint block lives.
///
/// Per stage `t` the variables are, in order: `θ_t` (N), `svec K_{t|t+1}`,
/// `svec P_{t|t+1}`, `svec P_t`. `P_T = Q_T⁻¹` is a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxationLayout {
    pub horizon: usize,
    pub state_dim: usize,
    pub num_actuators: usize,
    /// Rows of the zero cone, then the nonnegative cone.
    pub zero_rows: usize,
    pub nonneg_rows: usize,
}

impl RelaxationLayout {
    pub fn svec_len(&self) -> usize {
        svec_len(self.state_dim)
    }

    pub fn stage_vars(&self) -> usize {
        self.num_actuators + 3 * self.svec_len()
    }

    pub fn num_vars(&self) -> usize {
        self.horizon * self.stage_vars()
    }

    pub fn theta(&self, t: usize, i: usize) -> usize {
        t * self.stage_vars() + i
    }

    pub fn k(&self, t: usize, e: usize) -> usize {
        t * self.stage_vars() + self.num_actuators + e
    }

    pub fn p_mid(&self, t: usize, e: usize) -> usize {
        self.k(t, e) + self.svec_len()
    }

    pub fn p(&self, t: usize, e: usize) -> usize {
        self.k(t, e) + 2 * self.svec_len()
    }

    /// First row of stage `t`'s two PSD blocks.
    pub fn lmi_rows(&self, t: usize) -> (usize, usize) {
        let block = svec_len(2 * self.state_dim);
        let base = self.zero_rows + self.nonneg_rows + 2 * t * block;
        (base, base + block)
    }
}

/// svec position of entry `(r, c)` of a `2n×2n` block; `None` above the diagonal.
fn block_pos(n: usize, r: usize, c: usize) -> Option<usize> {
    (r >= c).then(|| svec_index(2 * n, r, c))
}

/// `[[X, Y], [Yᵀ, Z]]`.
pub(crate) fn blocks<T: Real>(x: &Matrix<T>, y: &Matrix<T>, z: &Matrix<T>) -> SymMatrix<T> {
    let n = x.rows();
    SymMatrix::from_symmetric_part(Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => x[(i, j)],
        (true, false) => y[(i, j - n)],
        (false, true) => y[(j, i - n)],
        (false, false) => z[(i - n, j - n)],
    }))
}

pub fn build_relaxed_program<T: Real>(
    model: &SystemModel<T>,
) -> Result<(ConicProblem<T>, RelaxationLayout)> {
    let horizon = model.horizon();
    let n = model.state_dim();
    let na = model.num_actuators();
    let ns = svec_len(n);
    let nonneg_rows: usize = (0..horizon)
        .map(|t| if model.group_size(t) > 1 { 2 * na } else { na })
        .sum();
    let layout = RelaxationLayout {
        horizon,
        state_dim: n,
        num_actuators: na,
        zero_rows: horizon * (ns + 1),
        nonneg_rows,
    };
    let one = T::one();
    let mut trip: Vec<(usize, usize, T)> = Vec::new();
    let mut b: Vec<T> = Vec::new();

    let p_terminal = model
        .q_terminal()
        .inverse_spd()
        .map_err(|e| Error::model("q_terminal", e.to_string()))?;
    let p_terminal = svec(&p_terminal);

    // P_{t|t+1} − P_{t+1} − Σ_i θ_t^i V_t(i) = 0, and Σ_i θ_t^i = N_t
    for t in 0..horizon {
        let v: Vec<Vec<T>> = (0..na)
            .map(|i| model.v(t, i).map(|v| svec(&v)))
            .collect::<Result<_>>()?;
        for e in 0..ns {
            let row = b.len();
            trip.push((row, layout.p_mid(t, e), one));
            if t + 1 < horizon {
                trip.push((row, layout.p(t + 1, e), -one));
                b.push(T::zero());
            } else {
                b.push(p_terminal[e]);
            }
            for (i, vi) in v.iter().enumerate() {
                if vi[e] != T::zero() {
                    trip.push((row, layout.theta(t, i), -vi[e]));
                }
            }
        }
        let row = b.len();
        for i in 0..na {
            trip.push((row, layout.theta(t, i), one));
        }
        b.push(T::of_usize(model.group_size(t)));
    }

    // θ ≥ 0 always; θ ≤ 1 only when it is not implied by the simplex row
    for t in 0..horizon {
        for i in 0..na {
            trip.push((b.len(), layout.theta(t, i), -one));
            b.push(T::zero());
        }
        if model.group_size(t) > 1 {
            for i in 0..na {
                trip.push((b.len(), layout.theta(t, i), one));
                b.push(one);
            }
        }
    }

    let mut cones = vec![Cone::Zero(layout.zero_rows), Cone::NonNeg(layout.nonneg_rows)];
    let eye = Matrix::<T>::identity(n);
    let zero = Matrix::<T>::zeros(n, n);
    for t in 0..horizon {
        // [[K, I], [I, P_{t|t+1}]] ⪰ 0
        let base = b.len();
        b.extend(svec(&blocks(&zero, &eye, &zero)));
        for c in 0..n {
            for r in c..n {
                let e = svec_index(n, r, c);
                let row = base + block_pos(n, r, c).expect("lower");
                trip.push((row, layout.k(t, e), -one));
                let row = base + block_pos(n, r + n, c + n).expect("lower");
                trip.push((row, layout.p_mid(t, e), -one));
            }
        }
        cones.push(Cone::Psd(2 * n));

        // [[Q⁻¹ − P_t, Q⁻¹Aᵀ], [AQ⁻¹, P_{t|t+1} + AQ⁻¹Aᵀ]] ⪰ 0
        let q_inv = model
            .q(t)
            .inverse_spd()
            .map_err(|e| Error::model(format!("q[{t}]"), e.to_string()))?;
        let a = model.a(t);
        let qa = q_inv.as_matrix().matmul(&a.transpose());
        let aqa = q_inv.congruence_t(a);
        let base = b.len();
        b.extend(svec(&blocks(q_inv.as_matrix(), &qa, aqa.as_matrix())));
        for c in 0..n {
            for r in c..n {
                let e = svec_index(n, r, c);
                let row = base + block_pos(n, r, c).expect("lower");
                trip.push((row, layout.p(t, e), one));
                let row = base + block_pos(n, r + n, c + n).expect("lower");
                trip.push((row, layout.p_mid(t, e), -one));
            }
        }
        cones.push(Cone::Psd(2 * n));
    }

    let mut c = vec![T::zero(); layout.num_vars()];
    for t in 0..horizon {
        for (e, w) in svec(&model.w_bar(t)).into_iter().enumerate() {
            c[layout.k(t, e)] = w;
        }
        for i in 0..na {
            c[layout.theta(t, i)] = model.cost(t, i);
        }
    }

    let a = SparseMatrix::from_triplets(b.len(), layout.num_vars(), &trip)?;
    Ok((ConicProblem::new(c, a, b, cones)?, layout))
}

/// Plain-text dump of a conic program, one record per line:
///
/// ```text
/// cone <id> <kind> <size>
/// A <cone id> <row> <col> <value>
/// b <cone id> <row> <value>
/// c <col> <value>
/// ```
///
/// Rows and columns are 0-based and global; `size` is the row count for
/// zero/nonneg cones and the matrix order for PSD cones. Zero entries of
/// `b` and `c` are omitted.
pub fn write_program<T: Real>(problem: &ConicProblem<T>, mut out: impl Write) -> std::io::Result<()> {
    let offsets = problem.cone_offsets();
    let mut cone_of_row = vec![0; problem.num_rows()];
    for (id, (k, off)) in offsets.iter().enumerate() {
        let size = match *k {
            Cone::Zero(s) | Cone::NonNeg(s) | Cone::Psd(s) => s,
        };
        writeln!(out, "cone {id} {} {size}", k.label())?;
        cone_of_row[*off..*off + k.rows()].fill(id);
    }
    for (i, j, v) in problem.a.triplets() {
        writeln!(out, "A {} {i} {j} {v:e}", cone_of_row[i])?;
    }
    for (i, v) in problem.b.iter().enumerate() {
        if *v != T::zero() {
            writeln!(out, "b {} {i} {v:e}", cone_of_row[i])?;
        }
    }
    for (j, v) in problem.c.iter().enumerate() {
        if *v != T::zero() {
            writeln!(out, "c {j} {v:e}")?;
        }
    }
    Ok(())
}
