//! The `g`/`h` value-matrix maps and the backward Riccati recursion they compose.

use super::{Schedule, SystemModel};
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, Matrix, SymMatrix};
use crate::scalar::Real;

/// One actuator's input matrix and control weight.
#[derive(Clone, Copy, Debug)]
pub struct ActuatorInput<'a, T> {
    pub b: &'a Matrix<T>,
    pub r: &'a SymMatrix<T>,
}

/// Joint input of a set of simultaneously active actuators: `[B_1 … B_k]`
/// and `blkdiag(R_1, …, R_k)`.
struct Combined<T> {
    b: Matrix<T>,
    r: Matrix<T>,
}

fn combine<T: Real>(n: usize, inputs: &[ActuatorInput<'_, T>]) -> Combined<T> {
    let bs: Vec<&Matrix<T>> = inputs.iter().map(|i| i.b).collect();
    let rs: Vec<&Matrix<T>> = inputs.iter().map(|i| i.r.as_matrix()).collect();
    Combined {
        b: Matrix::hcat(n, &bs),
        r: Matrix::block_diag(&rs),
    }
}

/// `S = BᵀMB + R` together with `MB`.
fn gram<T: Real>(m: &SymMatrix<T>, c: &Combined<T>) -> (SymMatrix<T>, Matrix<T>) {
    let mb = m.as_matrix().matmul(&c.b);
    let s = SymMatrix::from_symmetric_part(&c.b.tr_matmul(&mb) + &c.r);
    (s, mb)
}

/// `g(M) = M − MB(BᵀMB + R)⁻¹BᵀM`. An empty input set leaves `M` unchanged.
pub fn g_map<T: Real>(m: &SymMatrix<T>, inputs: &[ActuatorInput<'_, T>]) -> Result<SymMatrix<T>> {
    let c = combine(m.dim(), inputs);
    if c.b.cols() == 0 {
        return Ok(m.clone());
    }
    let (s, mb) = gram(m, &c);
    let x = solve_spd(&s, &mb.transpose())?;
    Ok(SymMatrix::from_symmetric_part(m.as_matrix() - &mb.matmul(&x)))
}

/// `H = I − MB(BᵀMB + R)⁻¹Bᵀ`, the kernel of the derivative `dg = H X Hᵀ`.
pub fn h_kernel<T: Real>(m: &SymMatrix<T>, inputs: &[ActuatorInput<'_, T>]) -> Result<Matrix<T>> {
    let n = m.dim();
    let c = combine(n, inputs);
    if c.b.cols() == 0 {
        return Ok(Matrix::identity(n));
    }
    let (s, mb) = gram(m, &c);
    let x = solve_spd(&s, &c.b.transpose())?;
    Ok(&Matrix::identity(n) - &mb.matmul(&x))
}

/// `L = −(BᵀKB + R)⁻¹BᵀKA`, stacked over the active actuators.
pub fn gain_matrix<T: Real>(
    k_next: &SymMatrix<T>,
    a: &Matrix<T>,
    inputs: &[ActuatorInput<'_, T>],
) -> Result<Matrix<T>> {
    let n = k_next.dim();
    let c = combine(n, inputs);
    if c.b.cols() == 0 {
        return Ok(Matrix::zeros(0, n));
    }
    let (s, kb) = gram(k_next, &c);
    let rhs = kb.tr_matmul(a);
    Ok(-&solve_spd(&s, &rhs)?)
}

/// `P + BR⁻¹Bᵀ`, the inverse-domain form of `g`.
pub fn woodbury_map<T: Real>(
    p: &SymMatrix<T>,
    inputs: &[ActuatorInput<'_, T>],
) -> Result<SymMatrix<T>> {
    let mut out = p.clone();
    for input in inputs {
        let r_inv = input.r.inverse_spd()?;
        out = &out + &r_inv.congruence_t(input.b);
    }
    Ok(out)
}

impl<T: Real> SystemModel<T> {
    pub fn inputs(&self, t: usize, actuators: &[usize]) -> Vec<ActuatorInput<'_, T>> {
        actuators
            .iter()
            .map(|&j| ActuatorInput {
                b: self.b(t, j),
                r: self.r(t, j),
            })
            .collect()
    }
}

pub fn g_step<T: Real>(
    model: &SystemModel<T>,
    t: usize,
    actuators: &[usize],
    m: &SymMatrix<T>,
) -> Result<SymMatrix<T>> {
    g_map(m, &model.inputs(t, actuators)).map_err(|e| Error::at_stage(t, e))
}

/// `h_t(M) = A_tᵀ M A_t + Q_t`.
pub fn h_step<T: Real>(model: &SystemModel<T>, t: usize, m: &SymMatrix<T>) -> SymMatrix<T> {
    &m.congruence(model.a(t)) + model.q(t)
}

pub fn gain<T: Real>(
    model: &SystemModel<T>,
    t: usize,
    actuators: &[usize],
    k_next: &SymMatrix<T>,
) -> Result<Matrix<T>> {
    gain_matrix(k_next, model.a(t), &model.inputs(t, actuators)).map_err(|e| Error::at_stage(t, e))
}

pub fn h_matrix<T: Real>(
    model: &SystemModel<T>,
    t: usize,
    actuators: &[usize],
    m: &SymMatrix<T>,
) -> Result<Matrix<T>> {
    h_kernel(m, &model.inputs(t, actuators)).map_err(|e| Error::at_stage(t, e))
}

pub fn woodbury_pform<T: Real>(
    model: &SystemModel<T>,
    t: usize,
    actuators: &[usize],
    p_next: &SymMatrix<T>,
) -> Result<SymMatrix<T>> {
    woodbury_map(p_next, &model.inputs(t, actuators)).map_err(|e| Error::at_stage(t, e))
}

/// Output of the backward recursion under a fixed schedule.
#[derive(Clone, Debug)]
pub struct RiccatiTrajectory<T> {
    /// `K_t`, `t = 0..=T`, with `K_T = Q_T`.
    pub k: Vec<SymMatrix<T>>,
    /// `K_{t|t+1} = g_t(σ(t), K_{t+1})`, `t = 0..T`.
    pub k_mid: Vec<SymMatrix<T>>,
    /// Stacked gains of the active actuators, `t = 0..T`.
    pub gains: Vec<Matrix<T>>,
    /// `tr(K_{t|t+1} W̄_{t−1})`, `t = 0..T`.
    pub stage_traces: Vec<T>,
    /// `Σ_{t=0}^{T} tr(Q_t W_{t−1})`.
    pub r: T,
}

pub fn riccati_backward<T: Real>(
    model: &SystemModel<T>,
    schedule: &Schedule,
) -> Result<RiccatiTrajectory<T>> {
    schedule.validate(model)?;
    let horizon = model.horizon();
    let mut k = vec![model.q_terminal().clone(); horizon + 1];
    let mut k_mid = Vec::with_capacity(horizon);
    let mut gains = Vec::with_capacity(horizon);
    for t in (0..horizon).rev() {
        let acts = schedule.stage(t);
        gains.push(gain(model, t, acts, &k[t + 1])?);
        let mid = g_step(model, t, acts, &k[t + 1])?;
        k[t] = h_step(model, t, &mid);
        k_mid.push(mid);
    }
    k_mid.reverse();
    gains.reverse();
    let stage_traces = k_mid
        .iter()
        .enumerate()
        .map(|(t, km)| km.trace_product(&model.w_bar(t)))
        .collect();
    Ok(RiccatiTrajectory {
        k,
        k_mid,
        gains,
        stage_traces,
        r: model.r_constant(),
    })
}

impl<T: Real> RiccatiTrajectory<T> {
    /// `Σ_{t=0}^{T} tr(K_t W_{t−1})`.
    pub fn direct_cost(&self, model: &SystemModel<T>) -> T {
        self.k
            .iter()
            .enumerate()
            .map(|(t, kt)| kt.trace_product(model.w_prev(t)))
            .sum()
    }

    /// `Σ_{t=0}^{T−1} tr(K_{t|t+1} W̄_{t−1}) + r`.
    pub fn reduced_cost(&self) -> T {
        self.stage_traces.iter().copied().sum::<T>() + self.r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lqg::TimeInvariant;

    fn m1(x: f64) -> Matrix<f64> {
        Matrix::from_rows(&[[x]]).unwrap()
    }

    fn s1(x: f64) -> SymMatrix<f64> {
        SymMatrix::from_rows(&[[x]]).unwrap()
    }

    fn scalar_model(horizon: usize) -> SystemModel<f64> {
        TimeInvariant {
            horizon,
            a: m1(1.0),
            b: vec![m1(1.0)],
            q: s1(1.0),
            q_terminal: s1(1.0),
            r: vec![s1(1.0)],
            w_init: s1(1.0),
            w: s1(1.0),
            costs: vec![0.0],
            group_size: 1,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn scalar_g_is_one_half() {
        let b = m1(1.0);
        let r = s1(1.0);
        let g = g_map(&s1(1.0), &[ActuatorInput { b: &b, r: &r }]).unwrap();
        assert!((g.get(0, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_input_matrix_leaves_m_unchanged() {
        let m = SymMatrix::from_rows(&[[2.0, 0.3], [0.3, 1.0]]).unwrap();
        let b = Matrix::zeros(2, 3);
        let r = SymMatrix::identity(3);
        let g = g_map(&m, &[ActuatorInput { b: &b, r: &r }]).unwrap();
        assert!((&g - &m).frob_norm() < 1e-15);
        assert_eq!(g_map(&m, &[]).unwrap(), m);
    }

    #[test]
    fn partial_actuation_in_two_dimensions() {
        let b = Matrix::column(&[1.0, 0.0]);
        let r = s1(1.0);
        let g = g_map(&SymMatrix::identity(2), &[ActuatorInput { b: &b, r: &r }]).unwrap();
        let expected = SymMatrix::from_diag(&[0.5, 1.0]);
        assert!((&g - &expected).frob_norm() < 1e-15);
    }

    #[test]
    fn h_with_zero_dynamics_is_q() {
        let mut parts = scalar_model(1).to_parts();
        parts.a[0] = m1(0.0);
        parts.q[0] = s1(0.7);
        let model = SystemModel::new(parts).unwrap();
        assert_eq!(h_step(&model, 0, &s1(3.0)).get(0, 0), 0.7);
        let id = scalar_model(1);
        assert_eq!(h_step(&id, 0, &s1(1.0)).get(0, 0), 2.0);
    }

    #[test]
    fn scalar_recursion_closed_form() {
        let model = scalar_model(2);
        let traj = riccati_backward(&model, &Schedule::single([0, 0])).unwrap();
        let k: Vec<f64> = traj.k.iter().map(|m| m.get(0, 0)).collect();
        let mid: Vec<f64> = traj.k_mid.iter().map(|m| m.get(0, 0)).collect();
        assert!((k[2] - 1.0).abs() < 1e-15);
        assert!((mid[1] - 0.5).abs() < 1e-15);
        assert!((k[1] - 1.5).abs() < 1e-15);
        assert!((mid[0] - 0.6).abs() < 1e-15);
        assert!((k[0] - 1.6).abs() < 1e-15);
    }

    #[test]
    fn scalar_gain() {
        let l = gain_matrix(&s1(1.0), &m1(1.0), &[ActuatorInput { b: &m1(1.0), r: &s1(1.0) }])
            .unwrap();
        assert!((l[(0, 0)] + 0.5).abs() < 1e-15);
        let empty = gain_matrix(&s1(1.0), &m1(1.0), &[]).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (0, 1));
    }

    #[test]
    fn scalar_h_kernel() {
        let h = h_kernel(&s1(1.0), &[ActuatorInput { b: &m1(1.0), r: &s1(1.0) }]).unwrap();
        assert!((h[(0, 0)] - 0.5).abs() < 1e-15);
        let b0 = Matrix::zeros(2, 1);
        let h = h_kernel(&SymMatrix::identity(2), &[ActuatorInput { b: &b0, r: &s1(1.0) }]).unwrap();
        assert_eq!(h, Matrix::identity(2));
    }

    #[test]
    fn scalar_woodbury() {
        let p = woodbury_map(&s1(1.0), &[ActuatorInput { b: &m1(1.0), r: &s1(1.0) }]).unwrap();
        assert_eq!(p.get(0, 0), 2.0);
        let g = g_map(&s1(1.0), &[ActuatorInput { b: &m1(1.0), r: &s1(1.0) }]).unwrap();
        assert!((1.0 / g.get(0, 0) - p.get(0, 0)).abs() < 1e-15);
        let b0 = Matrix::zeros(1, 1);
        let p = woodbury_map(&s1(3.0), &[ActuatorInput { b: &b0, r: &s1(1.0) }]).unwrap();
        assert_eq!(p.get(0, 0), 3.0);
    }

    #[test]
    fn memoryless_dynamics_give_k_equal_q() {
        let q = SymMatrix::from_rows(&[[2.0, 0.5], [0.5, 1.0]]).unwrap();
        let model = TimeInvariant {
            horizon: 4,
            a: Matrix::zeros(2, 2),
            b: vec![Matrix::column(&[1.0, 0.0]), Matrix::column(&[0.0, 1.0])],
            q: q.clone(),
            q_terminal: SymMatrix::identity(2),
            r: vec![s1(1.0), s1(2.0)],
            w_init: SymMatrix::identity(2),
            w: SymMatrix::identity(2),
            costs: vec![0.0, 0.0],
            group_size: 1,
        }
        .build()
        .unwrap();
        let traj = riccati_backward(&model, &Schedule::single([0, 1, 0, 1])).unwrap();
        for t in 0..4 {
            assert!((&traj.k[t] - &q).frob_norm() < 1e-15);
        }
    }

    #[test]
    fn recursion_rejects_invalid_schedule() {
        let model = scalar_model(2);
        assert!(riccati_backward(&model, &Schedule::single([0])).is_err());
        assert!(riccati_backward(&model, &Schedule::single([0, 1])).is_err());
    }
}
