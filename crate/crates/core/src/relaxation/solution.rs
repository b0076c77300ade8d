use serde::Serialize;

use super::program::blocks;
use super::{build_relaxed_program, RelaxationLayout};
use crate::conic::{solve, ConicProblem, LogEntry, Residuals, SolverResult, SolverSettings, SolverStatus, INACCURATE_FACTOR};
use crate::error::{Error, Result};
use crate::linalg::{smat, svec, Matrix, SymMatrix};
use crate::lqg::SystemModel;
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub status: SolverStatus,
    pub iterations: usize,
    pub residuals: Residuals,
    /// Residual history; empty unless the solver ran with `verbose`.
    #[serde(skip)]
    pub log: Vec<LogEntry>,
}

/// Independent recheck of the relaxed constraints from the unpacked matrices.
#[derive(Clone, Debug, Serialize)]
pub struct Feasibility {
    /// `max_t |Σ_i θ_t^i − N_t|`.
    pub simplex: f64,
    /// Largest violation of `0 ≤ θ ≤ 1`.
    pub bounds: f64,
    /// `max_t ‖P_{t|t+1} − P_{t+1} − Σ_i θ_t^i V_t(i)‖_max`.
    pub dynamics: f64,
    /// Smallest eigenvalue of either Schur block over all stages, divided by
    /// `1 + max |block|`.
    pub lmi_min_eig: f64,
}

impl Feasibility {
    /// Whether the recheck passes at `tol` (simplex/dynamics), `tol·1e-2`
    /// (bounds) and `-tol` (LMIs).
    pub fn holds(&self, tol: f64) -> bool {
        self.simplex <= tol && self.bounds <= tol * 1e-2 && self.dynamics <= tol && self.lmi_min_eig >= -tol
    }
}

#[derive(Clone, Debug)]
pub struct RelaxedSolution<T> {
    /// `theta[t][i]`.
    pub theta: Vec<Vec<T>>,
    /// `K°_{t|t+1}`, `t = 0..T`.
    pub k_ref: Vec<SymMatrix<T>>,
    /// `P°_{t|t+1}`, `t = 0..T`.
    pub p_mid: Vec<SymMatrix<T>>,
    /// `P°_t`, `t = 0..=T`, with `P°_T = Q_T⁻¹`.
    pub p: Vec<SymMatrix<T>>,
    /// `cᵀx`.
    pub objective: T,
    pub stats: SolveStats,
    pub feasibility: Feasibility,
}

fn schur_blocks<T: Real>(
    model: &SystemModel<T>,
    t: usize,
    k: &SymMatrix<T>,
    p_mid: &SymMatrix<T>,
    p: &SymMatrix<T>,
) -> Result<[SymMatrix<T>; 2]> {
    let eye = Matrix::identity(model.state_dim());
    let q_inv = model.q(t).inverse_spd()?;
    let a = model.a(t);
    let first = blocks(k.as_matrix(), &eye, p_mid.as_matrix());
    let top = q_inv.as_matrix() - p.as_matrix();
    let off = q_inv.as_matrix().matmul(&a.transpose());
    let bottom = p_mid.as_matrix() + q_inv.congruence_t(a).as_matrix();
    Ok([first, blocks(&top, &off, &bottom)])
}

pub fn check_feasibility<T: Real>(
    model: &SystemModel<T>,
    theta: &[Vec<T>],
    k_ref: &[SymMatrix<T>],
    p_mid: &[SymMatrix<T>],
    p: &[SymMatrix<T>],
) -> Result<Feasibility> {
    let mut f = Feasibility {
        simplex: 0.0,
        bounds: 0.0,
        dynamics: 0.0,
        lmi_min_eig: f64::INFINITY,
    };
    for t in 0..model.horizon() {
        let sum: T = theta[t].iter().copied().sum();
        f.simplex = f.simplex.max((sum.as_f64() - model.group_size(t) as f64).abs());
        for &th in &theta[t] {
            let th = th.as_f64();
            f.bounds = f.bounds.max(-th).max(th - 1.0);
        }
        let mut rhs = p[t + 1].clone();
        for (i, &th) in theta[t].iter().enumerate() {
            rhs = &rhs + &model.v(t, i)?.scale(th);
        }
        f.dynamics = f.dynamics.max((&p_mid[t] - &rhs).max_abs().as_f64());
        for block in schur_blocks(model, t, &k_ref[t], &p_mid[t], &p[t])? {
            let lam = block.min_eig()?.as_f64() / (1.0 + block.max_abs().as_f64());
            f.lmi_min_eig = f.lmi_min_eig.min(lam);
        }
    }
    Ok(f)
}

pub fn extract_solution<T: Real>(
    model: &SystemModel<T>,
    problem: &ConicProblem<T>,
    layout: &RelaxationLayout,
    result: &SolverResult<T>,
) -> Result<RelaxedSolution<T>> {
    if !result.status.is_solved() {
        return Err(Error::SolverFailed {
            status: result.status,
            primal: result.residuals.primal,
            dual: result.residuals.dual,
            gap: result.residuals.gap,
            iterations: result.iterations,
        });
    }
    let n = layout.state_dim;
    let ns = layout.svec_len();
    let x = &result.x;
    let unpack = |idx: &dyn Fn(usize) -> usize| -> Result<SymMatrix<T>> {
        let v: Vec<T> = (0..ns).map(|e| x[idx(e)]).collect();
        smat(&v, n)
    };
    let mut theta = Vec::with_capacity(layout.horizon);
    let mut k_ref = Vec::with_capacity(layout.horizon);
    let mut p_mid = Vec::with_capacity(layout.horizon);
    let mut p = Vec::with_capacity(layout.horizon + 1);
    for t in 0..layout.horizon {
        theta.push((0..layout.num_actuators).map(|i| x[layout.theta(t, i)]).collect());
        k_ref.push(unpack(&|e| layout.k(t, e))?);
        p_mid.push(unpack(&|e| layout.p_mid(t, e))?);
        p.push(unpack(&|e| layout.p(t, e))?);
    }
    p.push(model.q_terminal().inverse_spd()?);
    let objective = problem.c.iter().zip(x).map(|(&c, &v)| c * v).sum();
    let feasibility = check_feasibility(model, &theta, &k_ref, &p_mid, &p)?;
    Ok(RelaxedSolution {
        theta,
        k_ref,
        p_mid,
        p,
        objective,
        stats: SolveStats {
            status: result.status,
            iterations: result.iterations,
            residuals: result.residuals,
            log: result.log.clone(),
        },
        feasibility,
    })
}

/// Builds, solves and unpacks the relaxation in one go.
pub fn solve_relaxation<T: Real>(
    model: &SystemModel<T>,
    settings: &SolverSettings,
) -> Result<RelaxedSolution<T>> {
    let (problem, layout) = build_relaxed_program(model)?;
    let result = solve(&problem, settings)?;
    extract_solution(model, &problem, &layout, &result)
}

/// Recomputes the objective from the matrices:
/// `Σ_t tr(K°_{t|t+1} W̄_{t−1}) + Σ_t Σ_i c_t(i) θ_t^i`.
pub fn relaxed_cost<T: Real>(model: &SystemModel<T>, solution: &RelaxedSolution<T>) -> T {
    (0..model.horizon())
        .map(|t| {
            let quad = solution.k_ref[t].trace_product(&model.w_bar(t));
            let act: T = solution.theta[t]
                .iter()
                .enumerate()
                .map(|(i, &th)| model.cost(t, i) * th)
                .sum();
            quad + act
        })
        .sum()
}

impl<T: Real> RelaxedSolution<T> {
    /// Tolerance the feasibility recheck is held to for this solution's status.
    pub fn tolerance(&self, eps: f64) -> f64 {
        match self.stats.status {
            SolverStatus::SolvedInaccurate => eps * INACCURATE_FACTOR,
            _ => eps,
        }
    }

    /// Packs the solution back into the variable vector of `layout`.
    pub fn to_vector(&self, layout: &RelaxationLayout) -> Vec<T> {
        let mut x = vec![T::zero(); layout.num_vars()];
        for t in 0..layout.horizon {
            for (i, &th) in self.theta[t].iter().enumerate() {
                x[layout.theta(t, i)] = th;
            }
            for (e, v) in svec(&self.k_ref[t]).into_iter().enumerate() {
                x[layout.k(t, e)] = v;
            }
            for (e, v) in svec(&self.p_mid[t]).into_iter().enumerate() {
                x[layout.p_mid(t, e)] = v;
            }
            for (e, v) in svec(&self.p[t]).into_iter().enumerate() {
                x[layout.p(t, e)] = v;
            }
        }
        x
    }

    /// Mean of each actuator's `θ` over the horizon.
    pub fn theta_means(&self) -> Vec<f64> {
        let na = self.theta.first().map_or(0, Vec::len);
        let h = self.theta.len() as f64;
        (0..na)
            .map(|i| self.theta.iter().map(|row| row[i].as_f64()).sum::<f64>() / h)
            .collect()
    }
}
