//! Computable suboptimality certificate for the tracking schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::lqg::{g_step, h_matrix, riccati_backward, Schedule, SystemModel};
use crate::relaxation::Tightened;
use crate::scalar::Real;

/// Value matrices of the relaxed optimum along the exact recursion.
#[derive(Clone, Debug)]
pub struct ThetaTrajectory<T> {
    /// `K_{t+1}(θ*)`, `t = 0..T`; the last entry is `Q_T`.
    pub k_next: Vec<SymMatrix<T>>,
    /// `K_{t|t+1}(θ*)`, `t = 0..T`.
    pub k_mid: Vec<SymMatrix<T>>,
}

impl<T: Real> ThetaTrajectory<T> {
    pub fn from_tightened(model: &SystemModel<T>, tight: &Tightened<T>) -> Result<Self> {
        let horizon = model.horizon();
        let mut k_next = Vec::with_capacity(horizon);
        for t in 0..horizon {
            if t + 1 == horizon {
                k_next.push(model.q_terminal().clone());
            } else {
                k_next.push(tight.p[t + 1].inverse_spd().map_err(|e| Error::at_stage(t + 1, e))?);
            }
        }
        Ok(Self {
            k_next,
            k_mid: tight.k_mid.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `‖A_{t+1}‖₂² ‖H_t(σ*(t), K_{t+1}(θ*))‖₂²`.
    pub lambda_t: Vec<f64>,
    pub lambda: f64,
    /// `‖g_t(σ*(t), K_{t+1}(θ*)) − K_{t|t+1}(θ*)‖_F`.
    pub beta_t: Vec<f64>,
    /// `‖K_{t|t+1}(θ*) − K_{t|t+1}(σ*)‖_F`.
    pub mismatch_t: Vec<f64>,
    /// `max_t ‖W̄_{t−1}‖_F`.
    pub w_bar_norm: f64,
    pub epsilon: f64,
    /// `Σ_{t=0}^{T} tr(K_t W_{t−1})` under σ and σ*.
    pub j1_sigma: f64,
    pub j1_star: f64,
    /// `j1_sigma ≤ j1_star + epsilon`.
    pub holds: bool,
    pub sigma: Schedule,
    pub sigma_star: Schedule,
}

/// `(λ^{t+1} − 1)/(λ − 1)`, or its limit `t + 1` when `|λ − 1| ≤ 1e-9`.
pub fn geometric_factor(lambda: f64, t: usize) -> f64 {
    if (lambda - 1.0).abs() <= 1e-9 {
        (t + 1) as f64
    } else {
        (lambda.powi(t as i32 + 1) - 1.0) / (lambda - 1.0)
    }
}

fn epsilon(w_bar_norm: f64, lambda: f64, beta: &[f64], mismatch: &[f64]) -> f64 {
    let geo: f64 = beta
        .iter()
        .enumerate()
        .map(|(t, &b)| geometric_factor(lambda, t) * b)
        .sum();
    w_bar_norm * (geo + mismatch.iter().sum::<f64>())
}

impl BoundReport {
    /// Recomputes `epsilon` from the stored per-stage components.
    pub fn recompute_epsilon(&self) -> f64 {
        epsilon(self.w_bar_norm, self.lambda, &self.beta_t, &self.mismatch_t)
    }
}

pub fn suboptimality_bound<T: Real>(
    model: &SystemModel<T>,
    sigma: &Schedule,
    theta: &ThetaTrajectory<T>,
    sigma_star: Option<&Schedule>,
) -> Result<BoundReport> {
    let sigma_star = sigma_star.ok_or(Error::MissingOptimalSchedule)?;
    let horizon = model.horizon();
    if theta.k_next.len() != horizon || theta.k_mid.len() != horizon {
        return Err(Error::Dimension(format!(
            "relaxed trajectory must have {horizon} stages"
        )));
    }
    let star = riccati_backward(model, sigma_star)?;
    let ours = riccati_backward(model, sigma)?;
    let mut lambda_t = Vec::with_capacity(horizon);
    let mut beta_t = Vec::with_capacity(horizon);
    let mut mismatch_t = Vec::with_capacity(horizon);
    let mut w_bar_norm = 0.0f64;
    for t in 0..horizon {
        let acts = sigma_star.stage(t);
        let k_next = &theta.k_next[t];
        let a_norm = model.a(t + 1).operator_norm()?.as_f64();
        let h_norm = h_matrix(model, t, acts, k_next)?.operator_norm()?.as_f64();
        lambda_t.push(a_norm * a_norm * h_norm * h_norm);
        let g = g_step(model, t, acts, k_next)?;
        beta_t.push((&g - &theta.k_mid[t]).frob_norm().as_f64());
        mismatch_t.push((&theta.k_mid[t] - &star.k_mid[t]).frob_norm().as_f64());
        w_bar_norm = w_bar_norm.max(model.w_bar(t).frob_norm().as_f64());
    }
    let lambda = lambda_t.iter().copied().fold(0.0, f64::max);
    let eps = epsilon(w_bar_norm, lambda, &beta_t, &mismatch_t);
    let j1_sigma = ours.direct_cost(model).as_f64();
    let j1_star = star.direct_cost(model).as_f64();
    Ok(BoundReport {
        lambda_t,
        lambda,
        beta_t,
        mismatch_t,
        w_bar_norm,
        epsilon: eps,
        j1_sigma,
        j1_star,
        holds: j1_sigma <= j1_star + eps,
        sigma: sigma.clone(),
        sigma_star: sigma_star.clone(),
    })
}
