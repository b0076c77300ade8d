//! Tightening of a feasible relaxed point into one where every inequality is
//! active, via `V̄_t = P_{t|t+1} − P_{t+1}`.

use serde::Serialize;

use super::RelaxedSolution;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::lqg::{h_step, SystemModel};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct Tightened<T> {
    /// `V̄_t`, `t = 0..T`.
    pub v_bar: Vec<SymMatrix<T>>,
    /// `P̄_{t|t+1}`, `t = 0..T`.
    pub p_mid: Vec<SymMatrix<T>>,
    /// `K̄_{t|t+1} = P̄_{t|t+1}⁻¹`, `t = 0..T`.
    pub k_mid: Vec<SymMatrix<T>>,
    /// `P̄_t`, `t = 0..=T`.
    pub p: Vec<SymMatrix<T>>,
    /// `Σ_t tr(K̄_{t|t+1} W̄_{t−1}) + Σ_t Σ_i c_t(i) θ_t^i`.
    pub objective: T,
    pub orderings: Orderings,
}

/// Smallest eigenvalue, over all stages, of each difference that should be PSD.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Orderings {
    /// `P̄_{t|t+1} − P_{t|t+1}`.
    pub p_mid: f64,
    /// `K_{t|t+1} − K̄_{t|t+1}`.
    pub k_mid: f64,
    /// `P̄_t − P_t`.
    pub p: f64,
}

impl Orderings {
    pub fn min(&self) -> f64 {
        self.p_mid.min(self.k_mid).min(self.p)
    }
}

pub fn tighten<T: Real>(model: &SystemModel<T>, solution: &RelaxedSolution<T>) -> Result<Tightened<T>> {
    let horizon = model.horizon();
    let mut v_bar = Vec::with_capacity(horizon);
    let mut p_mid = Vec::with_capacity(horizon);
    let mut k_mid = Vec::with_capacity(horizon);
    let mut p = vec![solution.p[horizon].clone(); horizon + 1];
    let mut orderings = Orderings {
        p_mid: f64::INFINITY,
        k_mid: f64::INFINITY,
        p: f64::INFINITY,
    };
    for t in (0..horizon).rev() {
        let v = &solution.p_mid[t] - &solution.p[t + 1];
        let pm = &p[t + 1] + &v;
        let km = pm.inverse_spd().map_err(|e| Error::at_stage(t, e))?;
        let pt = h_step(model, t, &km)
            .inverse_spd()
            .map_err(|e| Error::at_stage(t, e))?;
        orderings.p_mid = orderings.p_mid.min((&pm - &solution.p_mid[t]).min_eig()?.as_f64());
        orderings.k_mid = orderings.k_mid.min((&solution.k_ref[t] - &km).min_eig()?.as_f64());
        orderings.p = orderings.p.min((&pt - &solution.p[t]).min_eig()?.as_f64());
        p[t] = pt;
        v_bar.push(v);
        p_mid.push(pm);
        k_mid.push(km);
    }
    v_bar.reverse();
    p_mid.reverse();
    k_mid.reverse();
    let objective = (0..horizon)
        .map(|t| {
            let act: T = solution.theta[t]
                .iter()
                .enumerate()
                .map(|(i, &th)| model.cost(t, i) * th)
                .sum();
            k_mid[t].trace_product(&model.w_bar(t)) + act
        })
        .sum();
    Ok(Tightened {
        v_bar,
        p_mid,
        k_mid,
        p,
        objective,
        orderings,
    })
}

impl<T: Real> Tightened<T> {
    pub fn reference_trajectory(&self) -> &[SymMatrix<T>] {
        &self.k_mid
    }
}
