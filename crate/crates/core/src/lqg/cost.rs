use serde::Serialize;

use super::{riccati_backward, RiccatiTrajectory, Schedule, SystemModel};
use crate::error::Result;
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize)]
pub struct CostReport<T> {
    /// Quadratic cost, from the reduced form `Σ tr(K_{t|t+1} W̄_{t-1}) + r`.
    pub j1: T,
    /// Quadratic cost from `Σ_{t=0}^{T} tr(K_t W_{t-1})`.
    pub j1_direct: T,
    /// Actuation cost.
    pub j2: T,
    pub j: T,
    pub r: T,
    pub stage_traces: Vec<T>,
}

pub fn actuation_cost<T: Real>(model: &SystemModel<T>, schedule: &Schedule) -> T {
    schedule
        .stages()
        .iter()
        .enumerate()
        .map(|(t, s)| s.iter().map(|&j| model.cost(t, j)).sum::<T>())
        .sum()
}

pub fn cost_from_trajectory<T: Real>(
    model: &SystemModel<T>,
    schedule: &Schedule,
    traj: &RiccatiTrajectory<T>,
) -> CostReport<T> {
    let j1 = traj.reduced_cost();
    let j2 = actuation_cost(model, schedule);
    CostReport {
        j1,
        j1_direct: traj.direct_cost(model),
        j2,
        j: j1 + j2,
        r: traj.r,
        stage_traces: traj.stage_traces.clone(),
    }
}

pub fn cost_of_schedule<T: Real>(model: &SystemModel<T>, schedule: &Schedule) -> Result<CostReport<T>> {
    let traj = riccati_backward(model, schedule)?;
    Ok(cost_from_trajectory(model, schedule, &traj))
}

/// Quadratic cost only; skips gain computation.
pub fn quadratic_cost<T: Real>(model: &SystemModel<T>, schedule: &Schedule) -> Result<T> {
    schedule.validate(model)?;
    let mut k = model.q_terminal().clone();
    let mut total = model.r_constant();
    for t in (0..model.horizon()).rev() {
        let mid = super::g_step(model, t, schedule.stage(t), &k)?;
        total += mid.trace_product(&model.w_bar(t));
        k = super::h_step(model, t, &mid);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Matrix, SymMatrix};
    use crate::lqg::TimeInvariant;

    fn scalar_model(horizon: usize, cost: f64) -> SystemModel<f64> {
        let one = |x: f64| Matrix::from_rows(&[[x]]).unwrap();
        let sym = |x: f64| SymMatrix::from_rows(&[[x]]).unwrap();
        TimeInvariant {
            horizon,
            a: one(1.0),
            b: vec![one(1.0), one(0.5)],
            q: sym(1.0),
            q_terminal: sym(1.0),
            r: vec![sym(1.0), sym(1.0)],
            w_init: sym(1.0),
            w: sym(1.0),
            costs: vec![cost, cost],
            group_size: 1,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn scalar_cost_closed_form() {
        let m = scalar_model(2, 0.0);
        let c = cost_of_schedule(&m, &Schedule::single([0, 0])).unwrap();
        assert!((c.j1 - 4.1).abs() < 1e-14);
        assert!((c.j1_direct - 4.1).abs() < 1e-14);
        assert_eq!(c.j2, 0.0);
        assert!((quadratic_cost(&m, &Schedule::single([0, 0])).unwrap() - 4.1).abs() < 1e-14);
    }

    #[test]
    fn unit_costs_sum_to_horizon() {
        let m = scalar_model(7, 1.0);
        let c = cost_of_schedule(&m, &Schedule::single([0, 1, 0, 1, 1, 0, 0])).unwrap();
        assert_eq!(c.j2, 7.0);
        assert!((c.j - c.j1 - 7.0).abs() < 1e-14);
    }
}
