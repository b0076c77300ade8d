use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::lqg::{g_step, h_step, Schedule, SystemModel};
use crate::relaxation::RelaxedSolution;
use crate::scalar::Real;

use super::select::smallest_k;

/// Backward pass choosing, at each stage, the `N_t` actuators whose
/// individual `g` update lands closest in Frobenius norm to `k_ref[t]`, then
/// committing their joint update.
pub fn track_reference<T: Real>(model: &SystemModel<T>, k_ref: &[SymMatrix<T>]) -> Result<Schedule> {
    let horizon = model.horizon();
    if k_ref.len() != horizon {
        return Err(Error::Dimension(format!(
            "reference has {} stages, model horizon is {horizon}",
            k_ref.len()
        )));
    }
    if let Some((t, k)) = k_ref.iter().enumerate().find(|(_, k)| k.dim() != model.state_dim()) {
        return Err(Error::Dimension(format!(
            "reference stage {t} is {0}x{0}, state dimension is {1}",
            k.dim(),
            model.state_dim()
        )));
    }
    let mut k = model.q_terminal().clone();
    let mut stages = vec![Vec::new(); horizon];
    for t in (0..horizon).rev() {
        let dist: Vec<T> = (0..model.num_actuators())
            .map(|i| Ok((&k_ref[t] - &g_step(model, t, &[i], &k)?).frob_norm()))
            .collect::<Result<_>>()?;
        let pick = smallest_k(&dist, model.group_size(t));
        let mid = g_step(model, t, &pick, &k)?;
        k = h_step(model, t, &mid);
        stages[t] = pick;
    }
    Ok(Schedule::new(stages))
}

/// Per stage, the `N_t` largest `θ_t^i`, ties toward the lower index.
pub fn max_theta_schedule<T: Real>(model: &SystemModel<T>, relaxed: &RelaxedSolution<T>) -> Schedule {
    Schedule::new(
        relaxed
            .theta
            .iter()
            .enumerate()
            .map(|(t, row)| {
                let neg: Vec<T> = row.iter().map(|&v| -v).collect();
                smallest_k(&neg, model.group_size(t))
            })
            .collect(),
    )
}
