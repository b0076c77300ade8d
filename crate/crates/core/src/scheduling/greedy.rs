use crate::error::Result;
use crate::lqg::{g_step, h_step, Schedule, SystemModel};
use crate::scalar::Real;

use super::select::smallest_k;

/// Backward pass choosing at each stage the `N_t` actuators with the smallest
/// individual stage cost `tr(g(i, K_{t+1}) W̄_{t−1}) + c_t(i)`.
pub fn greedy_schedule<T: Real>(model: &SystemModel<T>) -> Result<Schedule> {
    let horizon = model.horizon();
    let mut k = model.q_terminal().clone();
    let mut stages = vec![Vec::new(); horizon];
    for t in (0..horizon).rev() {
        let w_bar = model.w_bar(t);
        let scores: Vec<T> = (0..model.num_actuators())
            .map(|i| Ok(g_step(model, t, &[i], &k)?.trace_product(&w_bar) + model.cost(t, i)))
            .collect::<Result<_>>()?;
        let pick = smallest_k(&scores, model.group_size(t));
        let mid = g_step(model, t, &pick, &k)?;
        k = h_step(model, t, &mid);
        stages[t] = pick;
    }
    Ok(Schedule::new(stages))
}
