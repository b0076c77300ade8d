mod cost;
mod model;
mod riccati;
mod rollout;
mod schedule;

pub use cost::{actuation_cost, cost_from_trajectory, cost_of_schedule, quadratic_cost, CostReport};
pub use model::{ModelParts, SystemModel, TimeInvariant};
pub use riccati::{
    g_map, g_step, gain, gain_matrix, h_kernel, h_matrix, h_step, riccati_backward, woodbury_map,
    woodbury_pform, ActuatorInput, RiccatiTrajectory,
};
pub use rollout::{simulate_rollout, RolloutStats};
pub use schedule::Schedule;
