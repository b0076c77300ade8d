//! Schedule synthesizers and the suboptimality certificate.

mod bound;
mod brute;
mod greedy;
mod random;
mod select;
mod tracking;

pub use bound::{geometric_factor, suboptimality_bound, BoundReport, ThetaTrajectory};
pub use brute::{brute_force, BruteForce, DEFAULT_CAP};
pub use greedy::greedy_schedule;
pub use random::{random_schedule, sample_random, sample_schedule, RandomSample, Summary};
pub use tracking::{max_theta_schedule, track_reference};

/// Derivative kernel of `g`: `H = I − MB(BᵀMB + R)⁻¹Bᵀ`.
pub use crate::lqg::h_matrix;

#[cfg(test)]
mod tests;
