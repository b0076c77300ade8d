//! Actuator scheduling for finite-horizon stochastic linear-quadratic control.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`, which is what the experiments use.

pub mod conic;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod lqg;
pub mod relaxation;
pub mod scalar;
pub mod scheduling;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix = linalg::Matrix<f64>;
pub type SymMatrix = linalg::SymMatrix<f64>;
pub type SystemModel = lqg::SystemModel<f64>;
pub type ModelParts = lqg::ModelParts<f64>;
pub type TimeInvariant = lqg::TimeInvariant<f64>;
pub type RiccatiTrajectory = lqg::RiccatiTrajectory<f64>;
pub type CostReport = lqg::CostReport<f64>;
pub type ConicProblem = conic::ConicProblem<f64>;
pub type SolverResult = conic::SolverResult<f64>;

pub use conic::{Cone, SolverSettings, SolverStatus};
pub use lqg::Schedule;
