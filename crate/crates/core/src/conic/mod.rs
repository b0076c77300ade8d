mod admm;
mod cones;
mod equilibrate;
mod problem;
mod skyline;

pub use admm::{
    residuals, solve, write_log_csv, LogEntry, Residuals, SolverResult, SolverSettings, SolverStatus,
    INACCURATE_FACTOR,
};
pub use cones::{dist_inf, project_cone, project_dual_cone, psd_block_min_eigs};
pub use equilibrate::{equilibrate, Scaling};
pub use problem::{Cone, ConicProblem, SparseMatrix};
pub use skyline::{Profile, SkylineCholesky};
