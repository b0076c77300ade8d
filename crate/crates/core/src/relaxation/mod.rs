//! Convex relaxation of the scheduling problem: the discrete choice of
//! `B R⁻¹ Bᵀ` at each stage becomes a convex combination with weights `θ`,
//! and the Riccati recursion becomes a pair of LMIs per stage.

mod program;
mod solution;
mod tighten;

pub use program::{build_relaxed_program, write_program, RelaxationLayout};
pub use solution::{
    check_feasibility, extract_solution, relaxed_cost, solve_relaxation, Feasibility, RelaxedSolution,
    SolveStats,
};
pub use tighten::{tighten, Orderings, Tightened};

#[cfg(test)]
mod tests;
