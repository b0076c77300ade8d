use serde::{Deserialize, Serialize};

use crate::conic::{Residuals, SolverSettings, SolverStatus};
use crate::error::Result;
use crate::lqg::{cost_of_schedule, Schedule, SystemModel};
use crate::relaxation::{relaxed_cost, solve_relaxation, tighten, RelaxedSolution, Tightened};
use crate::scheduling::{
    brute_force, greedy_schedule, max_theta_schedule, sample_random, sample_schedule, suboptimality_bound,
    track_reference, BoundReport, RandomSample, ThetaTrajectory, DEFAULT_CAP,
};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub track: bool,
    pub greedy: bool,
    pub max_theta: bool,
    /// Number of random schedules to sample; 0 disables sampling.
    pub random_count: usize,
    pub seed: u64,
    /// Run brute force (and with it the suboptimality bound).
    pub brute_force: bool,
    pub cap: u128,
    pub solver: SolverSettings,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            track: true,
            greedy: true,
            max_theta: true,
            random_count: 0,
            seed: DEFAULT_SEED,
            brute_force: false,
            cap: DEFAULT_CAP,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: String,
    pub schedule: Schedule,
    pub j1: f64,
    pub j2: f64,
    pub j: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub status: SolverStatus,
    pub iterations: usize,
    pub residuals: Residuals,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxedSummary {
    /// `Σ tr(K°_{t|t+1} W̄_{t−1}) + Σ c θ`.
    pub objective: f64,
    /// `objective + r`, a lower bound on `J` over all schedules.
    pub lower_bound: f64,
    /// Objective after tightening.
    pub tightened_objective: f64,
    /// `theta[t][i]`, actuator `i + 1`.
    pub theta: Vec<Vec<f64>>,
    pub theta_means: Vec<f64>,
    pub solver: SolverStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomStats {
    pub count: usize,
    pub seed: u64,
    pub min_j: f64,
    pub min_j1: f64,
    pub mean_j: f64,
    pub max_j: f64,
    /// Index of the first sample attaining `min_j`.
    pub argmin: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub model: String,
    pub seed: u64,
    pub horizon: usize,
    pub state_dim: usize,
    pub num_actuators: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: Metadata,
    /// Schedule-independent part of `J1`.
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxed: Option<RelaxedSummary>,
    pub methods: Vec<MethodResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundReport>,
}

impl ExperimentReport {
    pub fn empty(model: &SystemModel<f64>, name: &str, seed: u64) -> Self {
        Self {
            metadata: Metadata {
                version: env!("CARGO_PKG_VERSION").to_string(),
                model: name.to_string(),
                seed,
                horizon: model.horizon(),
                state_dim: model.state_dim(),
                num_actuators: model.num_actuators(),
            },
            r: model.r_constant(),
            relaxed: None,
            methods: Vec::new(),
            random: None,
            bound: None,
        }
    }

    pub fn method(&self, name: &str) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.method == name)
    }
}

pub fn evaluate(model: &SystemModel<f64>, method: &str, schedule: Schedule) -> Result<MethodResult> {
    let c = cost_of_schedule(model, &schedule)?;
    Ok(MethodResult {
        method: method.to_string(),
        schedule,
        j1: c.j1,
        j2: c.j2,
        j: c.j,
    })
}

/// Full pipeline output; the report plus the objects it was built from.
pub struct PipelineOutput {
    pub report: ExperimentReport,
    pub relaxed: RelaxedSolution<f64>,
    pub tightened: Tightened<f64>,
    pub samples: Option<RandomSample>,
}

pub fn run_pipeline(model: &SystemModel<f64>, name: &str, config: &PipelineConfig) -> Result<PipelineOutput> {
    let mut report = ExperimentReport::empty(model, name, config.seed);
    let relaxed = solve_relaxation(model, &config.solver)?;
    let tightened = tighten(model, &relaxed)?;
    report.relaxed = Some(RelaxedSummary {
        objective: relaxed_cost(model, &relaxed),
        lower_bound: relaxed.objective + report.r,
        tightened_objective: tightened.objective,
        theta: relaxed.theta.clone(),
        theta_means: relaxed.theta_means(),
        solver: SolverStats {
            status: relaxed.stats.status,
            iterations: relaxed.stats.iterations,
            residuals: relaxed.stats.residuals,
        },
    });

    let tracked = track_reference(model, &relaxed.k_ref)?;
    if config.track {
        report.methods.push(evaluate(model, "track", tracked.clone())?);
    }
    if config.greedy {
        report.methods.push(evaluate(model, "greedy", greedy_schedule(model)?)?);
    }
    if config.max_theta {
        report
            .methods
            .push(evaluate(model, "maxtheta", max_theta_schedule(model, &relaxed))?);
    }
    let mut samples = None;
    if config.random_count > 0 {
        let s = sample_random(model, config.random_count, config.seed)?;
        let sum = s.summary();
        report.random = Some(RandomStats {
            count: s.len(),
            seed: config.seed,
            min_j: sum.min,
            min_j1: s.summary_j1().min,
            mean_j: sum.mean,
            max_j: sum.max,
            argmin: sum.argmin,
        });
        let best = sample_schedule(model, config.seed, sum.argmin as u64);
        report.methods.push(evaluate(model, "random", best)?);
        samples = Some(s);
    }
    if config.brute_force {
        let bf = brute_force(model, config.cap)?;
        let theta = ThetaTrajectory::from_tightened(model, &tightened)?;
        report.bound = Some(suboptimality_bound(model, &tracked, &theta, Some(&bf.schedule))?);
        report.methods.push(evaluate(model, "brute", bf.schedule)?);
    }
    Ok(PipelineOutput {
        report,
        relaxed,
        tightened,
        samples,
    })
}
