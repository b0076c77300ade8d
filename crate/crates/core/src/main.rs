use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use actsched::experiments::{
    emit_report, evaluate, load_model, load_schedule, random_histogram, run_pipeline, run_section5,
    write_report, ExperimentReport, PipelineConfig, ReportFormat, Section5Config, DEFAULT_SEED,
};
use actsched::conic::write_log_csv;
use actsched::lqg::cost_of_schedule;
use actsched::relaxation::{relaxed_cost, solve_relaxation};
use actsched::scheduling::{
    brute_force, greedy_schedule, max_theta_schedule, sample_random, sample_schedule, track_reference,
    DEFAULT_CAP,
};
use actsched::{Error, SolverSettings, SystemModel};

const OUT_DIR_ENV: &str = "ACTSCHED_OUT_DIR";

#[derive(Parser)]
#[command(name = "actsched", version, about = "Actuator scheduling for finite-horizon LQ control")]
struct Cli {
    /// Report errors on stderr as a JSON object.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Primal, dual and gap tolerance.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iter: usize,
}

impl SolverArgs {
    fn settings(&self) -> actsched::Result<SolverSettings> {
        let s = SolverSettings {
            max_iter: self.max_iter,
            ..SolverSettings::with_tolerance(self.eps)
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args, Clone)]
struct SeedArgs {
    /// Seed for all randomness.
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArgs {
    fn resolve(&self) -> u64 {
        match self.seed {
            Some(s) => s,
            None => {
                eprintln!("seed: {DEFAULT_SEED} (default)");
                DEFAULT_SEED
            }
        }
    }
}

#[derive(Args, Clone)]
struct OutArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Method {
    Track,
    Greedy,
    Random,
    Maxtheta,
    Brute,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model file.
    Validate { model: PathBuf },
    /// Solve the relaxed scheduling program.
    Relax {
        model: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the solver residual history as CSV.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a schedule with one method.
    Schedule {
        model: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[command(flatten)]
        seed: SeedArgs,
        /// Number of random samples.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Largest schedule count brute force may enumerate.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutArgs,
    },
    /// Cost of a schedule file.
    Evaluate {
        model: PathBuf,
        schedule: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force optimum, tracking schedule and the suboptimality bound.
    Bound {
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bundled experiments.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
    /// Cost distribution of random schedules, as CSV.
    Histogram {
        model: PathBuf,
        #[arg(long)]
        count: usize,
        #[command(flatten)]
        seed: SeedArgs,
        /// Samples CSV; the distribution table goes next to it as `<stem>.cdf.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// Six-node network: tracking, baselines, restricted rerun and θ table.
    Section5 {
        /// Defaults to $ACTSCHED_OUT_DIR, then `out/section5`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 50_000)]
        count: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

fn default_dir(sub: &str) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out").join(sub))
}

fn write_json<S: Serialize>(value: &S, out: Option<&Path>) -> actsched::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes");
    text.push('\n');
    write_text(&text, out)
}

fn write_text(text: &str, out: Option<&Path>) -> actsched::Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            }
            std::fs::write(path, text).map_err(|e| io_error(path, e))
        }
        None => stdout_result(std::io::stdout().write_all(text.as_bytes())),
    }
}

fn stdout_result(r: std::io::Result<()>) -> actsched::Result<()> {
    match r {
        // a closed pipe downstream (e.g. `| head`) is not an error
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn schedule_report(
    model: &SystemModel,
    path: &Path,
    method: Method,
    seed: &SeedArgs,
    count: usize,
    cap: u128,
    solver: &SolverArgs,
) -> actsched::Result<ExperimentReport> {
    let name = path.display().to_string();
    let schedule = match method {
        Method::Greedy => evaluate(model, "greedy", greedy_schedule(model)?)?,
        Method::Brute => evaluate(model, "brute", brute_force(model, cap)?.schedule)?,
        Method::Track | Method::Maxtheta => {
            let relaxed = solve_relaxation(model, &solver.settings()?)?;
            match method {
                Method::Track => evaluate(model, "track", track_reference(model, &relaxed.k_ref)?)?,
                _ => evaluate(model, "maxtheta", max_theta_schedule(model, &relaxed))?,
            }
        }
        Method::Random => {
            let seed = seed.resolve();
            let samples = sample_random(model, count, seed)?;
            let best = samples.summary().argmin as u64;
            let mut report = ExperimentReport::empty(model, &name, seed);
            report.methods.push(evaluate(model, "random", sample_schedule(model, seed, best))?);
            return Ok(report);
        }
    };
    let mut report = ExperimentReport::empty(model, &name, seed.seed.unwrap_or(DEFAULT_SEED));
    report.methods.push(schedule);
    Ok(report)
}

fn run(cli: Cli) -> actsched::Result<()> {
    match cli.command {
        Command::Validate { model } => {
            let m = load_model(&model)?;
            println!(
                "{}: ok (horizon {}, {} states, {} actuators, {} schedules)",
                model.display(),
                m.horizon(),
                m.state_dim(),
                m.num_actuators(),
                m.schedule_count()
            );
        }
        Command::Relax {
            model,
            solver,
            log,
            out,
        } => {
            let m = load_model(&model)?;
            let mut settings = solver.settings()?;
            settings.verbose = log.is_some();
            let sol = solve_relaxation(&m, &settings)?;
            if let Some(path) = &log {
                let mut buf = Vec::new();
                write_log_csv(&sol.stats.log, &mut buf).map_err(|e| io_error(path, e))?;
                write_text(&String::from_utf8_lossy(&buf), Some(path))?;
            }
            #[derive(Serialize)]
            struct RelaxOutput<'a> {
                objective: f64,
                lower_bound: f64,
                theta: &'a [Vec<f64>],
                theta_means: Vec<f64>,
                stats: &'a actsched::relaxation::SolveStats,
            }
            write_json(
                &RelaxOutput {
                    objective: relaxed_cost(&m, &sol),
                    lower_bound: sol.objective + m.r_constant(),
                    theta: &sol.theta,
                    theta_means: sol.theta_means(),
                    stats: &sol.stats,
                },
                out.as_deref(),
            )?;
        }
        Command::Schedule {
            model,
            method,
            seed,
            count,
            cap,
            solver,
            output,
        } => {
            let m = load_model(&model)?;
            let report = schedule_report(&m, &model, method, &seed, count, cap, &solver)?;
            match &output.out {
                Some(path) => emit_report(&report, output.format, path)?,
                None => stdout_result(write_report(&report, output.format, std::io::stdout().lock()))?,
            }
        }
        Command::Evaluate { model, schedule, out } => {
            let m = load_model(&model)?;
            let s = load_schedule(&schedule)?;
            write_json(&cost_of_schedule(&m, &s)?, out.as_deref())?;
        }
        Command::Bound {
            model,
            cap,
            solver,
            out,
        } => {
            let m = load_model(&model)?;
            let config = PipelineConfig {
                greedy: false,
                max_theta: false,
                brute_force: true,
                cap,
                solver: solver.settings()?,
                ..PipelineConfig::default()
            };
            if m.schedule_count() > cap {
                return Err(Error::CapExceeded {
                    required: m.schedule_count(),
                    formula: m.schedule_count_formula(),
                    cap,
                });
            }
            let res = run_pipeline(&m, &model.display().to_string(), &config)?;
            write_json(&res.report, out.as_deref())?;
        }
        Command::Experiment {
            which:
                Experiment::Section5 {
                    out_dir,
                    count,
                    seed,
                    solver,
                },
        } => {
            let dir = out_dir.unwrap_or_else(|| default_dir("section5"));
            let config = Section5Config {
                random_count: count,
                seed: seed.resolve(),
                solver: solver.settings()?,
                out_dir: Some(dir.clone()),
            };
            let r = run_section5(&config)?;
            println!("convention: {:?}", r.convention);
            println!(
                "tracking: {:.4} (reference {:.4}, relative error {:.4})",
                r.tracking.value, r.tracking.reference, r.tracking.relative_error
            );
            if let Some(c) = &r.random_min {
                println!("random min: {:.4} (reference {:.4})", c.value, c.reference);
            }
            println!(
                "restricted {{3,4}}: {:.4} (reference {:.4})",
                r.restricted.value, r.restricted.reference
            );
            for m in &r.report.methods {
                println!("{:>9}: J1 {:.4}  J2 {:.4}  J {:.4}", m.method, m.j1, m.j2, m.j);
            }
            println!(
                "max |theta5 - theta6|: {:.3e} (zero costs {:.3e})",
                r.theta.with_costs, r.theta.without_costs
            );
            println!("wrote {} files to {}", r.files.len(), dir.display());
        }
        Command::Histogram {
            model,
            count,
            seed,
            out,
        } => {
            let m = load_model(&model)?;
            let seed = seed.resolve();
            let path = out.unwrap_or_else(|| default_dir("histogram").join("histogram.csv"));
            let h = random_histogram(&m, count, seed, &path)?;
            println!(
                "{count} samples: min {:.4}, mean {:.4}, max {:.4}",
                h.summary.min, h.summary.mean, h.summary.max
            );
            println!("wrote {} and {}", h.samples_path.display(), h.cdf_path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json_errors = cli.json_errors;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            if json_errors {
                let obj = serde_json::json!({
                    "error": e.kind(),
                    "message": e.to_string(),
                    "exit_code": code,
                });
                eprintln!("{obj}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code as u8)
        }
    }
}
