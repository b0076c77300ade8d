use super::*;
use crate::conic::{residuals, Cone, SolverSettings, SolverStatus};
use crate::linalg::{Matrix, SymMatrix};
use crate::lqg::{riccati_backward, Schedule, SystemModel, TimeInvariant};

fn one(x: f64) -> Matrix<f64> {
    Matrix::from_rows(&[[x]]).unwrap()
}

fn sym(x: f64) -> SymMatrix<f64> {
    SymMatrix::from_rows(&[[x]]).unwrap()
}

fn scalar(horizon: usize) -> SystemModel<f64> {
    TimeInvariant {
        horizon,
        a: one(1.0),
        b: vec![one(1.0)],
        q: sym(1.0),
        q_terminal: sym(1.0),
        r: vec![sym(1.0)],
        w_init: sym(1.0),
        w: sym(1.0),
        costs: vec![0.0],
        group_size: 1,
    }
    .build()
    .unwrap()
}

fn two_state(actuators: usize, group: usize) -> SystemModel<f64> {
    let b = [
        Matrix::column(&[1.0, 0.0]),
        Matrix::column(&[0.0, 1.0]),
        Matrix::column(&[0.6, 0.6]),
    ];
    TimeInvariant {
        horizon: 4,
        a: Matrix::from_rows(&[[0.9, 0.3], [-0.2, 1.1]]).unwrap(),
        b: b[..actuators].to_vec(),
        q: SymMatrix::from_diag(&[1.0, 0.5]),
        q_terminal: SymMatrix::identity(2),
        r: vec![sym(1.0); actuators],
        w_init: SymMatrix::identity(2),
        w: SymMatrix::from_diag(&[0.3, 0.2]),
        costs: vec![0.0; actuators],
        group_size: group,
    }
    .build()
    .unwrap()
}

fn settings() -> SolverSettings {
    SolverSettings::with_tolerance(1e-9)
}

#[test]
fn program_dimensions() {
    let model = two_state(3, 1);
    let (p, layout) = build_relaxed_program(&model).unwrap();
    assert_eq!(p.num_vars(), 4 * (3 + 3 * 3));
    assert_eq!(layout.zero_rows, 4 * (3 + 1));
    assert_eq!(layout.nonneg_rows, 4 * 3);
    let psd: Vec<_> = p.cones.iter().filter(|k| matches!(k, Cone::Psd(4))).collect();
    assert_eq!(psd.len(), 8);
    let (_, layout) = build_relaxed_program(&two_state(3, 2)).unwrap();
    assert_eq!(layout.nonneg_rows, 4 * 6);
}

#[test]
fn one_stage_scalar_by_hand() {
    // P_{0|1} = Q_T⁻¹ + 1 = 2, so K_{0|1} ≥ 1/2 and the optimum is 1/2
    let model = scalar(1);
    let sol = solve_relaxation(&model, &settings()).unwrap();
    assert_eq!(sol.stats.status, SolverStatus::Solved);
    assert!((sol.objective - 0.5).abs() < 1e-7);
    assert!((sol.theta[0][0] - 1.0).abs() < 1e-8);
}

#[test]
fn single_actuator_relaxation_is_exact() {
    let model = two_state(1, 1);
    let sol = solve_relaxation(&model, &settings()).unwrap();
    let traj = riccati_backward(&model, &Schedule::constant(4, &[0])).unwrap();
    for t in 0..4 {
        assert!((sol.theta[t][0] - 1.0).abs() < 1e-7);
        assert!((&sol.k_ref[t] - &traj.k_mid[t]).max_abs() < 1e-5);
    }
    let exact = traj.reduced_cost() - traj.r;
    assert!((relaxed_cost(&model, &sol) - exact).abs() < 1e-6 * (1.0 + exact));
    let tight = tighten(&model, &sol).unwrap();
    for t in 0..4 {
        assert!((&tight.k_mid[t] - &traj.k_mid[t]).max_abs() < 1e-5);
    }
}

#[test]
fn zero_noise_costs_nothing() {
    let mut parts = two_state(2, 1).to_parts();
    parts.w_init = SymMatrix::zeros(2);
    parts.w = vec![SymMatrix::zeros(2); 4];
    let model = SystemModel::new(parts).unwrap();
    let sol = solve_relaxation(&model, &SolverSettings::default()).unwrap();
    assert!(relaxed_cost(&model, &sol).abs() < 1e-6);
}

#[test]
fn solution_is_feasible_and_consistent() {
    let model = two_state(3, 1);
    let (p, layout) = build_relaxed_program(&model).unwrap();
    let result = crate::conic::solve(&p, &settings()).unwrap();
    let sol = extract_solution(&model, &p, &layout, &result).unwrap();
    assert!(sol.feasibility.holds(1e-6), "{:?}", sol.feasibility);
    assert!((relaxed_cost(&model, &sol) - sol.objective).abs() < 1e-8);
    // the re-packed vector reproduces the solver's residuals
    let x = sol.to_vector(&layout);
    let again = residuals(&p, &x, &result.y, &result.s);
    assert!((again.primal - result.residuals.primal).abs() < 1e-12);
    let tight = tighten(&model, &sol).unwrap();
    assert!(tight.orderings.min() >= -1e-7, "{:?}", tight.orderings);
    assert!(tight.objective <= sol.objective + 1e-6 * (1.0 + sol.objective.abs()));
}

#[test]
fn lower_bound_against_every_schedule() {
    let model = two_state(2, 1);
    let sol = solve_relaxation(&model, &settings()).unwrap();
    let r = model.r_constant();
    for code in 0..16usize {
        let s = Schedule::single((0..4).map(|t| (code >> t) & 1));
        let j = crate::lqg::cost_of_schedule(&model, &s).unwrap().j;
        assert!(sol.objective + r <= j + 1e-6 * (1.0 + j));
    }
}

#[test]
fn tighten_fixes_a_tight_point() {
    // a single-actuator Riccati trajectory is tight in every constraint
    let model = two_state(1, 1);
    let traj = riccati_backward(&model, &Schedule::constant(4, &[0])).unwrap();
    let p: Vec<SymMatrix<f64>> = traj.k.iter().map(|k| k.inverse_spd().unwrap()).collect();
    let p_mid: Vec<SymMatrix<f64>> = traj.k_mid.iter().map(|k| k.inverse_spd().unwrap()).collect();
    let theta = vec![vec![1.0]; 4];
    let feasibility = check_feasibility(&model, &theta, &traj.k_mid, &p_mid, &p).unwrap();
    let sol = RelaxedSolution {
        theta,
        k_ref: traj.k_mid.clone(),
        p_mid,
        p,
        objective: 0.0,
        stats: SolveStats {
            status: SolverStatus::Solved,
            iterations: 0,
            residuals: Default::default(),
            log: Vec::new(),
        },
        feasibility,
    };
    let tight = tighten(&model, &sol).unwrap();
    for t in 0..4 {
        assert!((&tight.k_mid[t] - &traj.k_mid[t]).max_abs() < 1e-12);
        assert!((&tight.p[t] - &sol.p[t]).max_abs() < 1e-12);
    }
}

#[test]
fn dump_format() {
    let (p, _) = build_relaxed_program(&scalar(1)).unwrap();
    let mut buf = Vec::new();
    write_program(&p, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("cone 0 zero 2\ncone 1 nonneg 1\ncone 2 psd 2\ncone 3 psd 2\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("A ")).count(), p.a.nnz());
}
