use super::*;
use crate::error::Error;
use crate::linalg::{Matrix, SymMatrix};
use crate::lqg::{cost_of_schedule, riccati_backward, Schedule, SystemModel, TimeInvariant};
use crate::relaxation::{solve_relaxation, tighten};
use crate::SolverSettings;

fn sym(x: f64) -> SymMatrix<f64> {
    SymMatrix::from_rows(&[[x]]).unwrap()
}

fn model(b: Vec<Matrix<f64>>, horizon: usize, group: usize) -> SystemModel<f64> {
    let k = b.len();
    TimeInvariant {
        horizon,
        a: Matrix::from_rows(&[[0.9, 0.3], [-0.2, 1.1]]).unwrap(),
        b,
        q: SymMatrix::from_diag(&[1.0, 0.5]),
        q_terminal: SymMatrix::identity(2),
        r: vec![sym(1.0); k],
        w_init: SymMatrix::identity(2),
        w: SymMatrix::from_diag(&[0.3, 0.2]),
        costs: vec![0.0; k],
        group_size: group,
    }
    .build()
    .unwrap()
}

fn e(i: usize) -> Matrix<f64> {
    let mut v = [0.0; 2];
    v[i] = 1.0;
    Matrix::column(&v)
}

#[test]
fn single_actuator_every_method_agrees() {
    let m = model(vec![e(0)], 5, 1);
    let unique = Schedule::constant(5, &[0]);
    assert_eq!(greedy_schedule(&m).unwrap(), unique);
    assert_eq!(random_schedule(&m, 3), unique);
    assert_eq!(brute_force(&m, DEFAULT_CAP).unwrap().schedule, unique);
    let junk = vec![SymMatrix::identity(2); 5];
    assert_eq!(track_reference(&m, &junk).unwrap(), unique);
}

#[test]
fn identical_actuators_tie_to_first() {
    let m = model(vec![e(1), e(1)], 4, 1);
    assert_eq!(greedy_schedule(&m).unwrap(), Schedule::constant(4, &[0]));
    let bf = brute_force(&m, DEFAULT_CAP).unwrap();
    assert_eq!(bf.schedule, Schedule::constant(4, &[0]));
    let other = cost_of_schedule(&m, &Schedule::single([1, 0, 1, 1])).unwrap();
    assert_eq!(bf.cost.j, other.j);
}

#[test]
fn brute_force_counts_and_cap() {
    let m = model(vec![e(0), e(1)], 2, 1);
    assert_eq!(brute_force(&m, DEFAULT_CAP).unwrap().evaluated, 4);
    match brute_force(&m, 3) {
        Err(Error::CapExceeded { required, cap, .. }) => assert_eq!((required, cap), (4, 3)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn planted_schedule_is_recovered() {
    let m = model(vec![e(0), e(1), Matrix::column(&[0.7, -0.7])], 6, 1);
    let planted = Schedule::single([2, 0, 1, 1, 2, 0]);
    let traj = riccati_backward(&m, &planted).unwrap();
    assert_eq!(track_reference(&m, &traj.k_mid).unwrap(), planted);
}

#[test]
fn reference_length_is_checked() {
    let m = model(vec![e(0), e(1)], 3, 1);
    assert!(track_reference(&m, &[SymMatrix::identity(2)]).is_err());
    assert!(track_reference(&m, &vec![SymMatrix::identity(3); 3]).is_err());
}

#[test]
fn random_frequencies_are_uniform() {
    let m = model(vec![e(0), e(1)], 1, 1);
    let count = 20_000;
    let picks_first = (0..count)
        .filter(|&k| sample_schedule(&m, 11, k).stage(0) == [0])
        .count() as f64;
    let sd = (count as f64 * 0.25).sqrt();
    assert!((picks_first - count as f64 / 2.0).abs() < 3.0 * sd);
}

#[test]
fn random_groups_have_the_right_size() {
    let m = model(vec![e(0), e(1), Matrix::column(&[1.0, 1.0])], 5, 2);
    let s = random_schedule(&m, 1);
    s.validate(&m).unwrap();
    let sample = sample_random(&m, 10, 4).unwrap();
    assert_eq!(sample.len(), 10);
    assert!(sample.summary().min <= sample.summary().mean);
}

#[test]
fn degenerate_sample_has_one_cost() {
    let m = model(vec![e(0)], 3, 1);
    let sample = sample_random(&m, 5, 0).unwrap();
    assert!(sample.j.iter().all(|&j| j == sample.j[0]));
}

#[test]
fn max_theta_reads_one_hot_weights() {
    let m = model(vec![e(0), e(1)], 3, 1);
    let planted = Schedule::single([1, 0, 1]);
    let traj = riccati_backward(&m, &planted).unwrap();
    let mut sol = solve_relaxation(&m, &SolverSettings::default()).unwrap();
    sol.theta = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]];
    sol.k_ref = traj.k_mid.clone();
    assert_eq!(max_theta_schedule(&m, &sol), planted);
    assert_eq!(track_reference(&m, &sol.k_ref).unwrap(), planted);
}

#[test]
fn geometric_factor_limit() {
    assert_eq!(geometric_factor(1.0, 4), 5.0);
    assert!((geometric_factor(2.0, 2) - 7.0).abs() < 1e-15);
}

#[test]
fn bound_vanishes_with_one_actuator() {
    let m = model(vec![e(0)], 4, 1);
    let sol = solve_relaxation(&m, &SolverSettings::with_tolerance(1e-9)).unwrap();
    let tight = tighten(&m, &sol).unwrap();
    let theta = ThetaTrajectory::from_tightened(&m, &tight).unwrap();
    let s = track_reference(&m, tight.reference_trajectory()).unwrap();
    let r = suboptimality_bound(&m, &s, &theta, Some(&s)).unwrap();
    assert!(r.epsilon < 1e-6, "{r:?}");
    assert!(r.beta_t.iter().all(|&b| b < 1e-6));
    assert!(r.holds);
    assert_eq!(r.recompute_epsilon(), r.epsilon);
    assert!(matches!(
        suboptimality_bound(&m, &s, &theta, None),
        Err(Error::MissingOptimalSchedule)
    ));
}

#[test]
fn orthogonal_dynamics_without_input_give_unit_lambda() {
    let mut m = model(vec![Matrix::zeros(2, 1)], 3, 1).to_parts();
    let rot = Matrix::from_rows(&[[0.6, -0.8], [0.8, 0.6]]).unwrap();
    m.a = vec![rot.clone(); 3];
    m.a_terminal = Some(rot);
    let m = SystemModel::new(m).unwrap();
    let s = Schedule::constant(3, &[0]);
    let traj = riccati_backward(&m, &s).unwrap();
    let theta = ThetaTrajectory {
        k_next: traj.k[1..].to_vec(),
        k_mid: traj.k_mid.clone(),
    };
    let r = suboptimality_bound(&m, &s, &theta, Some(&s)).unwrap();
    assert!((r.lambda - 1.0).abs() < 1e-12);
    assert!(r.epsilon.abs() < 1e-12);
}

#[test]
fn virtual_actuators_match_groups() {
    // choosing 2 of 3 actuators equals choosing 1 of 3 stacked pairs
    let bs = vec![e(0), e(1), Matrix::column(&[0.5, -1.0])];
    let grouped = model(bs.clone(), 3, 2);
    let pairs = [[0, 1], [0, 2], [1, 2]];
    let mut parts = model(vec![e(0); 3], 3, 1).to_parts();
    parts.b = pairs
        .iter()
        .map(|p| vec![Matrix::hcat(2, &[&bs[p[0]], &bs[p[1]]]); 3])
        .collect();
    parts.r = vec![vec![SymMatrix::identity(2); 3]; 3];
    let virt = SystemModel::new(parts).unwrap();
    let a = brute_force(&grouped, DEFAULT_CAP).unwrap();
    let b = brute_force(&virt, DEFAULT_CAP).unwrap();
    assert!((a.cost.j - b.cost.j).abs() < 1e-12);
    let lifted = Schedule::new(b.schedule.stages().iter().map(|s| pairs[s[0]].to_vec()).collect());
    assert_eq!(lifted, a.schedule);
}

#[test]
fn greedy_never_beats_brute_force() {
    let m = model(vec![e(0), e(1), Matrix::column(&[0.7, 0.7])], 5, 1);
    let g = cost_of_schedule(&m, &greedy_schedule(&m).unwrap()).unwrap();
    let bf = brute_force(&m, DEFAULT_CAP).unwrap();
    assert!(bf.cost.j <= g.j + 1e-12);
}
