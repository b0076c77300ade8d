#![allow(dead_code)]

use actsched::linalg::{Matrix, SymMatrix};
use actsched::lqg::ModelParts;
use actsched::SystemModel;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| normal(rng))
}

/// `G Gᵀ / n + floor·I`.
pub fn spd(rng: &mut impl Rng, n: usize, floor: f64) -> SymMatrix<f64> {
    let g = gaussian(rng, n, n);
    let m = g.matmul(&g.transpose()).scale(1.0 / n as f64);
    &SymMatrix::from_symmetric_part(m) + &SymMatrix::scaled_identity(n, floor)
}

/// Rescaled so that `‖A‖₂ ≤ radius`, which bounds the spectral radius too.
pub fn bounded(rng: &mut impl Rng, n: usize, radius: f64) -> Matrix<f64> {
    let a = gaussian(rng, n, n);
    let norm = a.operator_norm().unwrap();
    let target = radius * rng.random_range(0.5..1.0);
    a.scale(target / norm)
}

pub struct Shape {
    pub n: usize,
    pub actuators: usize,
    pub horizon: usize,
    pub group: usize,
    pub with_costs: bool,
}

/// A time-varying instance with every stage drawn independently.
pub fn instance(seed: u64, shape: &Shape) -> SystemModel {
    let mut r = rng(seed);
    let Shape { n, actuators, horizon, group, with_costs } = *shape;
    let widths: Vec<usize> = (0..actuators).map(|_| r.random_range(1..=n.min(2))).collect();
    let mut b = vec![Vec::new(); actuators];
    let mut rr = vec![Vec::new(); actuators];
    let mut costs = vec![Vec::new(); actuators];
    let mut a = Vec::new();
    let mut q = Vec::new();
    let mut w = Vec::new();
    for _ in 0..horizon {
        a.push(bounded(&mut r, n, 1.2));
        q.push(spd(&mut r, n, 0.2));
        w.push(spd(&mut r, n, 0.05));
        for j in 0..actuators {
            b[j].push(gaussian(&mut r, n, widths[j]));
            rr[j].push(spd(&mut r, widths[j], 0.3));
            costs[j].push(if with_costs { r.random_range(0.0..0.5) } else { 0.0 });
        }
    }
    SystemModel::new(ModelParts {
        a,
        a_terminal: None,
        b,
        q,
        q_terminal: spd(&mut r, n, 0.5),
        r: rr,
        w_init: spd(&mut r, n, 0.05),
        w,
        costs,
        group_size: vec![group; horizon],
    })
    .unwrap()
}

/// Shapes for the seeded desk-scale instances: `n, N ≤ 3`, `T ≤ 6`.
pub fn small_shape(seed: u64) -> Shape {
    let mut r = rng(seed ^ 0x5eed);
    Shape {
        n: r.random_range(1..=3),
        actuators: r.random_range(1..=3),
        horizon: r.random_range(1..=6),
        group: 1,
        with_costs: false,
    }
}
