use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lqg::{actuation_cost, quadratic_cost, Schedule, SystemModel};
use crate::scalar::Real;

fn draw<T: Real>(model: &SystemModel<T>, rng: &mut ChaCha8Rng) -> Schedule {
    let n = model.num_actuators();
    Schedule::new(
        (0..model.horizon())
            .map(|t| sample(rng, n, model.group_size(t)).into_vec())
            .collect(),
    )
}

/// Sample `index` of the stream seeded by `seed`: each stage's set is uniform
/// over the `C(N, N_t)` subsets, independently across stages. Sample `k`
/// reads only ChaCha8 stream `k`, so it can be regenerated on its own.
pub fn sample_schedule<T: Real>(model: &SystemModel<T>, seed: u64, index: u64) -> Schedule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    draw(model, &mut rng)
}

pub fn random_schedule<T: Real>(model: &SystemModel<T>, seed: u64) -> Schedule {
    sample_schedule(model, seed, 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomSample {
    pub seed: u64,
    /// `J = J1 + J2` per sample, in sample order.
    pub j: Vec<f64>,
    /// `J1` per sample.
    pub j1: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// First sample attaining the minimum.
    pub argmin: usize,
}

fn summarize(v: &[f64]) -> Summary {
    let mut s = Summary {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        mean: 0.0,
        argmin: 0,
    };
    for (k, &x) in v.iter().enumerate() {
        if x < s.min {
            s.min = x;
            s.argmin = k;
        }
        s.max = s.max.max(x);
        s.mean += x;
    }
    s.mean /= v.len() as f64;
    s
}

impl RandomSample {
    pub fn len(&self) -> usize {
        self.j.len()
    }

    pub fn is_empty(&self) -> bool {
        self.j.is_empty()
    }

    pub fn summary(&self) -> Summary {
        summarize(&self.j)
    }

    pub fn summary_j1(&self) -> Summary {
        summarize(&self.j1)
    }
}

fn evaluate_range<T: Real>(model: &SystemModel<T>, seed: u64, range: std::ops::Range<usize>) -> Result<Vec<(f64, f64)>> {
    range
        .map(|k| {
            let s = sample_schedule(model, seed, k as u64);
            let quad = quadratic_cost(model, &s)?.as_f64();
            Ok((quad, quad + actuation_cost(model, &s).as_f64()))
        })
        .collect()
}

/// Evaluates samples `0..count` of the stream seeded by `seed`, split across
/// the available cores. Every sample owns its RNG stream, so the result does
/// not depend on the thread count.
pub fn sample_random<T: Real>(model: &SystemModel<T>, count: usize, seed: u64) -> Result<RandomSample> {
    if count == 0 {
        return Err(Error::InvalidSettings("sample count must be at least 1".into()));
    }
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(count.div_ceil(256));
    let chunk = count.div_ceil(threads.max(1));
    let parts: Vec<Result<Vec<(f64, f64)>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..count)
            .step_by(chunk)
            .map(|lo| {
                let hi = (lo + chunk).min(count);
                scope.spawn(move || evaluate_range(model, seed, lo..hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sampler thread panicked")).collect()
    });
    let mut j = Vec::with_capacity(count);
    let mut j1 = Vec::with_capacity(count);
    for part in parts {
        for (quad, total) in part? {
            j1.push(quad);
            j.push(total);
        }
    }
    Ok(RandomSample { seed, j, j1 })
}
