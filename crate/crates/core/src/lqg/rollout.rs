//! Monte-Carlo check of the analytic quadratic cost.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{riccati_backward, Schedule, SystemModel};
use crate::error::{Error, Result};
use crate::linalg::{sym_eig, Matrix, SymMatrix};
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize)]
pub struct RolloutStats {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

/// Symmetric square root of a covariance, with negative eigenvalues clipped.
fn cov_sqrt<T: Real>(w: &SymMatrix<T>) -> Result<Matrix<T>> {
    let e = sym_eig(w)?;
    Ok(e.reconstruct_with(|l| l.max(T::zero()).sqrt()).into_matrix())
}

fn gaussian<T: Real>(root: &Matrix<T>, rng: &mut ChaCha8Rng) -> Vec<T> {
    let z: Vec<T> = (0..root.cols())
        .map(|_| {
            let v: f64 = StandardNormal.sample(rng);
            T::lit(v)
        })
        .collect();
    root.mul_vec(&z)
}

fn quad<T: Real>(m: &SymMatrix<T>, x: &[T]) -> T {
    let mx = m.as_matrix().mul_vec(x);
    mx.iter().zip(x).map(|(&a, &b)| a * b).sum()
}

/// Simulates `x_{t+1} = A_t x_t + Σ_j B_t(j) u_t(j) + w_t` under the optimal
/// state-feedback law for `schedule`, accumulating
/// `Σ_t (x_tᵀQ_t x_t + Σ_j u_t(j)ᵀR_t(j)u_t(j)) + x_TᵀQ_T x_T`.
///
/// Rollout `k` draws from stream `k` of a ChaCha8 generator seeded with `seed`,
/// so each rollout's noise does not depend on how many others ran before it.
pub fn simulate_rollout<T: Real>(
    model: &SystemModel<T>,
    schedule: &Schedule,
    num_rollouts: usize,
    seed: u64,
) -> Result<RolloutStats> {
    if num_rollouts == 0 {
        return Err(Error::InvalidSettings("num_rollouts must be at least 1".into()));
    }
    let traj = riccati_backward(model, schedule)?;
    let horizon = model.horizon();
    let roots: Vec<Matrix<T>> = (0..=horizon)
        .map(|t| cov_sqrt(model.w_prev(t)))
        .collect::<Result<_>>()?;

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for k in 0..num_rollouts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let mut x = gaussian(&roots[0], &mut rng);
        let mut cost = T::zero();
        for t in 0..horizon {
            cost += quad(model.q(t), &x);
            let u = traj.gains[t].mul_vec(&x);
            let mut next = model.a(t).mul_vec(&x);
            let mut offset = 0;
            for &j in schedule.stage(t) {
                let m = model.input_dim(j);
                let uj = &u[offset..offset + m];
                cost += quad(model.r(t, j), uj);
                for (n, bu) in next.iter_mut().zip(model.b(t, j).mul_vec(uj)) {
                    *n += bu;
                }
                offset += m;
            }
            for (n, w) in next.iter_mut().zip(gaussian(&roots[t + 1], &mut rng)) {
                *n += w;
            }
            x = next;
        }
        cost += quad(model.q_terminal(), &x);
        let c = cost.as_f64();
        sum += c;
        sum_sq += c * c;
    }
    let n = num_rollouts as f64;
    let mean = sum / n;
    let var = if num_rollouts > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(RolloutStats {
        mean,
        std_err: (var / n).sqrt(),
        n: num_rollouts,
    })
}
