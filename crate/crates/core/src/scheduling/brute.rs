use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::lqg::{cost_of_schedule, g_step, h_step, CostReport, Schedule, SystemModel};
use crate::scalar::Real;

use super::select::combinations;

pub const DEFAULT_CAP: u128 = 10_000_000;

#[derive(Clone, Debug)]
pub struct BruteForce<T> {
    pub schedule: Schedule,
    pub cost: CostReport<T>,
    /// Number of complete schedules evaluated.
    pub evaluated: u128,
}

struct Search<'a, T> {
    model: &'a SystemModel<T>,
    subsets: Vec<Vec<Vec<usize>>>,
    w_bar: Vec<SymMatrix<T>>,
    current: Vec<Vec<usize>>,
    best: Option<(T, Vec<Vec<usize>>)>,
    evaluated: u128,
}

impl<T: Real> Search<'_, T> {
    /// Chooses stage `t` given `K_{t+1}` and the cost accumulated over later stages.
    fn visit(&mut self, t: usize, k_next: &SymMatrix<T>, acc: T) -> Result<()> {
        for idx in 0..self.subsets[t].len() {
            let set = &self.subsets[t][idx];
            let mid = g_step(self.model, t, set, k_next)?;
            let stage: T = mid.trace_product(&self.w_bar[t])
                + set.iter().map(|&j| self.model.cost(t, j)).sum::<T>();
            self.current[t] = set.clone();
            if t == 0 {
                self.evaluated += 1;
                let total = acc + stage;
                let better = match &self.best {
                    None => true,
                    Some((c, s)) => total < *c || (total == *c && self.current < *s),
                };
                if better {
                    self.best = Some((total, self.current.clone()));
                }
            } else {
                let k = h_step(self.model, t, &mid);
                self.visit(t - 1, &k, acc + stage)?;
            }
        }
        Ok(())
    }
}

/// Exhaustive minimization of `J = J1 + J2`. Among schedules with exactly
/// equal cost, the lexicographically smallest (stage 0 first) wins.
pub fn brute_force<T: Real>(model: &SystemModel<T>, cap: u128) -> Result<BruteForce<T>> {
    let required = model.schedule_count();
    if required > cap {
        return Err(Error::CapExceeded {
            required,
            formula: model.schedule_count_formula(),
            cap,
        });
    }
    let horizon = model.horizon();
    let n = model.num_actuators();
    let mut search = Search {
        model,
        subsets: (0..horizon).map(|t| combinations(n, model.group_size(t))).collect(),
        w_bar: (0..horizon).map(|t| model.w_bar(t)).collect(),
        current: vec![Vec::new(); horizon],
        best: None,
        evaluated: 0,
    };
    search.visit(horizon - 1, model.q_terminal(), T::zero())?;
    let (_, stages) = search.best.expect("at least one schedule");
    let schedule = Schedule::new(stages);
    let cost = cost_of_schedule(model, &schedule)?;
    Ok(BruteForce {
        schedule,
        cost,
        evaluated: search.evaluated,
    })
}
