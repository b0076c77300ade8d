use std::fmt;

use serde::{Deserialize, Serialize};

use super::SystemModel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Active actuator set per stage.
///
/// Indices are 0-based in memory. Files and printed output use the 1-based
/// numbering `1..=N`; serde goes through that form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<usize>>", try_from = "Vec<Vec<usize>>")]
pub struct Schedule {
    stages: Vec<Vec<usize>>,
}

impl Schedule {
    /// Each stage's set is sorted; duplicates are rejected by [`Schedule::validate`].
    pub fn new(mut stages: Vec<Vec<usize>>) -> Self {
        for s in &mut stages {
            s.sort_unstable();
        }
        Self { stages }
    }

    /// One actuator per stage.
    pub fn single(actuators: impl IntoIterator<Item = usize>) -> Self {
        Self {
            stages: actuators.into_iter().map(|j| vec![j]).collect(),
        }
    }

    pub fn constant(horizon: usize, actuators: &[usize]) -> Self {
        Self::new(vec![actuators.to_vec(); horizon])
    }

    pub fn from_one_based(stages: Vec<Vec<usize>>) -> Result<Self> {
        let mut out = Vec::with_capacity(stages.len());
        for (t, s) in stages.into_iter().enumerate() {
            let mut stage = Vec::with_capacity(s.len());
            for j in s {
                if j == 0 {
                    return Err(Error::InvalidSchedule(format!(
                        "stage {t}: actuator indices start at 1"
                    )));
                }
                stage.push(j - 1);
            }
            out.push(stage);
        }
        Ok(Self::new(out))
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.stages
            .iter()
            .map(|s| s.iter().map(|j| j + 1).collect())
            .collect()
    }

    #[inline]
    pub fn horizon(&self) -> usize {
        self.stages.len()
    }

    #[inline]
    pub fn stage(&self, t: usize) -> &[usize] {
        &self.stages[t]
    }

    pub fn stages(&self) -> &[Vec<usize>] {
        &self.stages
    }

    pub fn validate<T: Real>(&self, model: &SystemModel<T>) -> Result<()> {
        if self.horizon() != model.horizon() {
            return Err(Error::InvalidSchedule(format!(
                "schedule covers {} stages, model horizon is {}",
                self.horizon(),
                model.horizon()
            )));
        }
        let n = model.num_actuators();
        for (t, s) in self.stages.iter().enumerate() {
            if s.len() != model.group_size(t) {
                return Err(Error::InvalidSchedule(format!(
                    "stage {t}: {} actuators active, group size is {}",
                    s.len(),
                    model.group_size(t)
                )));
            }
            if let Some(&j) = s.iter().find(|&&j| j >= n) {
                return Err(Error::InvalidSchedule(format!(
                    "stage {t}: actuator {} out of range 1..={n}",
                    j + 1
                )));
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidSchedule(format!(
                    "stage {t}: duplicate actuator"
                )));
            }
        }
        Ok(())
    }

    /// How many stages use each actuator.
    pub fn usage_counts(&self, num_actuators: usize) -> Vec<usize> {
        let mut counts = vec![0; num_actuators];
        for s in &self.stages {
            for &j in s {
                counts[j] += 1;
            }
        }
        counts
    }

    /// Relabels actuator `k` to `map[k]`, e.g. to lift a schedule found on a
    /// restricted model back onto the full actuator set.
    pub fn remap(&self, map: &[usize]) -> Self {
        Self::new(
            self.stages
                .iter()
                .map(|s| s.iter().map(|&j| map[j]).collect())
                .collect(),
        )
    }
}

impl From<Schedule> for Vec<Vec<usize>> {
    fn from(s: Schedule) -> Self {
        s.to_one_based()
    }
}

impl TryFrom<Vec<Vec<usize>>> for Schedule {
    type Error = Error;

    fn try_from(v: Vec<Vec<usize>>) -> Result<Self> {
        Schedule::from_one_based(v)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, s) in self.stages.iter().enumerate() {
            if t > 0 {
                f.write_str(" ")?;
            }
            let labels: Vec<String> = s.iter().map(|j| (j + 1).to_string()).collect();
            if labels.len() == 1 {
                f.write_str(&labels[0])?;
            } else {
                write!(f, "{{{}}}", labels.join(","))?;
            }
        }
        Ok(())
    }
}
