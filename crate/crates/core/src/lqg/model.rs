use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::scalar::Real;

/// Time-varying problem data, indexed the way the model file lays it out:
/// per-stage vectors, and per-actuator vectors of per-stage matrices.
#[derive(Clone, Debug)]
pub struct ModelParts<T> {
    /// `A_t`, `t = 0..T-1`.
    pub a: Vec<Matrix<T>>,
    /// `A_T`, only used by the suboptimality bound. Defaults to `A_{T-1}`.
    pub a_terminal: Option<Matrix<T>>,
    /// `b[j][t] = B_t(j)`.
    pub b: Vec<Vec<Matrix<T>>>,
    /// `Q_t`, `t = 0..T-1`.
    pub q: Vec<SymMatrix<T>>,
    pub q_terminal: SymMatrix<T>,
    /// `r[j][t] = R_t(j)`.
    pub r: Vec<Vec<SymMatrix<T>>>,
    /// Covariance of `x_0`, i.e. `W_{-1}`.
    pub w_init: SymMatrix<T>,
    /// Process noise covariances `W_t`, `t = 0..T-1`.
    pub w: Vec<SymMatrix<T>>,
    /// `costs[j][t] = c_t(j)`.
    pub costs: Vec<Vec<T>>,
    /// `N_t` per stage.
    pub group_size: Vec<usize>,
}

/// Constant-in-time shorthand, broadcast over the horizon by [`TimeInvariant::expand`].
#[derive(Clone, Debug)]
pub struct TimeInvariant<T> {
    pub horizon: usize,
    pub a: Matrix<T>,
    pub b: Vec<Matrix<T>>,
    pub q: SymMatrix<T>,
    pub q_terminal: SymMatrix<T>,
    pub r: Vec<SymMatrix<T>>,
    pub w_init: SymMatrix<T>,
    pub w: SymMatrix<T>,
    pub costs: Vec<T>,
    pub group_size: usize,
}

impl<T: Real> TimeInvariant<T> {
    pub fn expand(self) -> ModelParts<T> {
        let h = self.horizon;
        ModelParts {
            a: vec![self.a; h],
            a_terminal: None,
            b: self.b.into_iter().map(|b| vec![b; h]).collect(),
            q: vec![self.q; h],
            q_terminal: self.q_terminal,
            r: self.r.into_iter().map(|r| vec![r; h]).collect(),
            w_init: self.w_init,
            w: vec![self.w; h],
            costs: self.costs.into_iter().map(|c| vec![c; h]).collect(),
            group_size: vec![self.group_size; h],
        }
    }

    pub fn build(self) -> Result<SystemModel<T>> {
        SystemModel::new(self.expand())
    }
}

/// A validated finite-horizon stochastic LQ problem with `N` actuators.
///
/// Immutable after construction. Stage indices run `0..T`; `T` itself is the
/// terminal index for `A`, `Q`, and the value matrix `K`.
#[derive(Clone, Debug)]
pub struct SystemModel<T> {
    horizon: usize,
    state_dim: usize,
    input_dims: Vec<usize>,
    group_size: Vec<usize>,
    /// Length `T + 1`.
    a: Vec<Matrix<T>>,
    /// `b[t][j]`.
    b: Vec<Vec<Matrix<T>>>,
    /// Length `T + 1`, last entry `Q_T`.
    q: Vec<SymMatrix<T>>,
    /// `r[t][j]`.
    r: Vec<Vec<SymMatrix<T>>>,
    w_init: SymMatrix<T>,
    w: Vec<SymMatrix<T>>,
    /// `costs[t][j]`.
    costs: Vec<Vec<T>>,
}

fn psd_tol<T: Real>() -> T {
    T::lit(-1e-12)
}

impl<T: Real> SystemModel<T> {
    pub fn new(parts: ModelParts<T>) -> Result<Self> {
        let horizon = parts.a.len();
        if horizon == 0 {
            return Err(Error::model("a", "horizon must be at least one stage"));
        }
        let n = parts.a[0].rows();
        if n == 0 {
            return Err(Error::model("a[0]", "state dimension must be positive"));
        }
        let square = |path: String, m: &Matrix<T>| -> Result<()> {
            if m.rows() != n || m.cols() != n {
                return Err(Error::model(
                    path,
                    format!("expected {n}x{n}, got {}x{}", m.rows(), m.cols()),
                ));
            }
            if !m.is_finite() {
                return Err(Error::model(path, "non-finite entry"));
            }
            Ok(())
        };
        for (t, a) in parts.a.iter().enumerate() {
            square(format!("a[{t}]"), a)?;
        }
        if let Some(a) = &parts.a_terminal {
            square("a_terminal".into(), a)?;
        }

        let num_actuators = parts.b.len();
        if num_actuators == 0 {
            return Err(Error::model("b", "at least one actuator is required"));
        }
        let lengths = [
            ("q", parts.q.len()),
            ("w", parts.w.len()),
            ("group_size", parts.group_size.len()),
        ];
        for (name, len) in lengths {
            if len != horizon {
                return Err(Error::model(
                    name,
                    format!("expected {horizon} stages, got {len}"),
                ));
            }
        }
        if parts.r.len() != num_actuators {
            return Err(Error::model(
                "r",
                format!("expected {num_actuators} actuators, got {}", parts.r.len()),
            ));
        }
        if parts.costs.len() != num_actuators {
            return Err(Error::model(
                "costs",
                format!(
                    "expected {num_actuators} actuators, got {}",
                    parts.costs.len()
                ),
            ));
        }

        let mut input_dims = Vec::with_capacity(num_actuators);
        for j in 0..num_actuators {
            let (bj, rj, cj) = (&parts.b[j], &parts.r[j], &parts.costs[j]);
            for (name, len) in [("b", bj.len()), ("r", rj.len()), ("costs", cj.len())] {
                if len != horizon {
                    return Err(Error::model(
                        format!("{name}[{j}]"),
                        format!("expected {horizon} stages, got {len}"),
                    ));
                }
            }
            let m = bj[0].cols();
            if m == 0 {
                return Err(Error::model(format!("b[{j}][0]"), "actuator has no inputs"));
            }
            for t in 0..horizon {
                let path = format!("b[{j}][{t}]");
                if bj[t].rows() != n || bj[t].cols() != m {
                    return Err(Error::model(
                        path,
                        format!("expected {n}x{m}, got {}x{}", bj[t].rows(), bj[t].cols()),
                    ));
                }
                if !bj[t].is_finite() {
                    return Err(Error::model(path, "non-finite entry"));
                }
                let path = format!("r[{j}][{t}]");
                if rj[t].dim() != m {
                    return Err(Error::model(
                        path,
                        format!("expected {m}x{m}, got {0}x{0}", rj[t].dim()),
                    ));
                }
                let lam = rj[t].min_eig()?;
                if !(lam > T::zero()) {
                    return Err(Error::model(
                        path,
                        format!("must be positive definite (min eigenvalue {lam:e})"),
                    ));
                }
                let c = cj[t];
                if !(c >= T::zero()) || !c.is_finite() {
                    return Err(Error::model(
                        format!("costs[{j}][{t}]"),
                        format!("actuation cost must be finite and non-negative, got {c}"),
                    ));
                }
            }
            input_dims.push(m);
        }

        let mut q = parts.q;
        q.push(parts.q_terminal);
        for (t, qt) in q.iter().enumerate() {
            let path = if t == horizon {
                "q_terminal".to_string()
            } else {
                format!("q[{t}]")
            };
            if qt.dim() != n {
                return Err(Error::model(path, format!("expected {n}x{n}")));
            }
            let lam = qt.min_eig()?;
            if !(lam > T::zero()) {
                return Err(Error::model(
                    path,
                    format!("must be positive definite (min eigenvalue {lam:e})"),
                ));
            }
        }

        let covs = std::iter::once(("w_init".to_string(), &parts.w_init))
            .chain(parts.w.iter().enumerate().map(|(t, w)| (format!("w[{t}]"), w)));
        for (path, w) in covs {
            if w.dim() != n {
                return Err(Error::model(path, format!("expected {n}x{n}")));
            }
            let lam = w.min_eig()?;
            if lam < psd_tol() {
                return Err(Error::model(
                    path,
                    format!("covariance must be positive semidefinite (min eigenvalue {lam:e})"),
                ));
            }
        }

        for (t, &g) in parts.group_size.iter().enumerate() {
            if g == 0 || g > num_actuators {
                return Err(Error::model(
                    format!("group_size[{t}]"),
                    format!("must lie in 1..={num_actuators}, got {g}"),
                ));
            }
        }

        let mut a = parts.a;
        let a_terminal = parts.a_terminal.unwrap_or_else(|| a[horizon - 1].clone());
        a.push(a_terminal);

        Ok(Self {
            horizon,
            state_dim: n,
            input_dims,
            group_size: parts.group_size,
            a,
            b: transpose(horizon, parts.b),
            q,
            r: transpose(horizon, parts.r),
            w_init: parts.w_init,
            w: parts.w,
            costs: transpose(horizon, parts.costs),
        })
    }

    /// Inverse of [`SystemModel::new`].
    pub fn to_parts(&self) -> ModelParts<T> {
        ModelParts {
            a: self.a[..self.horizon].to_vec(),
            a_terminal: Some(self.a[self.horizon].clone()),
            b: (0..self.num_actuators())
                .map(|j| (0..self.horizon).map(|t| self.b[t][j].clone()).collect())
                .collect(),
            q: self.q[..self.horizon].to_vec(),
            q_terminal: self.q[self.horizon].clone(),
            r: (0..self.num_actuators())
                .map(|j| (0..self.horizon).map(|t| self.r[t][j].clone()).collect())
                .collect(),
            w_init: self.w_init.clone(),
            w: self.w.clone(),
            costs: (0..self.num_actuators())
                .map(|j| (0..self.horizon).map(|t| self.costs[t][j]).collect())
                .collect(),
            group_size: self.group_size.clone(),
        }
    }

    #[inline]
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    #[inline]
    pub fn num_actuators(&self) -> usize {
        self.input_dims.len()
    }

    pub fn input_dim(&self, j: usize) -> usize {
        self.input_dims[j]
    }

    /// `N_t`.
    pub fn group_size(&self, t: usize) -> usize {
        self.group_size[t]
    }

    /// `A_t` for `t = 0..=T`.
    pub fn a(&self, t: usize) -> &Matrix<T> {
        &self.a[t]
    }

    pub fn b(&self, t: usize, j: usize) -> &Matrix<T> {
        &self.b[t][j]
    }

    /// `Q_t` for `t = 0..=T`.
    pub fn q(&self, t: usize) -> &SymMatrix<T> {
        &self.q[t]
    }

    pub fn q_terminal(&self) -> &SymMatrix<T> {
        &self.q[self.horizon]
    }

    pub fn r(&self, t: usize, j: usize) -> &SymMatrix<T> {
        &self.r[t][j]
    }

    pub fn cost(&self, t: usize, j: usize) -> T {
        self.costs[t][j]
    }

    /// `W_{t-1}` for `t = 0..=T`: the initial-state covariance at `t = 0`.
    pub fn w_prev(&self, t: usize) -> &SymMatrix<T> {
        if t == 0 {
            &self.w_init
        } else {
            &self.w[t - 1]
        }
    }

    /// `W̄_{t-1} = A_t W_{t-1} A_tᵀ` for `t = 0..T`.
    pub fn w_bar(&self, t: usize) -> SymMatrix<T> {
        self.w_prev(t).congruence_t(&self.a[t])
    }

    /// `V_t(j) = B_t(j) R_t(j)⁻¹ B_t(j)ᵀ`.
    pub fn v(&self, t: usize, j: usize) -> Result<SymMatrix<T>> {
        let r_inv = self.r[t][j].inverse_spd()?;
        Ok(r_inv.congruence_t(&self.b[t][j]))
    }

    /// Schedule-independent part of the quadratic cost, `Σ_{t=0}^{T} tr(Q_t W_{t-1})`.
    pub fn r_constant(&self) -> T {
        (0..=self.horizon)
            .map(|t| self.q[t].trace_product(self.w_prev(t)))
            .sum()
    }

    /// `schedule_count` as a power, e.g. `6^30`, or a product of per-stage
    /// factors when group sizes differ.
    pub fn schedule_count_formula(&self) -> String {
        let n = self.num_actuators();
        let factor = |k: usize| if k == 1 { n.to_string() } else { format!("C({n},{k})") };
        let first = self.group_size[0];
        if self.group_size.iter().all(|&k| k == first) {
            format!("{}^{}", factor(first), self.horizon)
        } else {
            let parts: Vec<String> = self.group_size.iter().map(|&k| factor(k)).collect();
            parts.join("*")
        }
    }

    /// Number of distinct schedules, `Π_t C(N, N_t)`, saturating.
    pub fn schedule_count(&self) -> u128 {
        self.group_size
            .iter()
            .fold(1u128, |acc, &k| acc.saturating_mul(binomial(self.num_actuators(), k)))
    }

    pub fn without_actuation_costs(&self) -> Self {
        let mut m = self.clone();
        for row in &mut m.costs {
            row.iter_mut().for_each(|c| *c = T::zero());
        }
        m
    }

    /// Keeps only the listed actuators (0-based, in the given order).
    /// Actuator `k` of the result is actuator `keep[k]` of `self`.
    pub fn restricted(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::model("actuators", "restriction keeps no actuators"));
        }
        for (k, &j) in keep.iter().enumerate() {
            if j >= self.num_actuators() {
                return Err(Error::model(
                    format!("actuators[{k}]"),
                    format!("index {} out of range 1..={}", j + 1, self.num_actuators()),
                ));
            }
            if keep[..k].contains(&j) {
                return Err(Error::model(
                    format!("actuators[{k}]"),
                    format!("duplicate actuator {}", j + 1),
                ));
            }
        }
        let mut parts = self.to_parts();
        parts.b = keep.iter().map(|&j| parts.b[j].clone()).collect();
        parts.r = keep.iter().map(|&j| parts.r[j].clone()).collect();
        parts.costs = keep.iter().map(|&j| parts.costs[j].clone()).collect();
        Self::new(parts)
    }

    pub fn cast<U: Real>(&self) -> SystemModel<U> {
        SystemModel {
            horizon: self.horizon,
            state_dim: self.state_dim,
            input_dims: self.input_dims.clone(),
            group_size: self.group_size.clone(),
            a: self.a.iter().map(Matrix::cast).collect(),
            b: self
                .b
                .iter()
                .map(|row| row.iter().map(Matrix::cast).collect())
                .collect(),
            q: self.q.iter().map(SymMatrix::cast).collect(),
            r: self
                .r
                .iter()
                .map(|row| row.iter().map(SymMatrix::cast).collect())
                .collect(),
            w_init: self.w_init.cast(),
            w: self.w.iter().map(SymMatrix::cast).collect(),
            costs: self
                .costs
                .iter()
                .map(|row| row.iter().map(|&c| U::lit(c.as_f64())).collect())
                .collect(),
        }
    }
}

/// `per_actuator[j][t]` to `per_stage[t][j]`.
fn transpose<X>(horizon: usize, per_actuator: Vec<Vec<X>>) -> Vec<Vec<X>> {
    let mut per_stage: Vec<Vec<X>> = (0..horizon).map(|_| Vec::new()).collect();
    for series in per_actuator {
        for (t, x) in series.into_iter().enumerate() {
            per_stage[t].push(x);
        }
    }
    per_stage
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn scalar_model(horizon: usize) -> SystemModel<f64> {
        let one = |x: f64| Matrix::from_rows(&[[x]]).unwrap();
        let sym = |x: f64| SymMatrix::from_rows(&[[x]]).unwrap();
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

    #[test]
    fn terminal_a_defaults_to_last_stage() {
        let m = scalar_model(3);
        assert_eq!(m.a(3), m.a(2));
        assert_eq!(m.q(3), m.q_terminal());
    }

    #[test]
    fn w_prev_uses_initial_covariance_at_stage_zero() {
        let mut parts = scalar_model(2).to_parts();
        parts.w_init = SymMatrix::from_rows(&[[5.0]]).unwrap();
        let m = SystemModel::new(parts).unwrap();
        assert_eq!(m.w_prev(0).get(0, 0), 5.0);
        assert_eq!(m.w_prev(1).get(0, 0), 1.0);
        assert_eq!(m.w_prev(2).get(0, 0), 1.0);
        // r = Σ_{t=0}^{2} q_t w_{t-1} = 5 + 1 + 1
        assert_eq!(m.r_constant(), 7.0);
    }

    #[test]
    fn rejects_indefinite_q_with_path() {
        let mut parts = scalar_model(2).to_parts();
        parts.q[1] = SymMatrix::from_rows(&[[0.0]]).unwrap();
        match SystemModel::new(parts) {
            Err(Error::InvalidModel { path, .. }) => assert_eq!(path, "q[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_singular_terminal_q() {
        let mut parts = scalar_model(2).to_parts();
        parts.q_terminal = SymMatrix::from_rows(&[[0.0]]).unwrap();
        assert!(matches!(
            SystemModel::new(parts),
            Err(Error::InvalidModel { path, .. }) if path == "q_terminal"
        ));
    }

    #[test]
    fn rejects_group_larger_than_actuator_count() {
        let mut parts = scalar_model(2).to_parts();
        parts.group_size[0] = 2;
        assert!(SystemModel::new(parts).is_err());
    }

    #[test]
    fn rejects_negative_cost_and_bad_shapes() {
        let mut parts = scalar_model(2).to_parts();
        parts.costs[0][1] = -1.0;
        assert!(matches!(
            SystemModel::new(parts),
            Err(Error::InvalidModel { path, .. }) if path == "costs[0][1]"
        ));
        let mut parts = scalar_model(2).to_parts();
        parts.b[0][0] = Matrix::zeros(2, 1);
        assert!(matches!(
            SystemModel::new(parts),
            Err(Error::InvalidModel { path, .. }) if path == "b[0][0]"
        ));
    }

    #[test]
    fn schedule_counts() {
        assert_eq!(binomial(6, 1), 6);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 4), 0);
        let m = scalar_model(5);
        assert_eq!(m.schedule_count(), 1);
    }

    #[test]
    fn restriction_reorders_and_validates() {
        let mut parts = scalar_model(2).to_parts();
        parts.b.push(vec![Matrix::from_rows(&[[2.0]]).unwrap(); 2]);
        parts.r.push(vec![SymMatrix::from_rows(&[[3.0]]).unwrap(); 2]);
        parts.costs.push(vec![4.0; 2]);
        let m = SystemModel::new(parts).unwrap();
        let only_second = m.restricted(&[1]).unwrap();
        assert_eq!(only_second.num_actuators(), 1);
        assert_eq!(only_second.b(0, 0)[(0, 0)], 2.0);
        assert_eq!(only_second.cost(1, 0), 4.0);
        assert!(m.restricted(&[1, 1]).is_err());
        assert!(m.restricted(&[2]).is_err());
    }
}
