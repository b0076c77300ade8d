//! Operator-splitting solver: alternate a projection onto the affine set
//! `{Ax + s = b}` with a projection onto the cone, in the equilibrated space.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::cones::{dist_inf, project_cone, project_cone_in_place, project_dual_cone};
use super::equilibrate::{equilibrate, Scaling};
use super::skyline::{Profile, SkylineCholesky};
use super::ConicProblem;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub eps_primal: f64,
    pub eps_dual: f64,
    pub eps_gap: f64,
    /// Relative tolerance on infeasibility certificates.
    pub eps_infeasible: f64,
    pub max_iter: usize,
    pub rho: f64,
    /// Proximal weight on `x`; keeps the linear system definite when `A` has
    /// empty columns.
    pub sigma: f64,
    /// Over-relaxation, in `(1, 2)`.
    pub alpha: f64,
    pub equilibrate: bool,
    pub ruiz_iterations: usize,
    pub adaptive_rho: bool,
    pub check_every: usize,
    /// Iterations before the first ρ update; doubled after each change.
    pub adapt_every: usize,
    /// Record residuals at every check into [`SolverResult::log`].
    pub verbose: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            eps_primal: 1e-6,
            eps_dual: 1e-6,
            eps_gap: 1e-6,
            eps_infeasible: 1e-6,
            max_iter: 200_000,
            rho: 0.1,
            sigma: 1e-6,
            alpha: 1.5,
            equilibrate: true,
            ruiz_iterations: 25,
            adaptive_rho: true,
            check_every: 25,
            adapt_every: 100,
            verbose: false,
        }
    }
}

const RHO_MIN: f64 = 1e-4;
const RHO_MAX: f64 = 1e4;

/// Residuals within this factor of tolerance at `max_iter` count as
/// `solved_inaccurate`.
pub const INACCURATE_FACTOR: f64 = 100.0;

impl SolverSettings {
    pub fn with_tolerance(eps: f64) -> Self {
        Self {
            eps_primal: eps,
            eps_dual: eps,
            eps_gap: eps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eps_primal", self.eps_primal),
            ("eps_dual", self.eps_dual),
            ("eps_gap", self.eps_gap),
            ("eps_infeasible", self.eps_infeasible),
            ("rho", self.rho),
            ("sigma", self.sigma),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidSettings(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(Error::InvalidSettings(format!(
                "alpha must lie in (1, 2), got {}",
                self.alpha
            )));
        }
        if self.max_iter == 0 || self.check_every == 0 || self.adapt_every == 0 {
            return Err(Error::InvalidSettings(
                "max_iter, check_every and adapt_every must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Solved,
    SolvedInaccurate,
    MaxIter,
    Infeasible,
    Unbounded,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Solved => "solved",
            SolverStatus::SolvedInaccurate => "solved_inaccurate",
            SolverStatus::MaxIter => "max_iter",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::Unbounded => "unbounded",
        }
    }

    pub fn is_solved(self) -> bool {
        matches!(self, SolverStatus::Solved | SolverStatus::SolvedInaccurate)
    }
}

impl fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

impl Residuals {
    pub fn within(&self, s: &SolverSettings, factor: f64) -> bool {
        self.primal <= factor * s.eps_primal
            && self.dual <= factor * s.eps_dual
            && self.gap <= factor * s.eps_gap
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogEntry {
    pub iter: usize,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub rho: f64,
}

/// Writes `iter,primal,dual,gap` rows.
pub fn write_log_csv(log: &[LogEntry], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "iter,primal,dual,gap")?;
    for e in log {
        writeln!(out, "{},{:e},{:e},{:e}", e.iter, e.primal, e.dual, e.gap)?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SolverResult<T> {
    pub x: Vec<T>,
    /// Dual variable: `Aᵀy + c = 0`, `y ∈ K*` at optimality. For an
    /// infeasible problem, the normalized certificate instead.
    pub y: Vec<T>,
    pub s: Vec<T>,
    pub status: SolverStatus,
    pub residuals: Residuals,
    pub iterations: usize,
    pub objective: f64,
    pub log: Vec<LogEntry>,
}

fn norm_inf<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Relative ∞-norm residuals of a candidate triple, in the problem's own scaling.
pub fn residuals<T: Real>(problem: &ConicProblem<T>, x: &[T], y: &[T], s: &[T]) -> Residuals {
    let one = T::one();
    let ax = problem.a.mul_vec(x);
    let pr = ax
        .iter()
        .zip(s)
        .zip(&problem.b)
        .fold(T::zero(), |m, ((&a, &s), &b)| m.max((a + s - b).abs()));
    let aty = problem.a.tr_mul_vec(y);
    let du = aty
        .iter()
        .zip(&problem.c)
        .fold(T::zero(), |m, (&a, &c)| m.max((a + c).abs()));
    let cx = dot(&problem.c, x);
    let by = dot(&problem.b, y);
    Residuals {
        primal: (pr / (one + norm_inf(&problem.b))).as_f64(),
        dual: (du / (one + norm_inf(&problem.c))).as_f64(),
        gap: ((cx + by).abs() / (one + cx.abs() + by.abs())).as_f64(),
    }
}

struct Workspace<'a, T> {
    scaled: &'a ConicProblem<T>,
    gram: Profile<T>,
    chol: SkylineCholesky<T>,
    sigma: T,
    rho: T,
}

impl<'a, T: Real> Workspace<'a, T> {
    fn new(scaled: &'a ConicProblem<T>, sigma: T, rho: T) -> Result<Self> {
        let gram = Profile::gram(&scaled.a);
        let chol = gram.factor_shifted(sigma, rho)?;
        Ok(Self {
            scaled,
            gram,
            chol,
            sigma,
            rho,
        })
    }

    fn set_rho(&mut self, rho: T) -> Result<()> {
        self.chol = self.gram.factor_shifted(self.sigma, rho)?;
        self.rho = rho;
        Ok(())
    }
}

/// Checks for a primal infeasibility certificate `δy ∈ K*`, `Aᵀδy ≈ 0`,
/// `bᵀδy < 0` and returns it normalized.
fn primal_certificate<T: Real>(p: &ConicProblem<T>, dy: &[T], eps: T) -> Result<Option<Vec<T>>> {
    let n = norm_inf(dy);
    if !(n > T::zero()) {
        return Ok(None);
    }
    let z: Vec<T> = dy.iter().map(|&v| v / n).collect();
    if dot(&p.b, &z) >= -eps {
        return Ok(None);
    }
    if norm_inf(&p.a.tr_mul_vec(&z)) > eps {
        return Ok(None);
    }
    if dist_inf(&z, &project_dual_cone(&z, &p.cones)?) > eps {
        return Ok(None);
    }
    Ok(Some(z))
}

fn normalized<T: Real>(mut v: Vec<T>) -> Vec<T> {
    let n = norm_inf(&v);
    if n > T::zero() {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

/// Checks for a recession direction `δx` with `−Aδx ∈ K`, `cᵀδx < 0`.
fn dual_certificate<T: Real>(p: &ConicProblem<T>, dx: &[T], eps: T) -> Result<Option<Vec<T>>> {
    let n = norm_inf(dx);
    if !(n > T::zero()) {
        return Ok(None);
    }
    let d: Vec<T> = dx.iter().map(|&v| v / n).collect();
    if dot(&p.c, &d) >= -eps {
        return Ok(None);
    }
    let neg_ad: Vec<T> = p.a.mul_vec(&d).into_iter().map(|v| -v).collect();
    if dist_inf(&neg_ad, &project_cone(&neg_ad, &p.cones)?) > eps {
        return Ok(None);
    }
    Ok(Some(d))
}

pub fn solve<T: Real>(problem: &ConicProblem<T>, settings: &SolverSettings) -> Result<SolverResult<T>> {
    problem.validate()?;
    settings.validate()?;

    let (scaled, scaling) = if settings.equilibrate {
        equilibrate(problem, settings.ruiz_iterations)
    } else {
        (
            problem.clone(),
            Scaling::identity(problem.num_rows(), problem.num_vars()),
        )
    };
    let nv = problem.num_vars();
    let m = problem.num_rows();
    let mut ws = Workspace::new(&scaled, T::lit(settings.sigma), T::lit(settings.rho))?;
    let alpha = T::lit(settings.alpha);
    let one = T::one();
    let eps_inf = T::lit(settings.eps_infeasible);

    let mut x = vec![T::zero(); nv];
    let mut s = vec![T::zero(); m];
    let mut y = vec![T::zero(); m];
    let mut x_prev = x.clone();
    let mut y_prev = y.clone();
    let mut rhs = vec![T::zero(); nv];
    let mut tmp_m = vec![T::zero(); m];
    let mut s_tilde = vec![T::zero(); m];
    let mut log = Vec::new();
    // doubled after every change so that rho eventually stays fixed
    let mut adapt_every = settings.adapt_every;
    let mut next_adapt = adapt_every;

    let finish = |x: &[T], y: &[T], s: &[T], status, iterations, log| {
        let (xo, yo, so) = scaling.unscale(x, y, s);
        // the iteration's multiplier has the opposite sign to the reported dual
        let yo: Vec<T> = yo.into_iter().map(|v| -v).collect();
        let residuals = residuals(problem, &xo, &yo, &so);
        SolverResult {
            objective: dot(&problem.c, &xo).as_f64(),
            x: xo,
            y: yo,
            s: so,
            status,
            residuals,
            iterations,
            log,
        }
    };

    for k in 1..=settings.max_iter {
        let rho = ws.rho;
        x_prev.copy_from_slice(&x);
        y_prev.copy_from_slice(&y);

        // x̃ = (σI + ρÂᵀÂ)⁻¹ (σx − ĉ + Âᵀ(ρ(b̂ − s) + y))
        for i in 0..m {
            tmp_m[i] = rho * (ws.scaled.b[i] - s[i]) + y[i];
        }
        ws.scaled.a.tr_mul_vec_into(&tmp_m, &mut rhs);
        for i in 0..nv {
            rhs[i] += ws.sigma * x[i] - ws.scaled.c[i];
        }
        ws.chol.solve_in_place(&mut rhs);
        ws.scaled.a.mul_vec_into(&rhs, &mut s_tilde);
        for i in 0..nv {
            x[i] = alpha * rhs[i] + (one - alpha) * x[i];
        }
        for i in 0..m {
            let st = ws.scaled.b[i] - s_tilde[i];
            let s_hat = alpha * st + (one - alpha) * s[i];
            tmp_m[i] = s_hat;
            s_tilde[i] = s_hat + y[i] / rho;
        }
        project_cone_in_place(&mut s_tilde, &ws.scaled.cones)?;
        for i in 0..m {
            y[i] += rho * (tmp_m[i] - s_tilde[i]);
            s[i] = s_tilde[i];
        }

        if k % settings.check_every != 0 && k != settings.max_iter {
            continue;
        }
        let (xo, yo, so) = scaling.unscale(&x, &y, &s);
        let yo: Vec<T> = yo.into_iter().map(|v| -v).collect();
        let res = residuals(problem, &xo, &yo, &so);
        if settings.verbose {
            log.push(LogEntry {
                iter: k,
                primal: res.primal,
                dual: res.dual,
                gap: res.gap,
                rho: rho.as_f64(),
            });
        }
        if res.within(settings, 1.0) {
            return Ok(finish(&x, &y, &s, SolverStatus::Solved, k, log));
        }

        // certificates are tested in the equilibrated space, where no row or
        // column is tiny enough to pass the tolerance by scale alone
        let dy: Vec<T> = y.iter().zip(&y_prev).map(|(&a, &b)| -(a - b)).collect();
        if let Some(z) = primal_certificate(ws.scaled, &dy, eps_inf)? {
            let mut r = finish(&x, &y, &s, SolverStatus::Infeasible, k, log);
            r.y = normalized(z.iter().zip(&scaling.e).map(|(&v, &e)| v * e).collect());
            return Ok(r);
        }
        let dx: Vec<T> = x.iter().zip(&x_prev).map(|(&a, &b)| a - b).collect();
        if let Some(d) = dual_certificate(ws.scaled, &dx, eps_inf)? {
            let mut r = finish(&x, &y, &s, SolverStatus::Unbounded, k, log);
            r.x = normalized(d.iter().zip(&scaling.d).map(|(&v, &d)| v * d).collect());
            return Ok(r);
        }

        if k == settings.max_iter {
            let status = if res.within(settings, INACCURATE_FACTOR) {
                SolverStatus::SolvedInaccurate
            } else {
                SolverStatus::MaxIter
            };
            return Ok(finish(&x, &y, &s, status, k, log));
        }

        if settings.adaptive_rho && k >= next_adapt {
            next_adapt = k + adapt_every;
            if let Some(new_rho) = adapted_rho(ws.scaled, &x, &y, &s, rho) {
                ws.set_rho(new_rho)?;
                adapt_every *= 2;
                next_adapt = k + adapt_every;
            }
        }
    }
    unreachable!("the loop returns at max_iter")
}

/// Balances scaled primal and dual residuals, each relative to the size of
/// the terms it is made of.
fn adapted_rho<T: Real>(p: &ConicProblem<T>, x: &[T], y: &[T], s: &[T], rho: T) -> Option<T> {
    let tiny = T::lit(1e-10);
    let ax = p.a.mul_vec(x);
    let pr = ax
        .iter()
        .zip(s)
        .zip(&p.b)
        .fold(T::zero(), |m, ((&a, &s), &b)| m.max((a + s - b).abs()));
    let prs = pr / norm_inf(&ax).max(norm_inf(s)).max(tiny);
    let aty = p.a.tr_mul_vec(y);
    let du = aty
        .iter()
        .zip(&p.c)
        .fold(T::zero(), |m, (&a, &c)| m.max((c - a).abs()));
    let dus = du / norm_inf(&aty).max(norm_inf(&p.c)).max(tiny);
    let ratio = (prs / dus.max(T::lit(1e-12))).sqrt();
    if ratio > T::lit(5.0) || ratio < T::lit(0.2) {
        let new_rho = (rho * ratio).max(T::lit(RHO_MIN)).min(T::lit(RHO_MAX));
        if new_rho != rho {
            return Some(new_rho);
        }
    }
    None
}
