//! Anderson acceleration of a fixed-point map `x -> g(x)` on coefficient vectors.
//!
//! With residual `w = g(x) - x`, the iterate differences `E` and residual
//! differences `F` are kept in sliding windows of width at most `m`, newest
//! column first. Each step solves the small least-squares problem
//! `min |w - F gamma|` through a thin QR factorization `F = Q R` and updates
//!
//! ```text
//! x_next = x + beta w - (E + beta F) gamma
//! ```
//!
//! which is the damped Anderson update written in difference form.

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Damping factors `beta_k`, indexed from `k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Damping {
    Constant(f64),
    /// `beta_k = values[k - 1]`; the last value is repeated.
    Schedule(Vec<f64>),
}

impl Damping {
    pub fn beta(&self, k: usize) -> f64 {
        match self {
            Damping::Constant(b) => *b,
            Damping::Schedule(v) => v[(k.max(1) - 1).min(v.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |b: f64| b > 0.0 && b <= 1.0;
        let valid = match self {
            Damping::Constant(b) => ok(*b),
            Damping::Schedule(v) => !v.is_empty() && v.iter().all(|&b| ok(b)),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::Config(format!("damping factors must lie in (0, 1], got {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AaConfig {
    pub depth: usize,
    pub damping: Damping,
    /// Shift `ridge^2` added to the diagonal of `R`.
    pub ridge: f64,
    /// Restart threshold on `|dw| / |dx|`; zero disables the check.
    pub safeguard_sigma: f64,
    /// Damp the very first step as well.
    pub first_step_damped: bool,
    /// Maximum number of evaluations of `g`.
    pub max_iter: usize,
    pub tol_inf: f64,
    pub divergence_threshold: f64,
}

impl Default for AaConfig {
    fn default() -> Self {
        Self {
            depth: 10,
            damping: Damping::Constant(1.0),
            ridge: 0.0,
            safeguard_sigma: 0.0,
            first_step_damped: false,
            max_iter: 200,
            tol_inf: 1e-6,
            divergence_threshold: 1e8,
        }
    }
}

impl AaConfig {
    /// Undamped fixed-point iteration.
    pub fn plain() -> Self {
        Self {
            depth: 0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.damping.validate()?;
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::Config(format!("ridge must be >= 0, got {}", self.ridge)));
        }
        if !(self.safeguard_sigma >= 0.0 && self.safeguard_sigma.is_finite()) {
            return Err(Error::Config(format!(
                "safeguard threshold must be >= 0, got {}",
                self.safeguard_sigma
            )));
        }
        if !(self.tol_inf > 0.0) {
            return Err(Error::Config(format!("tolerance must be > 0, got {}", self.tol_inf)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.divergence_threshold > self.tol_inf) {
            return Err(Error::Config("divergence threshold must exceed the tolerance".into()));
        }
        Ok(())
    }
}

/// Solution of the coefficient problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub gamma: Vec<f64>,
    /// `|w - F gamma| / |w|`; zero when `w = 0`.
    pub theta: f64,
    /// `R` was numerically singular and a minimum-norm solution was used.
    pub rank_deficient: bool,
    /// `w = 0`: nothing to optimize.
    pub converged: bool,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Solve `(R + ridge^2 I) gamma = Q^T w` for `F = Q R`, with `R` having a
/// nonnegative diagonal. `f` holds the columns of `F`.
///
/// With `ridge = 0` this is the least-squares minimizer of `|w - F gamma|`.
pub fn solve_coefficients(f: &[Vec<f64>], w: &[f64], ridge: f64) -> Result<Coefficients> {
    let m = f.len();
    let n = w.len();
    if m == 0 {
        return Err(Error::Config("coefficient problem needs at least one column".into()));
    }
    if let Some(c) = f.iter().find(|c| c.len() != n) {
        return Err(Error::Dimension {
            context: "difference column",
            expected: n,
            got: c.len(),
        });
    }
    let wnorm = norm2(w);
    if wnorm == 0.0 {
        return Ok(Coefficients {
            gamma: vec![0.0; m],
            theta: 0.0,
            rank_deficient: false,
            converged: true,
        });
    }

    // Householder QR on a working copy; `qtw` receives Q^T w.
    let mut a: Vec<Vec<f64>> = f.to_vec();
    let mut qtw = w.to_vec();
    let mut r = vec![vec![0.0; m]; m];
    let scale = f.iter().map(|c| norm2(c)).fold(0.0, f64::max);
    for j in 0..m.min(n) {
        let alpha = norm2(&a[j][j..]);
        let mut v = a[j][j..].to_vec();
        let rjj;
        if alpha > 0.0 {
            let s = if v[0] >= 0.0 { -alpha } else { alpha };
            v[0] -= s;
            let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
            rjj = s;
            if vnorm_sq > 0.0 {
                let reflect = |col: &mut [f64]| {
                    let d: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
                    let c = 2.0 * d / vnorm_sq;
                    col.iter_mut().zip(&v).for_each(|(x, vi)| *x -= c * vi);
                };
                for col in a.iter_mut().skip(j + 1) {
                    reflect(&mut col[j..]);
                }
                reflect(&mut qtw[j..]);
            }
        } else {
            rjj = 0.0;
        }
        r[j][j] = rjj;
        for k in j + 1..m {
            r[j][k] = a[k][j];
        }
        // Flip the sign of row j so that the diagonal is nonnegative.
        if r[j][j] < 0.0 {
            for k in j..m {
                r[j][k] = -r[j][k];
            }
            qtw[j] = -qtw[j];
        }
    }

    let shift = ridge * ridge;
    let mut mtx = r.clone();
    for (j, row) in mtx.iter_mut().enumerate() {
        row[j] += shift;
    }
    let tiny = 1e-13 * scale.max(shift).max(f64::MIN_POSITIVE);
    let singular = (0..m).any(|j| j >= n || mtx[j][j].abs() <= tiny);
    let gamma = if singular {
        let mat = nalgebra::DMatrix::from_fn(m, m, |i, j| mtx[i][j]);
        let rhs = nalgebra::DVector::from_fn(m, |i, _| if i < n { qtw[i] } else { 0.0 });
        let svd = mat.svd(true, true);
        let eps = 1e-12 * svd.singular_values.max();
        let sol = svd
            .solve(&rhs, eps)
            .map_err(|e| Error::LinearSolver(format!("minimum-norm coefficient solve: {e}")))?;
        sol.iter().copied().collect()
    } else {
        let mut g = vec![0.0; m];
        for i in (0..m).rev() {
            let s: f64 = (i + 1..m).map(|k| mtx[i][k] * g[k]).sum();
            g[i] = (qtw[i] - s) / mtx[i][i];
        }
        g
    };

    let mut res = w.to_vec();
    for (col, &g) in f.iter().zip(&gamma) {
        res.iter_mut().zip(col).for_each(|(r, c)| *r -= g * c);
    }
    Ok(Coefficients {
        gamma,
        theta: norm2(&res) / wnorm,
        rank_deficient: singular,
        converged: false,
    })
}

/// Assumption-style safeguard `|dw| >= sigma |dx|`. Zero `dx` passes.
pub fn safeguard_check(dw_norm: f64, dx_norm: f64, sigma: f64) -> bool {
    if sigma == 0.0 || dx_norm == 0.0 {
        return true;
    }
    dw_norm >= sigma * dx_norm
}

/// Per-evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    /// Number of evaluations of `g` so far.
    pub k: usize,
    pub res_inf: f64,
    pub res_l2: f64,
    /// Gain of the coefficient solve that followed this evaluation.
    pub theta: Option<f64>,
    /// The history was cleared by the safeguard at this step.
    pub restart: bool,
    pub rank_deficient: bool,
    pub ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    Diverged,
    MaxIter,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::Diverged => "diverged",
            Status::MaxIter => "max_iter",
        })
    }
}

/// Iteration state between evaluations of `g`.
#[derive(Debug, Clone)]
pub struct AaState {
    /// Point at which the latest residual was evaluated.
    pub x_prev: Vec<f64>,
    /// Next point to evaluate.
    pub x_curr: Vec<f64>,
    pub w_prev: Option<Vec<f64>>,
    /// Residual at `x_prev`.
    pub w_curr: Vec<f64>,
    e: VecDeque<Vec<f64>>,
    f: VecDeque<Vec<f64>>,
    /// Number of evaluations of `g`.
    pub k: usize,
    pub theta_last: Option<f64>,
    pub restarts: usize,
}

fn evaluate(g: &mut impl FnMut(&[f64]) -> Result<Vec<f64>>, x: &[f64], k: usize) -> Result<Vec<f64>> {
    let gx = g(x).map_err(|e| Error::MapEvaluation {
        step: k,
        source: Box::new(e),
    })?;
    if gx.len() != x.len() {
        return Err(Error::Dimension {
            context: "fixed-point map output",
            expected: x.len(),
            got: gx.len(),
        });
    }
    Ok(gx)
}

fn is_bad(w: &[f64], cfg: &AaConfig) -> bool {
    let n = norm_inf(w);
    !n.is_finite() || n > cfg.divergence_threshold || w.iter().any(|v| !v.is_finite())
}

impl AaState {
    /// Evaluate `g(x0)` and take the first, plain step.
    pub fn initialize(
        x0: Vec<f64>,
        g: &mut impl FnMut(&[f64]) -> Result<Vec<f64>>,
        cfg: &AaConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let gx = evaluate(g, &x0, 1)?;
        let w: Vec<f64> = gx.iter().zip(&x0).map(|(a, b)| a - b).collect();
        let beta = if cfg.first_step_damped { cfg.damping.beta(1) } else { 1.0 };
        let x1 = if is_bad(&w, cfg) || norm2(&w) == 0.0 {
            x0.clone()
        } else {
            damped(&x0, &gx, &w, beta)
        };
        Ok(Self {
            x_prev: x0,
            x_curr: x1,
            w_prev: None,
            w_curr: w,
            e: VecDeque::new(),
            f: VecDeque::new(),
            k: 1,
            theta_last: None,
            restarts: 0,
        })
    }

    /// Current window width.
    pub fn history_len(&self) -> usize {
        self.f.len()
    }

    /// Iterate differences, newest first.
    pub fn e_columns(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.e.iter()
    }

    /// Residual differences, newest first.
    pub fn f_columns(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.f.iter()
    }

    /// Evaluate `g` at `x_curr` and compute the next iterate.
    ///
    /// Returns the coefficient solve, if one took place, and whether the
    /// safeguard restarted the history. A non-finite or oversized residual,
    /// or an exactly zero one, leaves the iterate unchanged.
    pub fn step(
        &mut self,
        g: &mut impl FnMut(&[f64]) -> Result<Vec<f64>>,
        cfg: &AaConfig,
    ) -> Result<(Option<Coefficients>, bool)> {
        let k = self.k + 1;
        let gx = evaluate(g, &self.x_curr, k)?;
        let w: Vec<f64> = gx.iter().zip(&self.x_curr).map(|(a, b)| a - b).collect();
        let x = std::mem::take(&mut self.x_curr);
        let dx: Vec<f64> = x.iter().zip(&self.x_prev).map(|(a, b)| a - b).collect();
        let dw: Vec<f64> = w.iter().zip(&self.w_curr).map(|(a, b)| a - b).collect();
        self.x_prev = x;
        self.w_prev = Some(std::mem::replace(&mut self.w_curr, w));
        self.k = k;
        let x = &self.x_prev;
        let w = &self.w_curr;

        if is_bad(w, cfg) || norm2(w) == 0.0 {
            self.x_curr = x.clone();
            self.theta_last = None;
            return Ok((None, false));
        }
        let beta = cfg.damping.beta(k);
        if cfg.depth == 0 {
            self.x_curr = damped(x, &gx, w, beta);
            self.theta_last = None;
            return Ok((None, false));
        }

        let restart = !safeguard_check(norm2(&dw), norm2(&dx), cfg.safeguard_sigma);
        if restart {
            self.e.clear();
            self.f.clear();
            self.restarts += 1;
            self.x_curr = damped(x, &gx, w, beta);
            self.theta_last = None;
            return Ok((None, true));
        }
        self.e.push_front(dx);
        self.f.push_front(dw);
        self.e.truncate(cfg.depth);
        self.f.truncate(cfg.depth);

        let cols: Vec<Vec<f64>> = self.f.iter().cloned().collect();
        let coef = solve_coefficients(&cols, w, cfg.ridge)?;
        let mut next: Vec<f64> = x.iter().zip(w).map(|(a, b)| a + beta * b).collect();
        for ((ecol, fcol), &gm) in self.e.iter().zip(&self.f).zip(&coef.gamma) {
            for ((xn, e), f) in next.iter_mut().zip(ecol).zip(fcol) {
                *xn -= (e + beta * f) * gm;
            }
        }
        self.x_curr = next;
        self.theta_last = Some(coef.theta);
        Ok((Some(coef), false))
    }
}

/// `x + beta w`, returning `g(x)` itself when `beta = 1`.
fn damped(x: &[f64], gx: &[f64], w: &[f64], beta: f64) -> Vec<f64> {
    if beta == 1.0 {
        gx.to_vec()
    } else {
        x.iter().zip(w).map(|(a, b)| a + beta * b).collect()
    }
}

#[derive(Debug, Clone)]
pub struct AaOutcome {
    /// Point whose residual was evaluated last. On convergence this is the
    /// certified iterate.
    pub x: Vec<f64>,
    pub status: Status,
    pub iterations: usize,
    pub restarts: usize,
    pub final_res_inf: f64,
}

/// Iterate until `|w|_inf < tol_inf`, divergence, or `max_iter` evaluations.
///
/// `observer` receives one record per evaluation of `g`.
pub fn run(
    x0: Vec<f64>,
    mut g: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    cfg: &AaConfig,
    mut observer: impl FnMut(&StepRecord),
) -> Result<AaOutcome> {
    let t0 = Instant::now();
    let mut state = AaState::initialize(x0, &mut g, cfg)?;
    let mut report = |state: &AaState, coef: Option<&Coefficients>, restart: bool, t: Instant| {
        let rec = StepRecord {
            k: state.k,
            res_inf: norm_inf(&state.w_curr),
            res_l2: norm2(&state.w_curr),
            theta: coef.filter(|c| !c.converged).map(|c| c.theta),
            restart,
            rank_deficient: coef.is_some_and(|c| c.rank_deficient),
            ms: t.elapsed().as_secs_f64() * 1e3,
        };
        observer(&rec);
        rec.res_inf
    };
    let mut res = report(&state, None, false, t0);
    loop {
        let status = if res.is_nan() || !(res <= cfg.divergence_threshold) {
            Some(Status::Diverged)
        } else if res < cfg.tol_inf {
            Some(Status::Converged)
        } else if state.k >= cfg.max_iter {
            Some(Status::MaxIter)
        } else {
            None
        };
        if let Some(status) = status {
            return Ok(AaOutcome {
                x: state.x_prev,
                status,
                iterations: state.k,
                restarts: state.restarts,
                final_res_inf: res,
            });
        }
        let t = Instant::now();
        let (coef, restart) = state.step(&mut g, cfg)?;
        res = report(&state, coef.as_ref(), restart, t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine(a: Vec<Vec<f64>>, b: Vec<f64>) -> impl FnMut(&[f64]) -> Result<Vec<f64>> {
        move |x: &[f64]| {
            Ok(a.iter()
                .zip(&b)
                .map(|(row, bi)| row.iter().zip(x).map(|(r, v)| r * v).sum::<f64>() + bi)
                .collect())
        }
    }

    #[test]
    fn constant_map_first_step() {
        let c = vec![3.0, -1.0];
        let mut g = |_: &[f64]| Ok(vec![3.0, -1.0]);
        let st = AaState::initialize(vec![0.0, 0.0], &mut g, &AaConfig::default()).unwrap();
        assert_eq!(st.x_curr, c);
        let cfg = AaConfig {
            first_step_damped: true,
            damping: Damping::Constant(0.5),
            ..AaConfig::default()
        };
        let st = AaState::initialize(vec![0.0, 0.0], &mut g, &cfg).unwrap();
        assert_eq!(st.x_curr, vec![1.5, -0.5]);
    }

    #[test]
    fn halving_map_first_step() {
        let mut g = |x: &[f64]| Ok(x.iter().map(|v| v / 2.0).collect());
        let st = AaState::initialize(vec![1.0, 1.0], &mut g, &AaConfig::default()).unwrap();
        assert_eq!(st.w_curr, vec![-0.5, -0.5]);
        assert_eq!(st.x_curr, vec![0.5, 0.5]);
    }

    #[test]
    fn collinear_residuals() {
        let c = solve_coefficients(&[vec![-1.0, 0.0]], &[1.0, 0.0], 0.0).unwrap();
        assert!((c.gamma[0] + 1.0).abs() < 1e-15);
        assert!(c.theta.abs() < 1e-15);
    }

    #[test]
    fn one_column_least_squares() {
        let c = solve_coefficients(&[vec![1.0, -1.0]], &[1.0, 0.0], 0.0).unwrap();
        assert!((c.gamma[0] - 0.5).abs() < 1e-15);
        assert!((c.theta - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ridge_shifts_the_triangular_factor() {
        let c = solve_coefficients(&[vec![1.0, -1.0]], &[1.0, 0.0], 1.0).unwrap();
        let expect = (1.0 / 2f64.sqrt()) / (2f64.sqrt() + 1.0);
        assert!((c.gamma[0] - expect).abs() < 1e-15);
        assert!((c.gamma[0] - 0.29289).abs() < 1e-5);
    }

    #[test]
    fn zero_residual_signals_convergence() {
        let c = solve_coefficients(&[vec![1.0]], &[0.0], 0.0).unwrap();
        assert!(c.converged);
    }

    #[test]
    fn dependent_columns_fall_back_to_minimum_norm() {
        let f = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]];
        let c = solve_coefficients(&f, &[1.0, 1.0, 1.0], 0.0).unwrap();
        assert!(c.rank_deficient);
        // Minimizers satisfy g0 + 2 g1 = 1; the shortest is (1/5, 2/5).
        assert!((c.gamma[0] - 0.2).abs() < 1e-12 && (c.gamma[1] - 0.4).abs() < 1e-12);
        assert!((c.theta - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn safeguard_examples() {
        assert!(!safeguard_check(0.0, 1.0, 0.1));
        assert!(safeguard_check(0.0, 1.0, 0.0));
        assert!(safeguard_check(1.0, 2.0, 0.4));
        assert!(safeguard_check(0.0, 0.0, 0.4));
    }

    #[test]
    fn scalar_affine_map_is_solved_by_one_secant_step() {
        let cfg = AaConfig {
            depth: 1,
            ..AaConfig::default()
        };
        let mut g = |x: &[f64]| Ok(vec![0.5 * x[0] + 1.0]);
        let mut st = AaState::initialize(vec![0.0], &mut g, &cfg).unwrap();
        assert_eq!(st.x_curr, vec![1.0]);
        st.step(&mut g, &cfg).unwrap();
        assert!((st.x_curr[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn full_window_solves_affine_problem() {
        let a = vec![
            vec![0.3, 0.1, 0.0, -0.1, 0.05],
            vec![0.0, 0.2, 0.1, 0.0, 0.1],
            vec![0.1, 0.0, -0.4, 0.1, 0.0],
            vec![0.05, 0.1, 0.0, 0.25, 0.1],
            vec![0.0, -0.1, 0.1, 0.0, 0.5],
        ];
        let b = vec![1.0, -2.0, 0.5, 3.0, 1.0];
        let cfg = AaConfig {
            depth: 5,
            ..AaConfig::default()
        };
        let mut g = affine(a, b);
        let mut st = AaState::initialize(vec![0.0; 5], &mut g, &cfg).unwrap();
        let w1 = norm2(&st.w_curr);
        for _ in 0..6 {
            st.step(&mut g, &cfg).unwrap();
        }
        assert!(norm2(&st.w_curr) <= 1e-10 * w1, "{}", norm2(&st.w_curr));
    }

    #[test]
    fn window_keeps_newest_columns() {
        let cfg = AaConfig {
            depth: 2,
            ..AaConfig::default()
        };
        let mut g = affine(vec![vec![0.5, 0.1], vec![0.2, 0.3]], vec![1.0, 1.0]);
        let mut st = AaState::initialize(vec![0.0, 0.0], &mut g, &cfg).unwrap();
        let mut last_dx = Vec::new();
        for _ in 0..4 {
            let before = (st.x_curr.clone(), st.x_prev.clone());
            st.step(&mut g, &cfg).unwrap();
            last_dx = before.0.iter().zip(&before.1).map(|(a, b)| a - b).collect();
        }
        assert_eq!(st.history_len(), 2);
        assert_eq!(st.e_columns().next().unwrap(), &last_dx);
    }

    #[test]
    fn run_reports_status() {
        let mut rows = Vec::new();
        let out = run(vec![0.0], |x| Ok(vec![0.5 * x[0] + 1.0]), &AaConfig::plain(), |r| rows.push(r.clone())).unwrap();
        assert_eq!(out.status, Status::Converged);
        assert_eq!(rows.len(), out.iterations);
        assert!((out.x[0] - 2.0).abs() < 1e-5);

        let out = run(vec![1.0], |x| Ok(vec![3.0 * x[0]]), &AaConfig::plain(), |_| {}).unwrap();
        assert_eq!(out.status, Status::Diverged);

        let cfg = AaConfig {
            max_iter: 3,
            ..AaConfig::plain()
        };
        let out = run(vec![0.0], |x| Ok(vec![0.99 * x[0] + 1.0]), &cfg, |_| {}).unwrap();
        assert_eq!((out.status, out.iterations), (Status::MaxIter, 3));
    }

    #[test]
    fn map_errors_carry_the_step() {
        let mut calls = 0;
        let err = run(
            vec![0.0],
            |x| {
                calls += 1;
                if calls == 3 {
                    Err(Error::NonFinite("test"))
                } else {
                    Ok(vec![0.5 * x[0] + 1.0])
                }
            },
            &AaConfig::plain(),
            |_| {},
        )
        .unwrap_err();
        assert!(matches!(err, Error::MapEvaluation { step: 3, .. }));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for cfg in [
            AaConfig { damping: Damping::Constant(0.0), ..AaConfig::default() },
            AaConfig { damping: Damping::Constant(1.5), ..AaConfig::default() },
            AaConfig { tol_inf: 0.0, ..AaConfig::default() },
            AaConfig { max_iter: 0, ..AaConfig::default() },
            AaConfig { ridge: -1.0, ..AaConfig::default() },
        ] {
            assert!(cfg.validate().is_err());
        }
    }
}
