//! Small dense optimizers: limited-memory BFGS with a backtracking Armijo line
//! search, and Levenberg-Marquardt for least-squares polishing.
//!
//! Both accept a projection applied to every accepted iterate, which the
//! fiducial search uses to renormalise onto the unit sphere.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iters: usize,
    /// Stop once `f <= f_target + f_tol`.
    pub f_target: f64,
    pub f_tol: f64,
    /// Stop once the gradient norm falls below this.
    pub g_tol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self { memory: 10, max_iters: 2000, f_target: f64::NEG_INFINITY, f_tol: 0.0, g_tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    TargetReached,
    SmallGradient,
    LineSearchFailed,
    MaxIterations,
    SmallStep,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub x: DVector<f64>,
    pub value: f64,
    pub iterations: usize,
    pub termination: Termination,
}

/// Minimises `f` from `x0`. `f` returns the value and gradient.
pub fn lbfgs<F, P>(x0: DVector<f64>, mut f: F, mut project: P, opts: &LbfgsOptions) -> Outcome
where
    F: FnMut(&DVector<f64>) -> (f64, DVector<f64>),
    P: FnMut(&mut DVector<f64>),
{
    let mut x = x0;
    project(&mut x);
    let (mut fx, mut g) = f(&x);
    let mut history: VecDeque<(DVector<f64>, DVector<f64>, f64)> = VecDeque::with_capacity(opts.memory);

    for iter in 0..opts.max_iters {
        if fx <= opts.f_target + opts.f_tol {
            return Outcome { x, value: fx, iterations: iter, termination: Termination::TargetReached };
        }
        let gnorm = g.norm();
        if gnorm < opts.g_tol {
            return Outcome { x, value: fx, iterations: iter, termination: Termination::SmallGradient };
        }

        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * s.dot(&q);
            q.axpy(-a, y, 1.0);
            alphas.push(a);
        }
        let gamma = history.back().map(|(s, y, _)| s.dot(y) / y.dot(y)).unwrap_or(1.0 / gnorm.max(1e-300));
        q *= gamma;
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * y.dot(&q);
            q.axpy(a - b, s, 1.0);
        }
        let mut dir = -q;
        let mut slope = g.dot(&dir);
        if slope >= 0.0 {
            history.clear();
            dir = -g.clone() / gnorm;
            slope = g.dot(&dir);
        }

        let mut step = 1.0;
        let accepted = loop {
            let mut trial = &x + &dir * step;
            project(&mut trial);
            let (ft, gt) = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * step * slope {
                break Some((trial, ft, gt));
            }
            step *= 0.5;
            if step < 1e-20 {
                break None;
            }
        };
        let Some((xn, fn_, gn)) = accepted else {
            return Outcome { x, value: fx, iterations: iter, termination: Termination::LineSearchFailed };
        };

        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if s.norm() < 1e-300 {
            return Outcome { x, value: fx, iterations: iter, termination: Termination::SmallStep };
        }
        if sy > 1e-16 * s.norm() * y.norm() {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = xn;
        fx = fn_;
        g = gn;
    }
    Outcome { x, value: fx, iterations: opts.max_iters, termination: Termination::MaxIterations }
}

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iters: usize,
    /// Stop once `max |r_i|` falls below this.
    pub r_tol: f64,
    pub initial_lambda: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iters: 200, r_tol: 1e-15, initial_lambda: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub x: DVector<f64>,
    pub max_residual: f64,
    pub iterations: usize,
}

/// Levenberg-Marquardt on `sum r_i^2`. `rj` returns residuals and Jacobian.
/// The damping is `lambda * I`, which also regularises gauge directions that
/// leave every residual unchanged.
pub fn levenberg_marquardt<F, P>(x0: DVector<f64>, mut rj: F, mut project: P, opts: &LmOptions) -> LmOutcome
where
    F: FnMut(&DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
    P: FnMut(&mut DVector<f64>),
{
    let mut x = x0;
    project(&mut x);
    let (mut r, mut j) = rj(&x);
    let mut cost = r.norm_squared();
    let mut lambda = opts.initial_lambda;
    let n = x.len();
    let max_abs = |v: &DVector<f64>| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));

    for iter in 0..opts.max_iters {
        if max_abs(&r) < opts.r_tol {
            return LmOutcome { x, max_residual: max_abs(&r), iterations: iter };
        }
        let jt = j.transpose();
        let jtj = &jt * &j;
        let jtr = &jt * &r;
        let mut improved = false;
        for _ in 0..30 {
            let a = &jtj + DMatrix::<f64>::identity(n, n) * lambda;
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let delta = chol.solve(&(-&jtr));
            let mut trial = &x + &delta;
            project(&mut trial);
            let (rt, jt_) = rj(&trial);
            let ct = rt.norm_squared();
            if ct < cost {
                x = trial;
                r = rt;
                j = jt_;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            return LmOutcome { x, max_residual: max_abs(&r), iterations: iter };
        }
    }
    let max_residual = max_abs(&r);
    LmOutcome { x, max_residual, iterations: opts.max_iters }
}
