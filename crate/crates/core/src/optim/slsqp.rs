//! Sequential quadratic programming, unconstrained specialization.
//!
//! Each iteration minimizes the quadratic model `gᵀd + ½dᵀBd`. With
//! `B = LLᵀ` that is the least-squares problem `min ‖Lᵀd + L⁻¹g‖²`, solved by
//! the two triangular systems of the Cholesky factor. `B` is a BFGS
//! approximation with Powell's damping, so it stays positive definite.

use nalgebra::{DMatrix, DVector};

use super::lbfgs::{ARMIJO_C1, MAX_BACKTRACKS};
use super::{norm_inf, Method, OptimizeOptions, OptimizerReport, Termination, Tracker};
use crate::error::Result;

const DAMPING_THRESHOLD: f64 = 0.2;

/// Solves `B d = −g`, regularizing `B` until the factorization succeeds.
fn quadratic_step(b: &mut DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let n = g.len();
    if let Some(chol) = b.clone().cholesky() {
        return -chol.solve(g);
    }
    let scale = b.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut tau = 1e-8 * scale;
    for _ in 0..30 {
        let shifted = &*b + DMatrix::<f64>::identity(n, n) * tau;
        if let Some(chol) = shifted.clone().cholesky() {
            *b = shifted;
            return -chol.solve(g);
        }
        tau *= 10.0;
    }
    *b = DMatrix::identity(n, n);
    -g.clone()
}

/// Damped BFGS update of `B` with the pair `(s, y)`.
fn damped_update(b: &mut DMatrix<f64>, s: &DVector<f64>, y: &DVector<f64>) {
    let bs = &*b * s;
    let sbs = s.dot(&bs);
    if !(sbs > 0.0) || !sbs.is_finite() {
        return;
    }
    let sy = s.dot(y);
    let theta = if sy < DAMPING_THRESHOLD * sbs {
        (1.0 - DAMPING_THRESHOLD) * sbs / (sbs - sy)
    } else {
        1.0
    };
    let r = y * theta + &bs * (1.0 - theta);
    let sr = s.dot(&r);
    if !(sr > 0.0) || !sr.is_finite() {
        return;
    }
    *b -= &bs * bs.transpose() / sbs;
    *b += &r * r.transpose() / sr;
}

/// Backtracking factor from the quadratic interpolant of the line function,
/// kept within `[0.1, 0.5]` of the current step.
fn interpolated_step(step: f64, f0: f64, slope: f64, ft: f64) -> f64 {
    let curvature = ft - f0 - step * slope;
    let candidate = if curvature > 0.0 && curvature.is_finite() {
        -slope * step * step / (2.0 * curvature)
    } else {
        0.5 * step
    };
    candidate.clamp(0.1 * step, 0.5 * step)
}

pub fn slsqp(
    objective: &dyn Fn(&[f64]) -> f64,
    gradient: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    opts: &OptimizeOptions,
) -> Result<OptimizerReport> {
    opts.validate()?;
    let (mut tracker, f0) = Tracker::start(objective, x0, opts.max_evals)?;
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let mut f = f0;
    let mut g = DVector::from_vec(gradient(x.as_slice()));
    let mut grad_evals = 1;
    let mut iterations = 0;
    let mut b = DMatrix::<f64>::identity(n, n);
    let mut scaled = false;

    let finish = |tracker: Tracker, t, it, ge| Ok(tracker.finish(Method::Slsqp, t, it, ge));

    loop {
        if norm_inf(g.as_slice()) < opts.f_tol {
            return finish(tracker, Termination::FTol, iterations, grad_evals);
        }
        if g.iter().any(|v| !v.is_finite()) {
            return finish(tracker, Termination::XTol, iterations, grad_evals);
        }
        iterations += 1;

        let mut d = quadratic_step(&mut b, &g);
        if !scaled {
            // identity model on the first step: limit its length
            let len = norm_inf(d.as_slice());
            if len > 1.0 {
                d /= len;
            }
        }
        let mut slope = g.dot(&d);
        if !(slope < 0.0) {
            b = DMatrix::identity(n, n);
            d = -&g;
            slope = g.dot(&d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let trial = &x + &d * step;
            let Some(ft) = tracker.eval(trial.as_slice()) else {
                return finish(tracker, Termination::MaxEvals, iterations, grad_evals);
            };
            if ft <= f + ARMIJO_C1 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step = interpolated_step(step, f, slope, ft);
        }
        let Some((x_new, f_new)) = accepted else {
            if b != DMatrix::<f64>::identity(n, n) {
                b = DMatrix::identity(n, n);
                scaled = false;
                continue;
            }
            return finish(tracker, Termination::XTol, iterations, grad_evals);
        };

        let g_new = DVector::from_vec(gradient(x_new.as_slice()));
        grad_evals += 1;
        let s = &x_new - &x;
        let y = &g_new - &g;
        if !scaled {
            let sy = s.dot(&y);
            let yy = y.dot(&y);
            if sy > 0.0 && yy > 0.0 {
                b = DMatrix::identity(n, n) * (yy / sy);
                scaled = true;
            }
        }
        damped_update(&mut b, &s, &y);

        x = x_new;
        f = f_new;
        g = g_new;
        if norm_inf(s.as_slice()) < opts.x_tol && norm_inf(g.as_slice()) >= opts.f_tol {
            return finish(tracker, Termination::XTol, iterations, grad_evals);
        }
    }
}
