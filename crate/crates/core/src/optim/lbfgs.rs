//! Limited-memory BFGS with a backtracking Armijo line search.
//!
//! The method is unbounded: the classifier's angles are periodic and its
//! weights free, so box constraints would never be active.

use std::collections::VecDeque;

use super::{dot, norm_inf, Method, OptimizeOptions, OptimizerReport, Termination, Tracker};
use crate::error::Result;

pub(crate) const ARMIJO_C1: f64 = 1e-4;
pub(crate) const MAX_BACKTRACKS: usize = 40;
const MIN_CURVATURE: f64 = 1e-10;

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// `−H·g` by the two-loop recursion.
fn two_loop(memory: &VecDeque<Pair>, g: &[f64]) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alpha = vec![0.0; memory.len()];
    for (i, p) in memory.iter().enumerate().rev() {
        alpha[i] = p.rho * dot(&p.s, &q);
        for (qj, yj) in q.iter_mut().zip(&p.y) {
            *qj -= alpha[i] * yj;
        }
    }
    if let Some(last) = memory.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for (i, p) in memory.iter().enumerate() {
        let beta = p.rho * dot(&p.y, &q);
        for (qj, sj) in q.iter_mut().zip(&p.s) {
            *qj += (alpha[i] - beta) * sj;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

pub fn lbfgs(
    objective: &dyn Fn(&[f64]) -> f64,
    gradient: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    opts: &OptimizeOptions,
) -> Result<OptimizerReport> {
    opts.validate()?;
    let (mut tracker, f0) = Tracker::start(objective, x0, opts.max_evals)?;
    let mut x = x0.to_vec();
    let mut f = f0;
    let mut g = gradient(&x);
    let mut grad_evals = 1;
    let mut iterations = 0;
    let mut memory: VecDeque<Pair> = VecDeque::with_capacity(opts.lbfgs_memory);

    let finish = |tracker: Tracker, t, it, ge| Ok(tracker.finish(Method::Lbfgs, t, it, ge));

    loop {
        if norm_inf(&g) < opts.f_tol {
            return finish(tracker, Termination::FTol, iterations, grad_evals);
        }
        if g.iter().any(|v| !v.is_finite()) {
            return finish(tracker, Termination::XTol, iterations, grad_evals);
        }
        iterations += 1;

        let mut d = if memory.is_empty() {
            let scale = 1.0 / norm_inf(&g).max(1.0);
            g.iter().map(|v| -v * scale).collect()
        } else {
            two_loop(&memory, &g)
        };
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            memory.clear();
            let scale = 1.0 / norm_inf(&g).max(1.0);
            d = g.iter().map(|v| -v * scale).collect();
            slope = dot(&g, &d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let Some(ft) = tracker.eval(&trial) else {
                return finish(tracker, Termination::MaxEvals, iterations, grad_evals);
            };
            if ft <= f + ARMIJO_C1 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if !memory.is_empty() {
                // stale curvature information; retry along steepest descent
                memory.clear();
                continue;
            }
            return finish(tracker, Termination::XTol, iterations, grad_evals);
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let g_new = gradient(&x_new);
        grad_evals += 1;
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > MIN_CURVATURE {
            if memory.len() == opts.lbfgs_memory {
                memory.pop_front();
            }
            memory.push_back(Pair { s: s.clone(), y, rho: 1.0 / sy });
        }

        x = x_new;
        f = f_new;
        g = g_new;
        if norm_inf(&s) < opts.x_tol && norm_inf(&g) >= opts.f_tol {
            return finish(tracker, Termination::XTol, iterations, grad_evals);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::testfns;

    #[test]
    fn convex_quadratic_converges_quickly() {
        let opts = OptimizeOptions {
            f_tol: 1e-9,
            x_tol: 1e-12,
            ..OptimizeOptions::default()
        };
        let r = lbfgs(&testfns::spd_quadratic, &testfns::spd_quadratic_gradient, &[1.0, -2.0, 0.5], &opts).unwrap();
        let g = testfns::spd_quadratic_gradient(&r.x_best);
        assert!(norm_inf(&g) < 1e-8, "gradient {g:?}");
        assert!(r.n_evals < 100, "{} evals", r.n_evals);
    }

    #[test]
    fn rosenbrock_to_high_accuracy() {
        let r = lbfgs(&testfns::rosenbrock, &testfns::rosenbrock_gradient, &[-1.2, 1.0], &OptimizeOptions::default()).unwrap();
        assert!((r.x_best[0] - 1.0).abs() < 1e-5 && (r.x_best[1] - 1.0).abs() < 1e-5, "{:?}", r.x_best);
    }

    #[test]
    fn two_loop_without_memory_is_steepest_descent() {
        let d = two_loop(&VecDeque::new(), &[1.0, -2.0]);
        assert_eq!(d, vec![-1.0, 2.0]);
    }
}
