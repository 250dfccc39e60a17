//! Nelder–Mead with dimension-adaptive coefficients (Gao & Han, 2012).

use super::{norm_inf, Method, OptimizeOptions, OptimizerReport, Termination, Tracker};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadCoefficients {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

/// `α = 1`, `β = 1 + 2/n`, `γ = 0.75 − 1/(2n)`, `δ = 1 − 1/n`.
///
/// For `n = 1` the shrink coefficient would vanish, so it is held at `1/2`.
pub fn gao_han_coefficients(n: usize) -> NelderMeadCoefficients {
    let nf = n.max(1) as f64;
    NelderMeadCoefficients {
        reflection: 1.0,
        expansion: 1.0 + 2.0 / nf,
        contraction: 0.75 - 1.0 / (2.0 * nf),
        shrink: if n <= 1 { 0.5 } else { 1.0 - 1.0 / nf },
    }
}

const SIMPLEX_SCALE: f64 = 0.05;

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

/// `c + t·(p − c)`.
fn along(c: &[f64], p: &[f64], t: f64) -> Vec<f64> {
    c.iter().zip(p).map(|(ci, pi)| ci + t * (pi - ci)).collect()
}

pub fn nelder_mead(objective: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &OptimizeOptions) -> Result<OptimizerReport> {
    opts.validate()?;
    let (mut tracker, f0) = Tracker::start(objective, x0, opts.max_evals)?;
    let n = x0.len();
    let coef = gao_han_coefficients(n);
    let mut iterations = 0;

    macro_rules! eval_or_stop {
        ($x:expr) => {
            match tracker.eval(&$x) {
                Some(v) => v,
                None => return Ok(tracker.finish(Method::NelderMead, Termination::MaxEvals, iterations, 0)),
            }
        };
    }

    let mut simplex = Vec::with_capacity(n + 1);
    simplex.push(Vertex { x: x0.to_vec(), f: f0 });
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += SIMPLEX_SCALE * x0[i].abs().max(1.0);
        let f = eval_or_stop!(x);
        simplex.push(Vertex { x, f });
    }

    loop {
        // stable sort keeps ties in insertion order
        simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
        let best = &simplex[0];
        let worst_f = simplex[n].f;
        let spread = if worst_f.is_finite() { worst_f - best.f } else { f64::INFINITY };
        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                let d: Vec<f64> = v.x.iter().zip(&best.x).map(|(a, b)| a - b).collect();
                norm_inf(&d)
            })
            .fold(0.0, f64::max);
        if spread < opts.f_tol && diameter < opts.x_tol {
            return Ok(tracker.finish(Method::NelderMead, Termination::FTol, iterations, 0));
        }
        if tracker.exhausted() {
            return Ok(tracker.finish(Method::NelderMead, Termination::MaxEvals, iterations, 0));
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let f_best = simplex[0].f;
        let f_second_worst = simplex[n - 1].f;
        let f_worst = simplex[n].f;

        let xr = along(&centroid, &simplex[n].x, -coef.reflection);
        let fr = eval_or_stop!(xr);

        if fr < f_best {
            let xe = along(&centroid, &xr, coef.expansion);
            let fe = eval_or_stop!(xe);
            simplex[n] = if fe < fr { Vertex { x: xe, f: fe } } else { Vertex { x: xr, f: fr } };
            continue;
        }
        if fr < f_second_worst {
            simplex[n] = Vertex { x: xr, f: fr };
            continue;
        }
        if fr < f_worst {
            let xoc = along(&centroid, &xr, coef.contraction);
            let foc = eval_or_stop!(xoc);
            if foc <= fr {
                simplex[n] = Vertex { x: xoc, f: foc };
                continue;
            }
        } else {
            let xic = along(&centroid, &xr, -coef.contraction);
            let fic = eval_or_stop!(xic);
            if fic < f_worst {
                simplex[n] = Vertex { x: xic, f: fic };
                continue;
            }
        }

        // shrink toward the best vertex
        let anchor = simplex[0].x.clone();
        for v in simplex.iter_mut().skip(1) {
            v.x = along(&anchor, &v.x, coef.shrink);
            v.f = eval_or_stop!(v.x);
        }
    }
}
