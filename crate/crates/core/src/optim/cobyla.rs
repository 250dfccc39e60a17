//! Powell's COBYLA without constraints.
//!
//! The method keeps `n + 1` interpolation points: the incumbent `x_opt` and
//! `n` vertices stored as displacements from it. Those points define a
//! linear model whose gradient comes from the inverse of the displacement
//! matrix. Steps of length `ρ` go against the model gradient. When the
//! simplex degenerates a geometry step replaces one vertex. Each time the
//! model stops predicting progress, `ρ` is halved, down to `rho_end`.

use nalgebra::DMatrix;

use super::{Method, OptimizeOptions, OptimizerReport, Termination, Tracker};
use crate::error::Result;

/// A vertex is too far from `x_opt` beyond `PARETA·ρ`.
const PARETA: f64 = 2.1;
/// A vertex is too close to its opposite face below `PARSIG·ρ`.
const PARSIG: f64 = 0.25;
/// Length of a geometry step relative to `ρ`.
const GAMMA: f64 = 0.5;
/// Preferred edge length when choosing which vertex to drop.
const DELTA: f64 = 1.1;
/// Ratio of actual to predicted reduction below which `ρ` shrinks.
const POOR_RATIO: f64 = 0.1;

struct Simplex {
    base: Vec<f64>,
    f_base: f64,
    /// Row `j` is the displacement of vertex `j` from `base`.
    disp: DMatrix<f64>,
    f_vertex: Vec<f64>,
}

impl Simplex {
    fn n(&self) -> usize {
        self.base.len()
    }

    fn vertex(&self, j: usize) -> Vec<f64> {
        self.base
            .iter()
            .enumerate()
            .map(|(i, b)| b + self.disp[(j, i)])
            .collect()
    }

    /// Makes vertex `j` the incumbent and the old incumbent vertex `j`.
    fn recenter_on(&mut self, j: usize) {
        let n = self.n();
        let shift: Vec<f64> = (0..n).map(|i| self.disp[(j, i)]).collect();
        for r in 0..n {
            if r == j {
                continue;
            }
            for (i, s) in shift.iter().enumerate() {
                self.disp[(r, i)] -= s;
            }
        }
        for (i, s) in shift.iter().enumerate() {
            self.base[i] += s;
            self.disp[(j, i)] = -s;
        }
        std::mem::swap(&mut self.f_base, &mut self.f_vertex[j]);
    }

    fn inverse(&self) -> Option<DMatrix<f64>> {
        self.disp.clone().try_inverse()
    }

    /// Gradient of the interpolating linear model.
    fn model_gradient(&self, inv: &DMatrix<f64>) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| inv[(i, j)] * (self.f_vertex[j] - self.f_base)).sum())
            .collect()
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn column(inv: &DMatrix<f64>, j: usize) -> Vec<f64> {
    (0..inv.nrows()).map(|i| inv[(i, j)]).collect()
}

pub fn cobyla(objective: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &OptimizeOptions) -> Result<OptimizerReport> {
    opts.validate()?;
    let (mut tracker, f0) = Tracker::start(objective, x0, opts.max_evals)?;
    let n = x0.len();
    let mut rho = opts.rho_begin;
    let mut iterations = 0;

    macro_rules! eval_or_stop {
        ($x:expr) => {
            match tracker.eval(&$x) {
                Some(v) => v,
                None => return Ok(tracker.finish(Method::Cobyla, Termination::MaxEvals, iterations, 0)),
            }
        };
    }

    let mut simplex = Simplex {
        base: x0.to_vec(),
        f_base: f0,
        disp: DMatrix::identity(n, n) * rho,
        f_vertex: vec![f64::INFINITY; n],
    };
    for j in 0..n {
        let x = simplex.vertex(j);
        simplex.f_vertex[j] = eval_or_stop!(x);
        if simplex.f_vertex[j] < simplex.f_base {
            simplex.recenter_on(j);
        }
    }

    loop {
        iterations += 1;
        let Some(inv) = simplex.inverse() else {
            // rebuild a fresh simplex around the incumbent
            simplex.disp = DMatrix::identity(n, n) * rho;
            for j in 0..n {
                let x = simplex.vertex(j);
                simplex.f_vertex[j] = eval_or_stop!(x);
            }
            if let Some(j) = (0..n).filter(|&j| simplex.f_vertex[j] < simplex.f_base).min_by(|&a, &b| {
                simplex.f_vertex[a].total_cmp(&simplex.f_vertex[b])
            }) {
                simplex.recenter_on(j);
            }
            continue;
        };

        let veta: Vec<f64> = (0..n)
            .map(|j| norm2(&(0..n).map(|i| simplex.disp[(j, i)]).collect::<Vec<_>>()))
            .collect();
        let vsig: Vec<f64> = (0..n).map(|j| 1.0 / norm2(&column(&inv, j))).collect();
        let grad = simplex.model_gradient(&inv);
        let gnorm = norm2(&grad);

        // geometry repair
        let too_far = (0..n).filter(|&j| veta[j] > PARETA * rho).max_by(|&a, &b| veta[a].total_cmp(&veta[b]));
        let too_flat = (0..n).filter(|&j| vsig[j] < PARSIG * rho).min_by(|&a, &b| vsig[a].total_cmp(&vsig[b]));
        if let Some(j) = too_far.or(too_flat) {
            let normal = column(&inv, j);
            let scale = GAMMA * rho * vsig[j];
            let mut dx: Vec<f64> = normal.iter().map(|v| v * scale).collect();
            if grad.iter().zip(&dx).map(|(g, d)| g * d).sum::<f64>() > 0.0 {
                dx.iter_mut().for_each(|v| *v = -*v);
            }
            let x: Vec<f64> = simplex.base.iter().zip(&dx).map(|(b, d)| b + d).collect();
            let fx = eval_or_stop!(x);
            for (i, d) in dx.iter().enumerate() {
                simplex.disp[(j, i)] = *d;
            }
            simplex.f_vertex[j] = fx;
            if fx < simplex.f_base {
                simplex.recenter_on(j);
            }
            continue;
        }

        let mut reduce = gnorm == 0.0 || !gnorm.is_finite();
        if !reduce {
            let step: Vec<f64> = grad.iter().map(|g| -rho * g / gnorm).collect();
            let predicted = rho * gnorm;
            let x: Vec<f64> = simplex.base.iter().zip(&step).map(|(b, d)| b + d).collect();
            let fx = eval_or_stop!(x);
            let improved = fx < simplex.f_base;
            let ratio = (simplex.f_base - fx) / predicted;

            // sigma_j: barycentric weight of vertex j in the new displacement
            let sigma: Vec<f64> = (0..n)
                .map(|j| column(&inv, j).iter().zip(&step).map(|(c, s)| c * s).sum::<f64>().abs())
                .collect();
            let mut drop = None;
            let mut best = if improved { 0.0 } else { 1.0 };
            for j in 0..n {
                if sigma[j] > best {
                    best = sigma[j];
                    drop = Some(j);
                }
            }
            let mut edge_max = DELTA * rho;
            let mut far = None;
            for j in 0..n {
                let sigbar = sigma[j] * vsig[j];
                if sigbar >= PARSIG * rho || sigbar >= vsig[j] {
                    let d = if improved {
                        norm2(&(0..n).map(|i| step[i] - simplex.disp[(j, i)]).collect::<Vec<_>>())
                    } else {
                        veta[j]
                    };
                    if d > edge_max {
                        edge_max = d;
                        far = Some(j);
                    }
                }
            }
            if far.is_some() {
                drop = far;
            }
            if let Some(j) = drop {
                for (i, s) in step.iter().enumerate() {
                    simplex.disp[(j, i)] = *s;
                }
                simplex.f_vertex[j] = fx;
                if improved {
                    simplex.recenter_on(j);
                }
            }
            reduce = !(ratio >= POOR_RATIO) && drop.is_none();
            if !(ratio >= POOR_RATIO) && drop.is_some() {
                // the replaced vertex changes the model; re-check before shrinking
                continue;
            }
        }

        if reduce {
            if rho <= opts.rho_end {
                return Ok(tracker.finish(Method::Cobyla, Termination::XTol, iterations, 0));
            }
            rho *= 0.5;
            if rho <= 1.5 * opts.rho_end {
                rho = opts.rho_end;
            }
        }
    }
}
