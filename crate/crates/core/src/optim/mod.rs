//! Local minimizers behind one interface.
//!
//! Every kernel evaluates the objective through [`Tracker`], which owns the
//! evaluation budget and the incumbent. The reported `(x_best, f_best)` is
//! the best point actually evaluated, so `f_best == objective(x_best)`
//! exactly and never exceeds `f(x0)`. Non-finite objective values are
//! recorded and replaced by `+∞`.

mod cobyla;
mod lbfgs;
mod nelder_mead;
mod slsqp;
pub mod testfns;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

pub use cobyla::cobyla;
pub use lbfgs::lbfgs;
pub use nelder_mead::{gao_han_coefficients, nelder_mead, NelderMeadCoefficients};
pub use slsqp::slsqp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Lbfgs,
    Cobyla,
    NelderMead,
    Slsqp,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lbfgs, Method::Cobyla, Method::NelderMead, Method::Slsqp];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lbfgs => "lbfgs",
            Method::Cobyla => "cobyla",
            Method::NelderMead => "neldermead",
            Method::Slsqp => "slsqp",
        }
    }

    pub fn uses_gradient(self) -> bool {
        matches!(self, Method::Lbfgs | Method::Slsqp)
    }

}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "lbfgs" | "lbfgsb" => Ok(Method::Lbfgs),
            "cobyla" => Ok(Method::Cobyla),
            "neldermead" | "nm" => Ok(Method::NelderMead),
            "slsqp" => Ok(Method::Slsqp),
            _ => Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    /// Budget of objective evaluations, including the one at `x0`.
    pub max_evals: usize,
    /// Function-value tolerance. Gradient methods compare `‖∇f‖∞` against it.
    pub f_tol: f64,
    /// Step / simplex-diameter tolerance.
    pub x_tol: f64,
    /// Number of curvature pairs kept by L-BFGS.
    pub lbfgs_memory: usize,
    /// Initial COBYLA trust radius.
    pub rho_begin: f64,
    /// Final COBYLA trust radius.
    pub rho_end: f64,
    /// Central-difference step used when [`minimize`] builds the gradient.
    pub fd_step: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_evals: 10_000,
            f_tol: 1e-6,
            x_tol: 1e-6,
            lbfgs_memory: 10,
            rho_begin: 0.5,
            rho_end: 1e-6,
            fd_step: 1e-6,
        }
    }
}

impl OptimizeOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
            }
        };
        if self.max_evals == 0 {
            return Err(Error::InvalidArgument("max_evals must be at least 1".into()));
        }
        if self.lbfgs_memory == 0 {
            return Err(Error::InvalidArgument("lbfgs_memory must be at least 1".into()));
        }
        positive("f_tol", self.f_tol)?;
        positive("x_tol", self.x_tol)?;
        positive("rho_begin", self.rho_begin)?;
        positive("rho_end", self.rho_end)?;
        positive("fd_step", self.fd_step)?;
        if self.rho_end > self.rho_begin {
            return Err(Error::InvalidArgument("rho_end must not exceed rho_begin".into()));
        }
        Ok(())
    }
}

/// Why a kernel stopped.
///
/// Gradient methods report `FTol` when `‖∇f‖∞ < f_tol`. COBYLA reports
/// `XTol` once the trust radius reaches `rho_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    FTol,
    XTol,
    MaxEvals,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::FTol => "ftol",
            Termination::XTol => "xtol",
            Termination::MaxEvals => "maxevals",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerReport {
    pub method: Method,
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub n_evals: usize,
    pub n_grad_evals: usize,
    pub iterations: usize,
    pub termination: Termination,
    /// Evaluations that returned NaN or ±∞ and were treated as `+∞`.
    pub rejected_evals: usize,
    pub wall_time: Duration,
}

impl OptimizerReport {
    pub fn converged(&self) -> bool {
        self.termination != Termination::MaxEvals
    }

    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.method == other.method
            && self.x_best.iter().map(|v| v.to_bits()).eq(other.x_best.iter().map(|v| v.to_bits()))
            && self.f_best.to_bits() == other.f_best.to_bits()
            && self.n_evals == other.n_evals
            && self.n_grad_evals == other.n_grad_evals
            && self.iterations == other.iterations
            && self.termination == other.termination
            && self.rejected_evals == other.rejected_evals
    }
}

/// Budgeted objective wrapper tracking the best evaluated point.
pub(crate) struct Tracker<'a> {
    f: &'a dyn Fn(&[f64]) -> f64,
    evals: usize,
    max_evals: usize,
    rejected: usize,
    best_x: Vec<f64>,
    best_f: f64,
    started: Instant,
}

impl<'a> Tracker<'a> {
    /// Evaluates `x0`, which must give a finite value.
    pub(crate) fn start(f: &'a dyn Fn(&[f64]) -> f64, x0: &[f64], max_evals: usize) -> Result<(Self, f64)> {
        let started = Instant::now();
        if x0.is_empty() {
            return Err(Error::InvalidStart("x0 must have at least one coordinate".into()));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStart("x0 contains non-finite coordinates".into()));
        }
        let f0 = f(x0);
        if !f0.is_finite() {
            return Err(Error::InvalidStart(format!("objective is {f0} at x0")));
        }
        Ok((
            Self {
                f,
                evals: 1,
                max_evals,
                rejected: 0,
                best_x: x0.to_vec(),
                best_f: f0,
                started,
            },
            f0,
        ))
    }

    /// `None` once the budget is spent.
    pub(crate) fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.evals >= self.max_evals {
            return None;
        }
        self.evals += 1;
        let mut v = (self.f)(x);
        if !v.is_finite() {
            self.rejected += 1;
            v = f64::INFINITY;
        }
        if v < self.best_f {
            self.best_f = v;
            self.best_x.clear();
            self.best_x.extend_from_slice(x);
        }
        Some(v)
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.evals >= self.max_evals
    }

    pub(crate) fn finish(self, method: Method, termination: Termination, iterations: usize, grad_evals: usize) -> OptimizerReport {
        OptimizerReport {
            method,
            x_best: self.best_x,
            f_best: self.best_f,
            n_evals: self.evals,
            n_grad_evals: grad_evals,
            iterations,
            termination,
            rejected_evals: self.rejected,
            wall_time: self.started.elapsed(),
        }
    }
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn central_difference<'a>(objective: &'a dyn Fn(&[f64]) -> f64, h: f64) -> impl Fn(&[f64]) -> Vec<f64> + 'a {
    move |x: &[f64]| {
        let mut probe = x.to_vec();
        (0..x.len())
            .map(|i| {
                let orig = probe[i];
                probe[i] = orig + h;
                let up = objective(&probe);
                probe[i] = orig - h;
                let down = objective(&probe);
                probe[i] = orig;
                (up - down) / (2.0 * h)
            })
            .collect()
    }
}

/// Minimizes `objective` from `x0`. Gradient methods use central
/// differences with `opts.fd_step`; those probes are not charged to
/// `n_evals`.
pub fn minimize<F>(objective: F, x0: &[f64], method: Method, opts: &OptimizeOptions) -> Result<OptimizerReport>
where
    F: Fn(&[f64]) -> f64,
{
    let f: &dyn Fn(&[f64]) -> f64 = &objective;
    let grad = central_difference(f, opts.fd_step);
    minimize_with_gradient(f, grad, x0, method, opts)
}

/// Like [`minimize`] but with a caller-supplied gradient. The gradient is
/// ignored by the derivative-free methods.
pub fn minimize_with_gradient<F, G>(
    objective: F,
    gradient: G,
    x0: &[f64],
    method: Method,
    opts: &OptimizeOptions,
) -> Result<OptimizerReport>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    match method {
        Method::Lbfgs => lbfgs(&objective, &gradient, x0, opts),
        Method::Slsqp => slsqp(&objective, &gradient, x0, opts),
        Method::Cobyla => cobyla(&objective, x0, opts),
        Method::NelderMead => nelder_mead(&objective, x0, opts),
    }
}
