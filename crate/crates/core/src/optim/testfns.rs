//! Standard test functions and the optimizer validation battery.

use super::{minimize, Method, OptimizeOptions, OptimizerReport};
use crate::error::Result;

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Chained Rosenbrock function, minimum 0 at `(1, …, 1)`.
pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

pub fn rosenbrock_gradient(x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len().saturating_sub(1) {
        let t = x[i + 1] - x[i] * x[i];
        g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
        g[i + 1] += 200.0 * t;
    }
    g
}

/// Beale function, minimum 0 at `(3, 0.5)`.
pub fn beale(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (1.5 - a + a * b).powi(2) + (2.25 - a + a * b * b).powi(2) + (2.625 - a + a * b * b * b).powi(2)
}

const SPD: [[f64; 3]; 3] = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
const SPD_LINEAR: [f64; 3] = [1.0, -1.0, 0.5];

/// `xᵀAx − bᵀx` with a fixed SPD `A`.
pub fn spd_quadratic(x: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            total += x[i] * SPD[i][j] * x[j];
        }
        total -= SPD_LINEAR[i] * x[i];
    }
    total
}

pub fn spd_quadratic_gradient(x: &[f64]) -> Vec<f64> {
    (0..3)
        .map(|i| 2.0 * (0..3).map(|j| SPD[i][j] * x[j]).sum::<f64>() - SPD_LINEAR[i])
        .collect()
}

/// Solution of `2Ax = b`.
pub fn spd_quadratic_minimizer() -> Vec<f64> {
    let a = nalgebra::Matrix3::from_fn(|i, j| 2.0 * SPD[i][j]);
    let b = nalgebra::Vector3::from_column_slice(&SPD_LINEAR);
    let x = a.lu().solve(&b).expect("matrix is SPD");
    x.as_slice().to_vec()
}

#[derive(Debug, Clone)]
pub struct BatteryCase {
    pub name: &'static str,
    pub objective: fn(&[f64]) -> f64,
    pub x0: Vec<f64>,
    pub f_star: f64,
}

pub fn battery_cases() -> Vec<BatteryCase> {
    let mut cases: Vec<BatteryCase> = [2usize, 5, 10]
        .into_iter()
        .map(|n| BatteryCase {
            name: match n {
                2 => "sphere-2",
                5 => "sphere-5",
                _ => "sphere-10",
            },
            objective: sphere,
            x0: vec![1.0; n],
            f_star: 0.0,
        })
        .collect();
    cases.push(BatteryCase {
        name: "rosenbrock-2",
        objective: rosenbrock,
        x0: vec![-1.2, 1.0],
        f_star: 0.0,
    });
    cases.push(BatteryCase {
        name: "beale",
        objective: beale,
        x0: vec![1.0, 1.0],
        f_star: 0.0,
    });
    cases
}

pub const BATTERY_MAX_EVALS: usize = 20_000;
pub const BATTERY_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct BatteryOutcome {
    pub case: &'static str,
    pub method: Method,
    pub report: OptimizerReport,
    pub gap: f64,
    pub passed: bool,
}

/// Runs every method on every case with a budget of 2·10⁴ evaluations.
pub fn run_battery() -> Result<Vec<BatteryOutcome>> {
    let opts = OptimizeOptions {
        max_evals: BATTERY_MAX_EVALS,
        ..OptimizeOptions::default()
    };
    let mut out = Vec::new();
    for case in battery_cases() {
        for method in Method::ALL {
            let report = minimize(case.objective, &case.x0, method, &opts)?;
            let gap = report.f_best - case.f_star;
            out.push(BatteryOutcome {
                case: case.name,
                method,
                passed: gap < BATTERY_TOLERANCE && report.n_evals <= BATTERY_MAX_EVALS,
                gap,
                report,
            });
        }
    }
    Ok(out)
}
