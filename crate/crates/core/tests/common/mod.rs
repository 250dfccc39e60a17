//! Oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use reupload::qstate::QubitState;

/// Haar-ish random pure state from a normalized complex Gaussian pair.
pub fn random_state(rng: &mut impl Rng) -> QubitState {
    let mut g = || {
        // Box–Muller
        let u1: f64 = rng.random_range(f64::EPSILON..1.0);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let a = Complex64::new(g(), g());
    let b = Complex64::new(g(), g());
    QubitState::normalized(a, b).unwrap()
}

fn density(s: &QubitState) -> Matrix2<Complex64> {
    let v = [s.amp0(), s.amp1()];
    Matrix2::from_fn(|i, j| v[i] * v[j].conj())
}

/// `½ tr|ρ − σ|` from the eigenvalues of the Hermitian difference.
pub fn trace_distance_eigen(s: &QubitState, t: &QubitState) -> f64 {
    let diff = density(s) - density(t);
    0.5 * diff.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>()
}

/// `|⟨s|t⟩|²` by explicit inner product.
pub fn fidelity_direct(s: &QubitState, t: &QubitState) -> f64 {
    (s.amp0().conj() * t.amp0() + s.amp1().conj() * t.amp1()).norm_sqr()
}
