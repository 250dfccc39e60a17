//! Training objectives and their gradients.
//!
//! Class `A` targets the label state `|0⟩` and class `B` targets `|1⟩`.
//! Both costs are raw sums over the dataset:
//!
//! * fidelity cost: `Σ (1 − |⟨label|ψ(x)⟩|²)`
//! * trace cost: `Σ D(label, ψ(x))`, each term unsquared.
//!
//! Per-point terms are always accumulated sequentially in dataset order.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::{self, CircuitShape, ParamVector};
use crate::data::{Class, Dataset, LabeledPoint};
use crate::error::{Error, Result};
use crate::qstate::{self, QubitState};

pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CostKind {
    Fidelity,
    TraceDistance,
}

impl CostKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CostKind::Fidelity => "fidelity",
            CostKind::TraceDistance => "trace",
        }
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fidelity" => Ok(CostKind::Fidelity),
            "trace" | "trace-distance" | "tracedistance" => Ok(CostKind::TraceDistance),
            other => Err(Error::InvalidArgument(format!("unknown cost '{other}'"))),
        }
    }
}

/// Which route computes the parameter gradient during training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientMethod {
    /// Central differences with the given step.
    FiniteDifference(f64),
    /// ±π/2 angle shifts; fidelity cost only.
    ParameterShift,
    /// Reverse-mode differentiation through the gate sequence.
    Adjoint,
}

impl Default for GradientMethod {
    fn default() -> Self {
        GradientMethod::FiniteDifference(DEFAULT_FD_STEP)
    }
}

impl fmt::Display for GradientMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradientMethod::FiniteDifference(_) => f.write_str("fd"),
            GradientMethod::ParameterShift => f.write_str("shift"),
            GradientMethod::Adjoint => f.write_str("adjoint"),
        }
    }
}

impl FromStr for GradientMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fd" | "finite-difference" => Ok(GradientMethod::default()),
            "shift" | "parameter-shift" => Ok(GradientMethod::ParameterShift),
            "adjoint" | "analytic" => Ok(GradientMethod::Adjoint),
            other => Err(Error::InvalidArgument(format!("unknown gradient method '{other}'"))),
        }
    }
}

pub fn label_state(class: Class) -> QubitState {
    match class {
        Class::A => QubitState::zero(),
        Class::B => QubitState::one(),
    }
}

/// `1 − F` between a circuit output and the label state of `class`.
#[inline]
fn infidelity(state: &QubitState, class: Class) -> f64 {
    match class {
        Class::A => state.p_one(),
        Class::B => state.p_zero(),
    }
}

/// Trace distance to the label state from the Bloch vectors.
#[inline]
fn trace_term(state: &QubitState, class: Class) -> f64 {
    let r = qstate::bloch_vector(state);
    let s = qstate::bloch_vector(&label_state(class));
    0.5 * r.distance(&s)
}

#[inline]
fn term(kind: CostKind, state: &QubitState, class: Class) -> f64 {
    match kind {
        CostKind::Fidelity => infidelity(state, class),
        CostKind::TraceDistance => trace_term(state, class),
    }
}

/// Cost over raw parameters; the caller guarantees consistent lengths.
pub(crate) fn cost_unchecked(kind: CostKind, shape: &CircuitShape, params: &[f64], points: &[LabeledPoint]) -> f64 {
    let mut total = 0.0;
    for p in points {
        let state = circuit::forward_unchecked(shape, params, &p.features());
        total += term(kind, &state, p.label);
    }
    total
}

fn validate(shape: &CircuitShape, params: &ParamVector, data: &Dataset) -> Result<()> {
    data.require_non_empty()?;
    if shape.data_dim() != 2 {
        return Err(Error::InvalidArgument(
            "dataset costs require a two-dimensional circuit".into(),
        ));
    }
    if params.len() != shape.param_count() {
        return Err(Error::InvalidArgument(format!(
            "expected {} parameters, got {}",
            shape.param_count(),
            params.len()
        )));
    }
    Ok(())
}

pub fn cost(kind: CostKind, shape: &CircuitShape, params: &ParamVector, data: &Dataset) -> Result<f64> {
    validate(shape, params, data)?;
    Ok(cost_unchecked(kind, shape, params.as_slice(), data.points()))
}

pub fn fidelity_cost(shape: &CircuitShape, params: &ParamVector, data: &Dataset) -> Result<f64> {
    cost(CostKind::Fidelity, shape, params, data)
}

pub fn trace_cost(shape: &CircuitShape, params: &ParamVector, data: &Dataset) -> Result<f64> {
    cost(CostKind::TraceDistance, shape, params, data)
}

pub(crate) fn gradient_fd_unchecked(
    kind: CostKind,
    shape: &CircuitShape,
    params: &[f64],
    points: &[LabeledPoint],
    h: f64,
) -> Vec<f64> {
    let mut probe = params.to_vec();
    (0..params.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = cost_unchecked(kind, shape, &probe, points);
            probe[i] = orig - h;
            let down = cost_unchecked(kind, shape, &probe, points);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Central finite differences, one coordinate at a time.
pub fn gradient_fd(
    kind: CostKind,
    shape: &CircuitShape,
    params: &ParamVector,
    data: &Dataset,
    h: f64,
) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")));
    }
    validate(shape, params, data)?;
    Ok(gradient_fd_unchecked(kind, shape, params.as_slice(), data.points(), h))
}

/// State after the layers when the effective angles are given directly.
fn forward_from_angles(angles: &[[f64; 3]]) -> QubitState {
    angles.iter().fold(QubitState::zero(), |s, [a, b, c]| {
        qstate::su2_unchecked(*a, *b, *c).apply(&s)
    })
}

pub(crate) fn gradient_shift_unchecked(shape: &CircuitShape, params: &[f64], points: &[LabeledPoint]) -> Vec<f64> {
    let mut grad = vec![0.0; params.len()];
    let mut angles = vec![[0.0; 3]; shape.layers()];
    for p in points {
        let x = p.features();
        for (l, slot) in angles.iter_mut().enumerate() {
            *slot = circuit::angles_unchecked(shape, params, l, &x);
        }
        let target = label_state(p.label);
        let fid = |s: &QubitState| 1.0 - infidelity(s, p.label).min(1.0);
        debug_assert_eq!(fid(&target), 1.0);
        for l in 0..shape.layers() {
            for k in 0..3 {
                let orig = angles[l][k];
                angles[l][k] = orig + FRAC_PI_2;
                let up = fid(&forward_from_angles(&angles));
                angles[l][k] = orig - FRAC_PI_2;
                let down = fid(&forward_from_angles(&angles));
                angles[l][k] = orig;
                // d(1 - F)/dφ
                let d_phi = -(up - down) / 2.0;
                grad[shape.angle_index(l, k)] += d_phi;
                if k < shape.data_dim() {
                    grad[shape.weight_index(l, k)] += d_phi * x[k];
                }
            }
        }
    }
    grad
}

/// Exact gradient of the fidelity cost by the parameter-shift rule.
///
/// Each effective angle `φ = θ + w·x` enters through `exp(−iφG/2)` with a
/// Pauli generator, so `dF/dφ = [F(φ + π/2) − F(φ − π/2)] / 2` holds per
/// data point. Weights pick up the factor `x_k` by the chain rule.
pub fn gradient_shift(kind: CostKind, shape: &CircuitShape, params: &ParamVector, data: &Dataset) -> Result<Vec<f64>> {
    if kind != CostKind::Fidelity {
        return Err(Error::Unsupported(
            "parameter-shift gradient is only defined for the fidelity cost".into(),
        ));
    }
    validate(shape, params, data)?;
    Ok(gradient_shift_unchecked(shape, params.as_slice(), data.points()))
}

#[derive(Clone, Copy)]
enum Generator {
    Y,
    Z,
}

#[inline]
fn apply_generator(g: Generator, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
    match g {
        Generator::Z => (v.0, -v.1),
        // Y = [[0, -i], [i, 0]]
        Generator::Y => (Complex64::new(v.1.im, -v.1.re), Complex64::new(-v.0.im, v.0.re)),
    }
}

#[inline]
fn rotate(g: Generator, angle: f64, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let u = match g {
        Generator::Z => qstate::rotation_z_unchecked(angle),
        Generator::Y => qstate::rotation_y_unchecked(angle),
    };
    let s = u.apply(&QubitState::from_amplitudes_unchecked(v.0, v.1));
    (s.amp0(), s.amp1())
}

pub(crate) fn gradient_adjoint_unchecked(
    kind: CostKind,
    shape: &CircuitShape,
    params: &[f64],
    points: &[LabeledPoint],
) -> Vec<f64> {
    let gates = 3 * shape.layers();
    let mut grad = vec![0.0; params.len()];
    let mut generators = Vec::with_capacity(gates);
    let mut gate_angles = vec![0.0; gates];
    let mut states = vec![(Complex64::default(), Complex64::default()); gates + 1];
    let mut d_angle = vec![0.0; gates];
    for _ in 0..shape.layers() {
        // Layer su2(a, b, c) = Rz(a) Ry(b) Rz(c) acts as Rz(c) first.
        generators.extend([Generator::Z, Generator::Y, Generator::Z]);
    }

    for p in points {
        let x = p.features();
        for l in 0..shape.layers() {
            let [a, b, c] = circuit::angles_unchecked(shape, params, l, &x);
            gate_angles[3 * l] = c;
            gate_angles[3 * l + 1] = b;
            gate_angles[3 * l + 2] = a;
        }
        states[0] = (Complex64::new(1.0, 0.0), Complex64::default());
        for j in 0..gates {
            states[j + 1] = rotate(generators[j], gate_angles[j], states[j]);
        }
        let out = states[gates];
        let target = match p.label {
            Class::A => (Complex64::new(1.0, 0.0), Complex64::default()),
            Class::B => (Complex64::default(), Complex64::new(1.0, 0.0)),
        };
        let overlap = target.0.conj() * out.0 + target.1.conj() * out.1;
        let fid = overlap.norm_sqr().min(1.0);
        // d(term)/dF
        let outer = match kind {
            CostKind::Fidelity => -1.0,
            CostKind::TraceDistance => {
                let inf = 1.0 - fid;
                if inf > 0.0 {
                    -0.5 / inf.sqrt()
                } else {
                    0.0
                }
            }
        };
        if outer == 0.0 {
            continue;
        }

        // bra = <target| g_gates ... g_{j+1}, carried as a ket under adjoints.
        let mut bra = target;
        for j in (0..gates).rev() {
            // d s_{j+1} / dθ = (-i/2) G s_{j+1}
            let gs = apply_generator(generators[j], states[j + 1]);
            let amp = bra.0.conj() * gs.0 + bra.1.conj() * gs.1;
            let d_overlap = Complex64::new(0.0, -0.5) * amp;
            let d_fid = 2.0 * (overlap.conj() * d_overlap).re;
            d_angle[j] = outer * d_fid;
            bra = rotate(generators[j], -gate_angles[j], bra);
        }

        for l in 0..shape.layers() {
            let per_phi = [d_angle[3 * l + 2], d_angle[3 * l + 1], d_angle[3 * l]];
            for (k, d) in per_phi.iter().enumerate() {
                grad[shape.angle_index(l, k)] += d;
                if k < shape.data_dim() {
                    grad[shape.weight_index(l, k)] += d * x[k];
                }
            }
        }
    }
    grad
}

/// Exact gradient of either cost by reverse-mode differentiation.
///
/// The trace term `√(1 − F)` is not differentiable where `F = 1`; the
/// gradient contribution of such a point is taken as zero.
pub fn gradient_adjoint(kind: CostKind, shape: &CircuitShape, params: &ParamVector, data: &Dataset) -> Result<Vec<f64>> {
    validate(shape, params, data)?;
    Ok(gradient_adjoint_unchecked(kind, shape, params.as_slice(), data.points()))
}

/// A dataset-bound objective over raw parameter slices, for the optimizers.
#[derive(Debug, Clone, Copy)]
pub struct TrainingObjective<'a> {
    kind: CostKind,
    shape: CircuitShape,
    points: &'a [LabeledPoint],
}

impl<'a> TrainingObjective<'a> {
    pub fn new(kind: CostKind, shape: CircuitShape, data: &'a Dataset) -> Result<Self> {
        validate(&shape, &ParamVector::zeros(&shape), data)?;
        Ok(Self {
            kind,
            shape,
            points: data.points(),
        })
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn shape(&self) -> &CircuitShape {
        &self.shape
    }

    /// Cost at `params`; `+∞` when the length is wrong.
    pub fn value(&self, params: &[f64]) -> f64 {
        if params.len() != self.shape.param_count() {
            return f64::INFINITY;
        }
        cost_unchecked(self.kind, &self.shape, params, self.points)
    }

    pub fn gradient(&self, params: &[f64], method: GradientMethod) -> Result<Vec<f64>> {
        if params.len() != self.shape.param_count() {
            return Err(Error::InvalidArgument("parameter length mismatch".into()));
        }
        match method {
            GradientMethod::FiniteDifference(h) => {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "finite-difference step must be positive, got {h}"
                    )));
                }
                Ok(gradient_fd_unchecked(self.kind, &self.shape, params, self.points, h))
            }
            GradientMethod::ParameterShift => {
                if self.kind != CostKind::Fidelity {
                    return Err(Error::Unsupported(
                        "parameter-shift gradient is only defined for the fidelity cost".into(),
                    ));
                }
                Ok(gradient_shift_unchecked(&self.shape, params, self.points))
            }
            GradientMethod::Adjoint => Ok(gradient_adjoint_unchecked(self.kind, &self.shape, params, self.points)),
        }
    }
}
