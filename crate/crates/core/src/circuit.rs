//! The data re-uploading classifier.
//!
//! A circuit of `N` layers acts on `|0⟩`. Layer `ℓ` is
//! `su2(φ₁, φ₂, φ₃)` with `φ_k = θ_{ℓ,k} + w_{ℓ,k}·x_k` for `k ≤ d` and
//! `φ_k = θ_{ℓ,k}` otherwise, so every layer sees the input again.
//!
//! Parameters are stored flat, layer by layer: three angles followed by `d`
//! weights, `(3 + d)·N` values in total.

use crate::data::{Class, Dataset};
use crate::error::{Error, Result};
use crate::qstate::{self, QubitState};

/// Decision threshold equivalent to `P(0) > P(1)`.
pub const DEFAULT_BIAS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CircuitShape {
    layers: usize,
    data_dim: usize,
}

impl CircuitShape {
    pub fn new(layers: usize, data_dim: usize) -> Result<Self> {
        if layers == 0 {
            return Err(Error::InvalidArgument("circuit needs at least one layer".into()));
        }
        if !(1..=3).contains(&data_dim) {
            return Err(Error::InvalidArgument(format!(
                "data dimension must be 1, 2 or 3, got {data_dim}"
            )));
        }
        Ok(Self { layers, data_dim })
    }

    /// Shape used for the two-dimensional benchmark datasets.
    pub fn planar(layers: usize) -> Result<Self> {
        Self::new(layers, 2)
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn data_dim(&self) -> usize {
        self.data_dim
    }

    pub fn params_per_layer(&self) -> usize {
        3 + self.data_dim
    }

    pub fn param_count(&self) -> usize {
        self.params_per_layer() * self.layers
    }

    /// Flat index of angle `k` (0-based) in `layer`.
    pub fn angle_index(&self, layer: usize, k: usize) -> usize {
        layer * self.params_per_layer() + k
    }

    /// Flat index of weight `k` (0-based) in `layer`.
    pub fn weight_index(&self, layer: usize, k: usize) -> usize {
        layer * self.params_per_layer() + 3 + k
    }

    fn check_params(&self, params: &ParamVector) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} parameters for {} layers of dimension {}, got {}",
                self.param_count(),
                self.layers,
                self.data_dim,
                params.len()
            )));
        }
        Ok(())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.data_dim {
            return Err(Error::InvalidArgument(format!(
                "data point has {} components, circuit expects {}",
                x.len(),
                self.data_dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("data point must be finite".into()));
        }
        Ok(())
    }

    fn check_planar(&self) -> Result<()> {
        if self.data_dim != 2 {
            return Err(Error::InvalidArgument(format!(
                "datasets are two-dimensional but the circuit expects dimension {}",
                self.data_dim
            )));
        }
        Ok(())
    }
}

/// `(3 + d)·N` for a shape given as raw integers.
pub fn param_count(layers: usize, data_dim: usize) -> Result<usize> {
    Ok(CircuitShape::new(layers, data_dim)?.param_count())
}

/// Trainable angles and weights, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "parameter {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn zeros(shape: &CircuitShape) -> Self {
        Self(vec![0.0; shape.param_count()])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ParamVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub label: Class,
    pub p_zero: f64,
    pub bias: f64,
}

#[inline]
pub(crate) fn angles_unchecked(shape: &CircuitShape, params: &[f64], layer: usize, x: &[f64]) -> [f64; 3] {
    let base = layer * shape.params_per_layer();
    let theta = &params[base..base + 3];
    let weights = &params[base + 3..base + 3 + shape.data_dim];
    let mut phi = [theta[0], theta[1], theta[2]];
    for (k, (w, xk)) in weights.iter().zip(x).enumerate() {
        phi[k] += w * xk;
    }
    phi
}

/// Effective rotation angles of one layer for input `x`.
pub fn layer_angles(
    shape: &CircuitShape,
    params: &ParamVector,
    layer_index: usize,
    x: &[f64],
) -> Result<(f64, f64, f64)> {
    shape.check_params(params)?;
    shape.check_point(x)?;
    if layer_index >= shape.layers {
        return Err(Error::InvalidArgument(format!(
            "layer index {layer_index} out of range for {} layers",
            shape.layers
        )));
    }
    let [a, b, c] = angles_unchecked(shape, params.as_slice(), layer_index, x);
    Ok((a, b, c))
}

/// Runs the circuit on raw slices; lengths must already be consistent.
#[inline]
pub(crate) fn forward_unchecked(shape: &CircuitShape, params: &[f64], x: &[f64]) -> QubitState {
    let mut state = QubitState::zero();
    for layer in 0..shape.layers {
        let [a, b, c] = angles_unchecked(shape, params, layer, x);
        state = qstate::su2_unchecked(a, b, c).apply(&state);
    }
    state
}

/// `L(N)···L(1)|0⟩`.
pub fn forward(shape: &CircuitShape, params: &ParamVector, x: &[f64]) -> Result<QubitState> {
    shape.check_params(params)?;
    shape.check_point(x)?;
    Ok(forward_unchecked(shape, params.as_slice(), x))
}

#[inline]
pub(crate) fn decide(p_zero: f64, bias: f64) -> Class {
    if p_zero > bias {
        Class::A
    } else {
        Class::B
    }
}

fn check_bias(bias: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&bias) {
        return Err(Error::InvalidArgument(format!(
            "bias must lie in [0, 1], got {bias}"
        )));
    }
    Ok(())
}

/// Class `A` iff `P(0) > bias`; ties go to `B`.
pub fn classify(shape: &CircuitShape, params: &ParamVector, x: &[f64], bias: f64) -> Result<Decision> {
    check_bias(bias)?;
    let p_zero = forward(shape, params, x)?.p_zero();
    Ok(Decision {
        label: decide(p_zero, bias),
        p_zero,
        bias,
    })
}

fn p_zero_all(shape: &CircuitShape, params: &ParamVector, data: &Dataset) -> Result<Vec<f64>> {
    shape.check_planar()?;
    shape.check_params(params)?;
    data.require_non_empty()?;
    Ok(data
        .points()
        .iter()
        .map(|p| forward_unchecked(shape, params.as_slice(), &p.features()).p_zero())
        .collect())
}

/// Threshold maximizing training accuracy.
///
/// Candidates are `0`, `1` and every training `P(0)`; the smallest maximizer
/// is returned.
pub fn tune_bias(shape: &CircuitShape, params: &ParamVector, train: &Dataset) -> Result<f64> {
    let probs = p_zero_all(shape, params, train)?;
    let mut labeled: Vec<(f64, Class)> = probs
        .into_iter()
        .zip(train.points().iter().map(|p| p.label))
        .collect();
    labeled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut candidates: Vec<f64> = Vec::with_capacity(labeled.len() + 2);
    candidates.push(0.0);
    candidates.extend(labeled.iter().map(|(p, _)| p.clamp(0.0, 1.0)));
    candidates.push(1.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Sweep ascending thresholds. Points with p <= λ are called B, the rest A.
    let total_a = labeled.iter().filter(|(_, c)| *c == Class::A).count();
    let mut best = (0usize, 0.0);
    let mut consumed = 0usize;
    let mut b_at_or_below = 0usize;
    let mut a_at_or_below = 0usize;
    for (i, &lambda) in candidates.iter().enumerate() {
        while consumed < labeled.len() && labeled[consumed].0 <= lambda {
            match labeled[consumed].1 {
                Class::A => a_at_or_below += 1,
                Class::B => b_at_or_below += 1,
            }
            consumed += 1;
        }
        let correct = b_at_or_below + (total_a - a_at_or_below);
        if i == 0 || correct > best.0 {
            best = (correct, lambda);
        }
    }
    Ok(best.1)
}

/// Number of correctly classified points.
pub fn correct_count(shape: &CircuitShape, params: &ParamVector, bias: f64, data: &Dataset) -> Result<usize> {
    check_bias(bias)?;
    let probs = p_zero_all(shape, params, data)?;
    Ok(probs
        .iter()
        .zip(data.points())
        .filter(|(p, pt)| decide(**p, bias) == pt.label)
        .count())
}

/// Fraction of points whose predicted class matches the stored label.
pub fn accuracy(shape: &CircuitShape, params: &ParamVector, bias: f64, data: &Dataset) -> Result<f64> {
    Ok(correct_count(shape, params, bias, data)? as f64 / data.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate, LabeledPoint, Pattern};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;
    use std::f64::consts::PI;

    fn shape(n: usize) -> CircuitShape {
        CircuitShape::planar(n).unwrap()
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(param_count(5, 2).unwrap(), 25);
        assert_eq!(param_count(1, 2).unwrap(), 5);
        assert_eq!(param_count(3, 3).unwrap(), 18);
        assert!(param_count(0, 2).is_err());
        assert!(param_count(2, 4).is_err());
        assert!(param_count(2, 0).is_err());
    }

    #[test]
    fn layer_angles_affine_injection() {
        let s = shape(1);
        let p = ParamVector::new(vec![0.1, 0.2, 0.3, 1.0, 1.0]).unwrap();
        let (a, b, c) = layer_angles(&s, &p, 0, &[0.5, -0.5]).unwrap();
        assert!((a - 0.6).abs() < 1e-15);
        assert!((b + 0.3).abs() < 1e-15);
        assert!((c - 0.3).abs() < 1e-15);

        let zero = ParamVector::zeros(&s);
        assert_eq!(layer_angles(&s, &zero, 0, &[0.7, 0.1]).unwrap(), (0.0, 0.0, 0.0));

        let weighted = ParamVector::new(vec![0.4, -0.2, 1.5, 3.0, -7.0]).unwrap();
        assert_eq!(
            layer_angles(&s, &weighted, 0, &[0.0, 0.0]).unwrap(),
            (0.4, -0.2, 1.5)
        );
        assert!(layer_angles(&s, &weighted, 1, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn third_angle_is_weighted_in_three_dimensions() {
        let s = CircuitShape::new(1, 3).unwrap();
        let p = ParamVector::new(vec![0.0, 0.0, 0.1, 0.0, 0.0, 2.0]).unwrap();
        let (_, _, c) = layer_angles(&s, &p, 0, &[0.0, 0.0, 0.5]).unwrap();
        assert!((c - 1.1).abs() < 1e-15);
    }

    #[test]
    fn all_zero_circuit_is_identity() {
        let s = shape(4);
        let st = forward(&s, &ParamVector::zeros(&s), &[0.3, -0.9]).unwrap();
        assert!((st.p_zero() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_ry_pi_layer_flips() {
        let s = shape(1);
        let p = ParamVector::new(vec![0.0, PI, 0.0, 0.0, 0.0]).unwrap();
        let st = forward(&s, &p, &[0.8, 0.2]).unwrap();
        assert!((st.p_one() - 1.0).abs() < 1e-12);
        let d = classify(&s, &p, &[0.8, 0.2], 0.5).unwrap();
        assert_eq!(d.label, Class::B);
        assert!(d.p_zero < 1e-12);
    }

    /// Explicit 2x2 complex matrices multiplied in reverse layer order.
    fn matrix_chain_oracle(s: &CircuitShape, p: &[f64], x: &[f64]) -> (Complex64, Complex64) {
        type M = [[Complex64; 2]; 2];
        let mm = |a: &M, b: &M| -> M {
            let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    for k in 0..2 {
                        out[r][c] += a[r][k] * b[k][c];
                    }
                }
            }
            out
        };
        let rz = |t: f64| -> M {
            [
                [Complex64::new(0.0, -t / 2.0).exp(), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, t / 2.0).exp()],
            ]
        };
        let ry = |t: f64| -> M {
            let (sn, cs) = ((t / 2.0).sin(), (t / 2.0).cos());
            [
                [Complex64::new(cs, 0.0), Complex64::new(-sn, 0.0)],
                [Complex64::new(sn, 0.0), Complex64::new(cs, 0.0)],
            ]
        };
        let per = s.params_per_layer();
        let mut total: M = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        for l in 0..s.layers() {
            let mut phi = [p[l * per], p[l * per + 1], p[l * per + 2]];
            for k in 0..s.data_dim() {
                phi[k] += p[l * per + 3 + k] * x[k];
            }
            let layer = mm(&mm(&rz(phi[0]), &ry(phi[1])), &rz(phi[2]));
            total = mm(&layer, &total);
        }
        (total[0][0], total[1][0])
    }

    #[test]
    fn two_layer_forward_matches_matrix_chain() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let s = shape(2);
        for _ in 0..50 {
            let p: Vec<f64> = (0..s.param_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let st = forward(&s, &ParamVector::new(p.clone()).unwrap(), &x).unwrap();
            let (a0, a1) = matrix_chain_oracle(&s, &p, &x);
            assert!((st.amp0() - a0).norm() < 1e-12);
            assert!((st.amp1() - a1).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_rejects_mismatched_lengths() {
        let s = shape(2);
        let short = ParamVector::new(vec![0.0; 9]).unwrap();
        assert!(matches!(forward(&s, &short, &[0.0, 0.0]), Err(Error::InvalidArgument(_))));
        assert!(forward(&s, &ParamVector::zeros(&s), &[0.0]).is_err());
        assert!(ParamVector::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn classification_rule_and_tie() {
        let s = shape(1);
        let zero = ParamVector::zeros(&s);
        let d = classify(&s, &zero, &[0.1, 0.1], 0.5).unwrap();
        assert_eq!(d.label, Class::A);
        assert_eq!(d.p_zero, 1.0);

        // Ry(pi/2) lands exactly on p_zero = 0.5 up to rounding, test the rule directly
        assert_eq!(decide(0.5, 0.5), Class::B);
        let eq = ParamVector::new(vec![0.0, PI / 2.0, 0.0, 0.0, 0.0]).unwrap();
        let d = classify(&s, &eq, &[0.0, 0.0], 0.5).unwrap();
        assert!((d.p_zero - 0.5).abs() < 1e-12);
        assert_eq!(d.label, decide(d.p_zero, 0.5));

        assert!(classify(&s, &zero, &[0.0, 0.0], 1.5).is_err());
        assert!(classify(&s, &zero, &[0.0, 0.0], -0.1).is_err());
    }

    fn single_layer_with_ry(b: f64) -> ParamVector {
        ParamVector::new(vec![0.0, b, 0.0, 0.0, 0.0]).unwrap()
    }

    fn ry_for_p_zero(p: f64) -> f64 {
        2.0 * p.sqrt().acos()
    }

    #[test]
    fn tune_bias_single_point() {
        let s = shape(1);
        let p = single_layer_with_ry(ry_for_p_zero(0.9));
        let train = Dataset::from_points(
            Pattern::Circle,
            0,
            vec![LabeledPoint { x1: 0.0, x2: 0.0, label: Class::A }],
        )
        .unwrap();
        assert_eq!(tune_bias(&s, &p, &train).unwrap(), 0.0);
    }

    #[test]
    fn tune_bias_separable() {
        // Single layer with w2 = 1, theta2 = 0: P(0) = cos^2(x2/2). Choose x2 to
        // hit target probabilities.
        let s = shape(1);
        let p = ParamVector::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let mk = |prob: f64, label| LabeledPoint {
            x1: 0.0,
            x2: ry_for_p_zero(prob).min(1.0),
            label,
        };
        // cos^2(x/2) with x in [0,1] ranges over [0.77, 1]; use two p levels per class
        let pts = vec![
            mk(0.99, Class::A),
            mk(0.97, Class::A),
            mk(0.80, Class::B),
            mk(0.78, Class::B),
        ];
        let train = Dataset::from_points(Pattern::Circle, 0, pts).unwrap();
        let lambda = tune_bias(&s, &p, &train).unwrap();
        assert_eq!(accuracy(&s, &p, lambda, &train).unwrap(), 1.0);
    }

    #[test]
    fn tune_bias_matches_dense_grid() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(77);
        let s = shape(2);
        for trial in 0..10 {
            let p = ParamVector::new((0..10).map(|_| rng.random_range(-PI..PI)).collect()).unwrap();
            let data = generate(Pattern::Circle, 20, 1000 + trial).unwrap();
            let lambda = tune_bias(&s, &p, &data).unwrap();
            let tuned = accuracy(&s, &p, lambda, &data).unwrap();

            let grid_best = (0..=10_000)
                .map(|i| accuracy(&s, &p, i as f64 / 10_000.0, &data).unwrap())
                .fold(0.0, f64::max);
            assert!(tuned >= grid_best, "trial {trial}: tuned {tuned} < grid {grid_best}");

            // the tuned value must be the smallest maximizing candidate
            let mut probs: Vec<f64> = data
                .points()
                .iter()
                .map(|pt| forward(&s, &p, &pt.features()).unwrap().p_zero())
                .collect();
            probs.push(0.0);
            probs.push(1.0);
            let best_acc = probs
                .iter()
                .map(|&l| accuracy(&s, &p, l.clamp(0.0, 1.0), &data).unwrap())
                .fold(0.0, f64::max);
            let smallest = probs
                .iter()
                .copied()
                .filter(|&l| accuracy(&s, &p, l.clamp(0.0, 1.0), &data).unwrap() == best_acc)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(lambda, smallest);
        }
    }

    #[test]
    fn tune_bias_rejects_empty() {
        let s = shape(1);
        let empty = Dataset::from_points(Pattern::Line, 0, vec![]).unwrap();
        assert!(matches!(
            tune_bias(&s, &ParamVector::zeros(&s), &empty),
            Err(Error::EmptyDataset)
        ));
        assert!(accuracy(&s, &ParamVector::zeros(&s), 0.5, &empty).is_err());
    }

    #[test]
    fn accuracy_of_constant_classifier() {
        let s = shape(3);
        let zero = ParamVector::zeros(&s);
        let pts: Vec<LabeledPoint> = (0..30)
            .map(|i| LabeledPoint { x1: -1.0 + i as f64 / 15.0, x2: 0.2, label: Class::A })
            .collect();
        let all_a = Dataset::from_points(Pattern::Circle, 0, pts).unwrap();
        assert_eq!(accuracy(&s, &zero, 0.5, &all_a).unwrap(), 1.0);
        assert_eq!(accuracy(&s, &zero, 0.5, &all_a.with_flipped_labels()).unwrap(), 0.0);
    }

    #[test]
    fn random_labels_score_chance() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
        let base = generate(Pattern::Circle, 4000, 31).unwrap();
        let pts: Vec<LabeledPoint> = base
            .points()
            .iter()
            .map(|p| LabeledPoint {
                label: if rng.random::<bool>() { Class::A } else { Class::B },
                ..*p
            })
            .collect();
        let data = Dataset::from_points(Pattern::Circle, 31, pts).unwrap();
        let s = shape(5);
        let p = ParamVector::new((0..25).map(|_| rng.random_range(-PI..PI)).collect()).unwrap();
        let acc = accuracy(&s, &p, 0.5, &data).unwrap();
        assert!((acc - 0.5).abs() <= 0.03, "accuracy {acc}");
    }

    proptest! {
        #[test]
        fn zero_weights_ignore_input(
            angles in proptest::collection::vec(-PI..PI, 9),
            x in proptest::array::uniform2(-1.0f64..1.0),
            y in proptest::array::uniform2(-1.0f64..1.0),
        ) {
            let s = shape(3);
            let mut values = vec![0.0; 15];
            for l in 0..3 {
                for k in 0..3 {
                    values[s.angle_index(l, k)] = angles[3 * l + k];
                }
            }
            let p = ParamVector::new(values).unwrap();
            let a = forward(&s, &p, &x).unwrap();
            let b = forward(&s, &p, &y).unwrap();
            prop_assert!((qstate::fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn flipped_labels_complement_accuracy(
            values in proptest::collection::vec(-3.0f64..3.0, 10),
            seed in 0u64..1000,
        ) {
            let s = shape(2);
            let p = ParamVector::new(values).unwrap();
            let d = generate(Pattern::Line, 40, seed).unwrap();
            let acc = accuracy(&s, &p, 0.5, &d).unwrap();
            let flipped = accuracy(&s, &p, 0.5, &d.with_flipped_labels()).unwrap();
            prop_assert!((0.0..=1.0).contains(&acc));
            prop_assert!((acc + flipped - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tuned_bias_never_worse_than_default(
            values in proptest::collection::vec(-3.0f64..3.0, 15),
            seed in 0u64..1000,
        ) {
            let s = shape(3);
            let p = ParamVector::new(values).unwrap();
            let d = generate(Pattern::Circle, 25, seed).unwrap();
            let lambda = tune_bias(&s, &p, &d).unwrap();
            prop_assert!((0.0..=1.0).contains(&lambda));
            prop_assert!(accuracy(&s, &p, lambda, &d).unwrap() >= accuracy(&s, &p, 0.5, &d).unwrap());
        }

        #[test]
        fn decision_ignores_global_phase(values in proptest::collection::vec(-3.0f64..3.0, 10), phi in -PI..PI) {
            let s = shape(2);
            let p = ParamVector::new(values).unwrap();
            let st = forward(&s, &p, &[0.3, -0.4]).unwrap();
            let rotated = st.with_global_phase(phi);
            prop_assert_eq!(decide(st.p_zero(), 0.5), decide(rotated.p_zero(), 0.5));
            prop_assert!((st.p_zero() - rotated.p_zero()).abs() < 1e-12);
        }
    }
}
