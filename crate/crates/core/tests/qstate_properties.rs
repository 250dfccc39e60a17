mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use reupload::qstate::{apply, bloch_vector, fidelity, rotation_y, rotation_z, su2, trace_distance, QubitState};

fn state() -> impl Strategy<Value = QubitState> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("non-zero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-6)
        .prop_map(|(a, b, c, d)| QubitState::normalized(Complex64::new(a, b), Complex64::new(c, d)).unwrap())
}

proptest! {
    #[test]
    fn generated_unitaries_are_unitary(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
        prop_assert!(su2(a, b, c).unwrap().unitarity_error() < 1e-12);
        prop_assert!(rotation_y(a).unwrap().unitarity_error() < 1e-12);
        prop_assert!(rotation_z(a).unwrap().unitarity_error() < 1e-12);
    }

    #[test]
    fn su2_is_the_rotation_product(a in -PI..PI, b in -PI..PI, c in -PI..PI) {
        let product = rotation_z(a).unwrap().mul(&rotation_y(b).unwrap()).mul(&rotation_z(c).unwrap());
        let closed = su2(a, b, c).unwrap();
        for r in 0..2 {
            for k in 0..2 {
                prop_assert!((product.entry(r, k) - closed.entry(r, k)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fidelity_bounded_and_symmetric(s in state(), t in state()) {
        let f = fidelity(&s, &t).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        prop_assert_eq!(f, fidelity(&t, &s).unwrap());
        prop_assert!((f - common::fidelity_direct(&s, &t)).abs() < 1e-12);
    }

    #[test]
    fn pure_state_identity(s in state(), t in state()) {
        let d = trace_distance(&s, &t).unwrap();
        prop_assert!((d * d + fidelity(&s, &t).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bloch_formula_matches_eigenvalues(s in state(), t in state()) {
        prop_assert!((trace_distance(&s, &t).unwrap() - common::trace_distance_eigen(&s, &t)).abs() < 1e-10);
    }

    #[test]
    fn global_phase_invariance(s in state(), t in state(), phi in -PI..PI) {
        let sp = s.with_global_phase(phi);
        prop_assert!((fidelity(&sp, &t).unwrap() - fidelity(&s, &t).unwrap()).abs() < 1e-12);
        prop_assert!((trace_distance(&s, &t.with_global_phase(phi)).unwrap() - trace_distance(&s, &t).unwrap()).abs() < 1e-12);
        let (a, b) = (bloch_vector(&s), bloch_vector(&sp));
        prop_assert!(a.distance(&b) < 1e-12);
    }
}

#[test]
fn norm_preserved_on_random_pairs() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(82);
    for _ in 0..1000 {
        let u = su2(rng.random_range(-PI..PI), rng.random_range(-PI..PI), rng.random_range(-PI..PI)).unwrap();
        let s = common::random_state(&mut rng);
        assert!((apply(&u, &s).norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn bloch_vectors_of_pure_states_are_unit() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
    for _ in 0..1000 {
        assert!((bloch_vector(&common::random_state(&mut rng)).norm() - 1.0).abs() < 1e-12);
    }
}
