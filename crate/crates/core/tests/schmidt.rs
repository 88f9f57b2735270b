use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use pairsource_core::joint_amplitude::{apply_collection, Axis, CollectionMode, JointAmplitude, Variable};
use pairsource_core::schmidt::{schmidt_decompose, schmidt_decompose_complex, trace_purity};

/// `exp(-(x+y)^2 / 4a^2 - (x-y)^2 / 4b^2)` sampled on `[-half, half]^2`.
fn correlated(a: f64, b: f64, half: f64, n: usize) -> JointAmplitude {
    let ax = Axis::symmetric(Variable::AngleSignalExternal, half, n).unwrap();
    let ay = Axis::symmetric(Variable::AngleIdlerExternal, half, n).unwrap();
    let mut values = Vec::with_capacity(n * n);
    for &x in &ax.samples {
        for &y in &ay.samples {
            values.push(Complex64::new((-(x + y).powi(2) / (4.0 * a * a) - (x - y).powi(2) / (4.0 * b * b)).exp(), 0.0));
        }
    }
    JointAmplitude::new(ax, ay, values).unwrap()
}

#[test]
fn correlated_gaussian_purity_matches_closed_form() {
    for (a, b) in [(1.0, 1.0), (1.0, 3.0), (0.5, 2.0)] {
        let amp = correlated(a, b, 16.0, 321);
        let p = schmidt_decompose(&amp).unwrap().purity;
        assert_relative_eq!(p, 2.0 * a * b / (a * a + b * b), epsilon = 1e-6);
    }
}

#[test]
fn collection_keeps_the_dominant_weight() {
    let amp = correlated(0.5, 2.0, 12.0, 161);
    let before = schmidt_decompose(&amp).unwrap();
    let m = CollectionMode::new(1e-6, 3.0).unwrap();
    let after = schmidt_decompose(&apply_collection(&amp, Some(&m), Some(&m)).unwrap()).unwrap();
    assert!(after.coefficients[0] >= before.coefficients[0]);
    assert!(after.purity >= before.purity);
}

fn matrix(n: usize, m: usize, seed: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, m, |i, j| {
        let k = (i * m + j) % seed.len();
        Complex64::new(seed[k], seed[(k + 1) % seed.len()] * ((i + 2 * j) as f64).sin())
    })
}

proptest! {
    #[test]
    fn purity_ignores_scale_and_transpose(seed in prop::collection::vec(-1.0..1.0f64, 7..40), n in 2usize..12, m in 2usize..12, k in 1e-3..1e3f64) {
        let a = matrix(n, m, &seed);
        prop_assume!(a.iter().any(|z| z.norm() > 1e-6));
        let p = schmidt_decompose_complex(&a).unwrap().purity;
        let scaled = schmidt_decompose_complex(&(a.clone() * Complex64::new(k, 0.0))).unwrap().purity;
        let t = schmidt_decompose_complex(&a.transpose()).unwrap().purity;
        prop_assert!((p - scaled).abs() < 1e-10);
        prop_assert!((p - t).abs() < 1e-10);
        prop_assert!(p >= 1.0 / n.min(m) as f64 - 1e-12 && p <= 1.0 + 1e-12);
        prop_assert!((p - trace_purity(&a)).abs() < 1e-9);
    }
}
