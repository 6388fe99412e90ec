mod common;

use covlab_core::geometry::{
    check_lorentz, christoffel, christoffel_pullback, covariant_divergence_density, inverse_metric,
    volume_factor, MetricJet, SemDensity,
};
use covlab_core::linalg::{Mat, Tensor3};
use covlab_core::parametrize::{pullback_metric_jet, CovarianceField, FiberMetric};
use covlab_core::scenarios::{random_fiber_metric, random_near_identity};
use covlab_core::Error;
use proptest::prelude::*;

#[test]
fn expanding_line_element_symbols() {
    // ds² = −dt² + a(t)² dx², a = eᵗ
    let t = 0.3f64;
    let a2 = (2.0 * t).exp();
    let g = Mat::diag(&[-1.0, a2]);
    let mut d1 = Tensor3::zeros(2);
    d1[(1, 1, 0)] = 2.0 * a2;
    let gamma = christoffel(&MetricJet::with_d1(g, d1)).unwrap();
    assert!((gamma.get(0, 1, 1) - a2).abs() < 1e-14);
    assert!((gamma.get(1, 0, 1) - 1.0).abs() < 1e-14);
    assert!((gamma.get(1, 1, 0) - 1.0).abs() < 1e-14);
    assert_eq!(gamma.get(0, 0, 0), 0.0);
    assert_eq!(gamma.get(1, 1, 1), 0.0);
}

#[test]
fn signature_and_singularity_errors() {
    let riemannian = MetricJet::new(Mat::<f64>::identity(3));
    assert!(matches!(
        volume_factor(&riemannian),
        Err(Error::WrongSignature(_))
    ));
    let singular = MetricJet::<f64>::new(Mat::diag(&[-1.0, 0.0, 1.0]));
    assert!(matches!(
        inverse_metric(&singular),
        Err(Error::SingularMetric { .. })
    ));
    assert!(check_lorentz(&Mat::diag(&[-1.0, -1.0, 1.0, 1.0])).is_err());
    assert!(check_lorentz(&Mat::diag(&[-1.0, 1.0, 1.0, 1.0])).is_ok());
    let m = MetricJet::<f64>::minkowski(4);
    assert!((volume_factor(&m).unwrap() - 1.0).abs() < 1e-15);
    assert!(christoffel(&m).unwrap().symbols.max_abs() == 0.0);
    let bare = MetricJet::new(m.g.clone());
    assert!(matches!(christoffel(&bare), Err(Error::MissingJet(_))));
}

#[test]
fn pullback_of_known_map() {
    // η = (x0, 2 x1 + x0²): G00 = −1 + 4x0², G01 = 4x0, G11 = 4
    let eta = CovarianceField::new(
        covlab_core::jets::FieldMap::parse(&["x0", "(+ (* 2 x1) (^ x0 2))"], 2)
            .unwrap()
            .into_arc(),
    );
    let x0 = 0.35;
    let jet = eta.jet(&[x0, -0.2], 2).unwrap();
    let m = pullback_metric_jet(&jet, &FiberMetric::minkowski(2)).unwrap();
    assert!((m.g[(0, 0)] - (-1.0 + 4.0 * x0 * x0)).abs() < 1e-14);
    assert!((m.g[(0, 1)] - 4.0 * x0).abs() < 1e-14);
    assert!((m.g[(1, 0)] - 4.0 * x0).abs() < 1e-14);
    assert!((m.g[(1, 1)] - 4.0).abs() < 1e-14);
    let d1 = m.require_d1().unwrap();
    assert!((d1[(0, 0, 0)] - 8.0 * x0).abs() < 1e-13);
    assert!((d1[(0, 1, 0)] - 4.0).abs() < 1e-13);
    assert!(d1[(1, 1, 0)].abs() < 1e-13);
    assert!(d1[(0, 0, 1)].abs() < 1e-13);
}

#[test]
fn divergence_needs_contravariant_form() {
    let m = MetricJet::with_d1(Mat::diag(&[-1.0, 1.0]), Tensor3::zeros(2));
    let gamma = christoffel(&m).unwrap();
    let t = SemDensity::contravariant(Mat::diag(&[2.0, 3.0])).with_d1(Tensor3::zeros(2));
    let div = covariant_divergence_density(&t, &gamma).unwrap();
    assert!(div.iter().all(|v| *v == 0.0));
    let mixed = t.lower(&m.g).unwrap();
    assert!(covariant_divergence_density(&mixed, &gamma).is_err());
    assert_eq!(mixed.data[(0, 0)], -2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transported_symbols_match_direct(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let eta = CovarianceField::new(random_near_identity(&mut rng, 4, 0.1).into_arc());
        let fiber = random_fiber_metric(&mut rng, 4, 0.1);
        let x = common::point(&mut rng, 4);
        let jet = eta.jet(&x, 2).unwrap();
        let direct = christoffel(&pullback_metric_jet(&jet, &fiber).unwrap()).unwrap();
        let kappa = jet.jacobian().unwrap().inverse().unwrap();
        let fg = fiber.jet(&jet.values()).unwrap().christoffel().unwrap();
        let moved = christoffel_pullback(&jet, &kappa, &fg).unwrap();
        for r in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    prop_assert!((direct.get(r, m, n) - moved.get(r, m, n)).abs() < 1e-8);
                    prop_assert_eq!(direct.get(r, m, n), direct.get(r, n, m));
                }
            }
        }
    }

    #[test]
    fn inverse_metric_is_inverse(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fiber = random_fiber_metric(&mut rng, 4, 0.2);
        let g = fiber.value(&common::point(&mut rng, 4)).unwrap();
        prop_assert!(check_lorentz(&g).is_ok());
        let inv = inverse_metric(&MetricJet::new(g.clone())).unwrap();
        let id = g.matmul(&inv);
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { 1.0 } else { 0.0 };
                prop_assert!((id[(i, j)] - e).abs() < 1e-12);
            }
        }
        let vol = volume_factor(&MetricJet::new(g.clone())).unwrap();
        prop_assert!((vol * vol + g.det()).abs() < 1e-12);
    }
}
