mod common;

use std::sync::Arc;

use covlab_core::jets::{
    newton_invert, total_derivative, Diffeo, Expr, FdScheme, Field, FieldMap, InverseMap,
    TensorRank, Transported,
};
use covlab_core::scenarios::{random_matter, random_near_identity};
use covlab_core::Error;
use proptest::prelude::*;

fn fd(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    let mut m = x.to_vec();
    p[i] += h;
    m[i] -= h;
    (f(&p) - f(&m)) / (2.0 * h)
}

#[test]
fn second_jet_of_known_function() {
    // f = sin(x0) exp(x1) + x0 x1²
    let f = FieldMap::parse(&["(+ (* (sin x0) (exp x1)) (* x0 (^ x1 2)))"], 2).unwrap();
    let (a, b) = (0.7, -0.4);
    let j = f.jet(&[a, b], 2).unwrap();
    let (s, c, e) = (f64::sin(a), f64::cos(a), f64::exp(b));
    assert!((j.value(0) - (s * e + a * b * b)).abs() < 1e-14);
    assert!((j.d1(0, 0) - (c * e + b * b)).abs() < 1e-14);
    assert!((j.d1(0, 1) - (s * e + 2.0 * a * b)).abs() < 1e-14);
    assert!((j.d2(0, 0, 0) + s * e).abs() < 1e-14);
    assert!((j.d2(0, 0, 1) - (c * e + 2.0 * b)).abs() < 1e-14);
    assert!((j.d2(0, 1, 0) - j.d2(0, 0, 1)).abs() < 1e-15);
    assert!((j.d2(0, 1, 1) - (s * e + 2.0 * a)).abs() < 1e-14);
}

#[test]
fn parse_errors_and_domain_errors() {
    assert!(matches!(Expr::parse("(+ x0"), Err(Error::Parse { .. })));
    assert!(matches!(
        Expr::parse("(+ x0 x1) x2"),
        Err(Error::Parse { .. })
    ));
    assert!(FieldMap::parse(&["x3"], 2).is_err());
    let f = FieldMap::parse(&["(sqrt x0)"], 1).unwrap();
    assert!(f.value(&[-1.0]).is_err());
    let g = FieldMap::parse(&["(/ 1 x0)"], 1).unwrap();
    assert!(g.value(&[0.0]).is_err());
}

#[test]
fn affine_covector_transport() {
    // σ(x) = M x + b; (σ_* A)(x') = A(σ⁻¹x') M⁻¹
    let fwd = FieldMap::parse(&["(+ (* 2 x0) x1 0.5)", "(- x1 0.25)"], 2).unwrap();
    let inv = FieldMap::parse(&["(* 0.5 (- x0 x1 0.75))", "(+ x1 0.25)"], 2).unwrap();
    let a = FieldMap::parse(&["(sin x1)", "(* x0 x0)"], 2).unwrap();
    let moved = Transported {
        field: a.clone().into_arc(),
        rank: TensorRank::Covector,
        inverse: InverseMap::Explicit(Arc::new(inv.clone())),
    };
    let xp = [0.3, -0.6];
    let x = inv.value(&xp).unwrap();
    let av = a.value(&x).unwrap();
    // M⁻¹ = [[0.5, −0.5], [0, 1]]
    let expect = [0.5 * av[0], -0.5 * av[0] + av[1]];
    let got = moved.value(&xp).unwrap();
    for i in 0..2 {
        assert!((got[i] - expect[i]).abs() < 1e-14, "{got:?} vs {expect:?}");
    }
    let newton = Transported {
        field: a.into_arc(),
        rank: TensorRank::Covector,
        inverse: InverseMap::Newton(fwd.into_arc()),
    };
    let j1 = moved.jet(&xp, 2).unwrap();
    let j2 = newton.jet(&xp, 2).unwrap();
    for c in 0..2 {
        for mu in 0..2 {
            assert!((j1.d1(c, mu) - j2.d1(c, mu)).abs() < 1e-10);
            for nu in 0..2 {
                assert!((j1.d2(c, mu, nu) - j2.d2(c, mu, nu)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn total_derivative_richardson_is_more_accurate() {
    let q = |p: &[f64]| Ok(vec![(3.0 * p[0]).sin()]);
    let exact = 3.0 * (3.0f64 * 0.2).cos();
    let plain = total_derivative(q, &[0.2], 0, FdScheme::new(1e-2)).unwrap()[0];
    let rich =
        total_derivative(q, &[0.2], 0, FdScheme::new(1e-2).with_richardson(true)).unwrap()[0];
    assert!((rich - exact).abs() < (plain - exact).abs() / 100.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn first_and_second_partials_match_differences(seed in any::<u64>(), c in 0usize..3) {
        let mut rng = common::rng(seed);
        let f = random_matter(&mut rng, 3);
        let x = common::point(&mut rng, 3);
        let j = f.jet(&x, 2).unwrap();
        let comp = f.components()[c].clone();
        let val = |p: &[f64]| comp.eval_f64(p).unwrap();
        for mu in 0..3 {
            prop_assert!((j.d1(c, mu) - fd(&val, &x, mu, 1e-5)).abs() < 1e-7);
            let dmu = |p: &[f64]| fd(&val, p, mu, 1e-4);
            for nu in 0..3 {
                prop_assert!((j.d2(c, mu, nu) - fd(&dmu, &x, nu, 1e-4)).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn printed_expressions_parse_back(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let f = random_near_identity(&mut rng, 3, 0.1);
        let x = common::point(&mut rng, 3);
        for e in f.components() {
            let back = Expr::parse(&e.to_string()).unwrap();
            prop_assert_eq!(back.eval_f64(&x).unwrap(), e.eval_f64(&x).unwrap());
        }
    }

    #[test]
    fn newton_inverse_round_trips(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let sigma = Diffeo::new(random_near_identity(&mut rng, 4, 0.1));
        let y = common::point(&mut rng, 4);
        let x = newton_invert(sigma.forward().as_ref(), &y, &y).unwrap();
        let back = sigma.forward().value(&x).unwrap();
        for i in 0..4 {
            prop_assert!((back[i] - y[i]).abs() < 1e-12);
        }
        // the inverse jet is the inverse Jacobian
        let inv = sigma.inverse().taylor_at(&y, 1).unwrap();
        let jf = sigma.forward().jet(&x, 1).unwrap().jacobian().unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let prod: f64 = (0..4).map(|k| inv[r].partial(&[k]) * jf[(k, c)]).sum();
                let id = if r == c { 1.0 } else { 0.0 };
                prop_assert!((prod - id).abs() < 1e-10);
            }
        }
    }
}
