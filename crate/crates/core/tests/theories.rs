mod common;

use std::sync::Arc;

use covlab_core::geometry::MetricJet;
use covlab_core::linalg::{Mat, Tensor3};
use covlab_core::scalar::Dual;
use covlab_core::theories::{
    lagrangian, theory_by_name, EmTheory, FieldTheory, KgVectorTheory, MatterJet, TheoryParams,
    TheoryRegistry,
};
use covlab_core::Error;
use proptest::prelude::*;
use rand::Rng;

fn random_jet(rng: &mut impl Rng, n: usize) -> (MatterJet<f64>, MetricJet<f64>) {
    let mut u = |s: f64| rng.random_range(-s..s);
    let y: Vec<f64> = (0..n).map(|_| u(1.0)).collect();
    let yd = Mat::from_fn(n, |_, _| u(1.0));
    let mut g = Mat::from_fn(n, |_, _| 0.0);
    for i in 0..n {
        for j in i..n {
            let base = match (i == j, i) {
                (true, 0) => -1.0,
                (true, _) => 1.0,
                _ => 0.0,
            };
            let v = base + u(0.1);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let mut d1 = Tensor3::zeros(n);
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                let v = u(0.3);
                d1[(i, j, k)] = v;
                d1[(j, i, k)] = v;
            }
        }
    }
    (MatterJet { y, yd }, MetricJet::with_d1(g, d1))
}

fn value(theory: &dyn FieldTheory, m: &MatterJet<f64>, g: &MetricJet<f64>) -> f64 {
    theory
        .density(&m.lift::<Dual>(), &g.lift::<Dual>())
        .unwrap()
        .v
}

#[test]
fn maxwell_in_flat_space() {
    // −¼F² = ½(|E|² − |B|²) with E_i = F_{0i}
    let n = 4;
    let yd = Mat::from_fn(n, |a, mu| {
        0.1 * (a as f64 + 1.0) * (mu as f64 - 1.5) + 0.05 * (a * mu) as f64
    });
    let f = EmTheory::field_strength(&yd);
    let e2: f64 = (1..n).map(|i| f[(0, i)].powi(2)).sum();
    let b2 = f[(1, 2)].powi(2) + f[(1, 3)].powi(2) + f[(2, 3)].powi(2);
    let m = MatterJet {
        y: vec![0.3; n],
        yd,
    };
    let l = value(&EmTheory, &m, &MetricJet::minkowski(n));
    assert!((l - 0.5 * (e2 - b2)).abs() < 1e-14);
}

#[test]
fn flat_kg_density() {
    // flat metric: ½(η^{μν} η_{σρ} ∂_μφ^σ ∂_νφ^ρ − m² η_{σρ}φ^σφ^ρ)
    let n = 3;
    let eta = [-1.0, 1.0, 1.0];
    let yd = Mat::from_fn(n, |a, mu| 0.2 * a as f64 - 0.1 * mu as f64 + 0.05);
    let y = vec![0.4, -0.7, 0.2];
    let mass = 1.3;
    let mut kin = 0.0;
    let mut pot = 0.0;
    for s in 0..n {
        for mu in 0..n {
            kin += eta[mu] * eta[s] * yd[(s, mu)].powi(2);
        }
        pot += eta[s] * y[s] * y[s];
    }
    let expect = 0.5 * (kin - mass * mass * pot);
    let metric = MetricJet::with_d1(Mat::diag(&eta), Tensor3::zeros(n));
    let got = value(
        &KgVectorTheory::new(mass).unwrap(),
        &MatterJet { y, yd },
        &metric,
    );
    assert!((got - expect).abs() < 1e-14);
}

#[test]
fn registry_building_and_validation() {
    let reg = TheoryRegistry::standard();
    assert_eq!(reg.names(), vec!["em", "kg_vector"]);
    assert!(matches!(
        theory_by_name("yang_mills", &TheoryParams::default()),
        Err(Error::UnsupportedTheory(_))
    ));
    assert!(theory_by_name("em", &TheoryParams { mass: Some(1.0) }).is_err());
    assert!(theory_by_name("kg_vector", &TheoryParams::default()).is_err());
    assert!(KgVectorTheory::new(-1.0).is_err());
    assert!(KgVectorTheory::new(f64::NAN).is_err());
    let kg = theory_by_name("kg_vector", &TheoryParams { mass: Some(0.5) }).unwrap();
    assert_eq!((kg.coupling_order(), kg.mass()), (1, Some(0.5)));

    let mut custom = TheoryRegistry::empty();
    custom.register("maxwell", |_| Ok(Arc::new(EmTheory)));
    assert_eq!(
        custom
            .build("maxwell", &TheoryParams::default())
            .unwrap()
            .name(),
        "em"
    );
    assert!(custom.build("em", &TheoryParams::default()).is_err());
}

#[test]
fn lift_coefficients_contract() {
    let values = [0.4, -0.2, 0.9];
    let xi = [0.3, 0.1, -0.5];
    let dxi = Mat::from_fn(3, |nu, rho| 0.1 * nu as f64 - 0.2 * rho as f64 + 0.07);
    // one-form: ξ_λ = −A_ν ξ^ν_{,λ}
    let em = EmTheory.lift_coefficients(&values).contract(&xi, &dxi);
    for l in 0..3 {
        let e: f64 = (0..3).map(|nu| -values[nu] * dxi[(nu, l)]).sum();
        assert!((em[l] - e).abs() < 1e-15);
    }
    // vector: ξ^λ = φ^ρ ξ^λ_{,ρ}
    let kg = KgVectorTheory::new(1.0)
        .unwrap()
        .lift_coefficients(&values)
        .contract(&xi, &dxi);
    for l in 0..3 {
        let e: f64 = (0..3).map(|rho| values[rho] * dxi[(l, rho)]).sum();
        assert!((kg[l] - e).abs() < 1e-15);
    }
}

#[test]
fn em_ignores_metric_derivatives() {
    let mut rng = common::rng(5);
    let (m, g) = random_jet(&mut rng, 4);
    let lv = lagrangian(&EmTheory, &m, &g).unwrap();
    assert!(lv.dgd.is_none());
    assert!(lv.dy.iter().all(|v| *v == 0.0));
    let kg = KgVectorTheory::new(1.0).unwrap();
    assert!(matches!(
        lagrangian(&kg, &m, &MetricJet::new(g.g.clone())),
        Err(Error::MissingJet(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn slot_partials_match_differences(seed in any::<u64>(), use_kg in any::<bool>()) {
        let mut rng = common::rng(seed);
        let n = 4;
        let (m, g) = random_jet(&mut rng, n);
        let theory: Box<dyn FieldTheory> = if use_kg {
            Box::new(KgVectorTheory::new(0.8).unwrap())
        } else {
            Box::new(EmTheory)
        };
        let t = theory.as_ref();
        let lv = lagrangian(t, &m, &g).unwrap();
        let h = 1e-6;
        let tol = 1e-7;
        prop_assert!((lv.density - value(t, &m, &g)).abs() < 1e-15);
        for a in 0..n {
            let (mut p, mut q) = (m.clone(), m.clone());
            p.y[a] += h;
            q.y[a] -= h;
            prop_assert!((lv.dy[a] - (value(t, &p, &g) - value(t, &q, &g)) / (2.0 * h)).abs() < tol);
            for mu in 0..n {
                let (mut p, mut q) = (m.clone(), m.clone());
                p.yd[(a, mu)] += h;
                q.yd[(a, mu)] -= h;
                let d = (value(t, &p, &g) - value(t, &q, &g)) / (2.0 * h);
                prop_assert!((lv.dyd[(a, mu)] - d).abs() < tol);
            }
        }
        // full-sum convention: perturb both symmetric slots, halve off-diagonal
        for mu in 0..n {
            for nu in 0..n {
                let shift = |s: f64| {
                    let mut g2 = g.clone();
                    g2.g[(mu, nu)] += s;
                    if mu != nu {
                        g2.g[(nu, mu)] += s;
                    }
                    g2
                };
                let w = if mu == nu { 1.0 } else { 0.5 };
                let d = w * (value(t, &m, &shift(h)) - value(t, &m, &shift(-h))) / (2.0 * h);
                prop_assert!((lv.dg[(mu, nu)] - d).abs() < tol);
                if let Some(dgd) = &lv.dgd {
                    for rho in 0..n {
                        let shift = |s: f64| {
                            let mut g2 = g.clone();
                            let d1 = g2.d1.as_mut().unwrap();
                            d1[(mu, nu, rho)] += s;
                            if mu != nu {
                                d1[(nu, mu, rho)] += s;
                            }
                            g2
                        };
                        let d = w * (value(t, &m, &shift(h)) - value(t, &m, &shift(-h))) / (2.0 * h);
                        prop_assert!((dgd[(mu, nu, rho)] - d).abs() < tol);
                    }
                }
            }
        }
    }
}
