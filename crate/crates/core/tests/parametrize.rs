mod common;

use std::sync::Arc;

use covlab_core::jets::{Diffeo, Expr, FieldMap};
use covlab_core::parametrize::{
    parametrized_lagrangian, piola_kirchhoff, Configuration, CovarianceField, FiberMetric,
};
use covlab_core::scenarios::{random_fiber_metric, random_matter, random_near_identity};
use covlab_core::theories::FieldTheory;
use covlab_core::Error;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

struct Draw {
    theory: Arc<dyn FieldTheory>,
    eta: FieldMap,
    matter: FieldMap,
    fiber: FiberMetric,
    x: Vec<f64>,
}

impl Draw {
    fn new(rng: &mut ChaCha8Rng, theory: Arc<dyn FieldTheory>) -> Self {
        Self {
            theory,
            eta: random_near_identity(rng, 4, 0.1),
            fiber: random_fiber_metric(rng, 4, 0.1),
            matter: random_matter(rng, 4),
            x: common::point(rng, 4),
        }
    }

    fn config(&self, eta: &FieldMap, matter: &FieldMap) -> Configuration {
        Configuration::new(
            self.theory.clone(),
            matter.clone().into_arc(),
            CovarianceField::new(eta.clone().into_arc()),
            self.fiber.clone(),
        )
        .unwrap()
    }

    fn tilde(&self, eta: &FieldMap, matter: &FieldMap) -> f64 {
        self.config(eta, matter).tilde_density(&self.x).unwrap()
    }
}

/// `f` with `s · bump` added to component `a`.
fn bumped(f: &FieldMap, a: usize, bump: &Expr, s: f64) -> FieldMap {
    let mut comps = f.components().to_vec();
    comps[a] = comps[a].clone() + Expr::c(s) * bump.clone();
    FieldMap::new(comps, 4).unwrap()
}

/// `x^μ − p^μ`, zero at `p` with unit slope.
fn shifted(p: &[f64], mu: usize) -> Expr {
    Expr::x(mu) - Expr::c(p[mu])
}

/// Central difference of `L̃` along a bump of one component of `η` or of
/// the matter field. Bumps vanish at `x` to the order below the slot, so
/// only that slot moves.
fn slot_fd(d: &Draw, on_eta: bool, a: usize, bump: &Expr) -> f64 {
    let h = 1e-5;
    let at = |s: f64| {
        if on_eta {
            d.tilde(&bumped(&d.eta, a, bump, s), &d.matter)
        } else {
            d.tilde(&d.eta, &bumped(&d.matter, a, bump, s))
        }
    };
    (at(h) - at(-h)) / (2.0 * h)
}

#[test]
fn tilde_density_is_original_at_pullback_metric() {
    let mut rng = common::rng(2);
    let d = Draw::new(&mut rng, common::em());
    let c = d.config(&d.eta, &d.matter);
    let (_, lv) = c.original(&d.x).unwrap();
    assert_eq!(c.tilde_density(&d.x).unwrap(), lv.density);
    let pv = c.parametrized(&d.x).unwrap();
    assert!((pv.density - lv.density).abs() < 1e-15);
    assert_eq!(pv.dyd, lv.dyd);
}

#[test]
fn fiber_metric_validation_and_serde() {
    assert!(FiberMetric::parse(&[vec!["-1", "x0"], vec!["0", "1"]]).is_err());
    let g = FiberMetric::parse(&[vec!["(- 0 1)", "(* 0.1 x1)"], vec!["(* 0.1 x1)", "1"]]).unwrap();
    let json = serde_json::to_string(&g).unwrap();
    let back: FiberMetric = serde_json::from_str(&json).unwrap();
    assert_eq!(
        back.value(&[0.2, 0.5]).unwrap(),
        g.value(&[0.2, 0.5]).unwrap()
    );
    assert!(serde_json::from_str::<FiberMetric>(r#"[["-1","x0"],["0","1"]]"#).is_err());
}

#[test]
fn orientation_and_dimension_checks() {
    let flipped = CovarianceField::new(FieldMap::parse(&["x0", "(- 0 x1)"], 2).unwrap().into_arc());
    let err = flipped.check_oriented(&[0.25, 0.5]).unwrap_err();
    assert!(matches!(&err, Error::Validation(m) if m.contains("0.25") && m.contains("0.5")));
    let r = Configuration::new(
        common::em(),
        FieldMap::identity(3).into_arc(),
        CovarianceField::identity(4),
        FiberMetric::minkowski(4),
    );
    assert!(matches!(r, Err(Error::DimensionMismatch(_))));
}

fn check_slot_partials(d: &Draw) -> Result<(), TestCaseError> {
    let c = d.config(&d.eta, &d.matter);
    let pv = c.parametrized(&d.x).unwrap();
    let one = Expr::c(1.0);
    for a in 0..4 {
        prop_assert!((pv.du[a] - slot_fd(d, true, a, &one)).abs() < 1e-6);
        for mu in 0..4 {
            let lin = shifted(&d.x, mu);
            prop_assert!((pv.dud[(a, mu)] - slot_fd(d, true, a, &lin)).abs() < 1e-6);
            prop_assert!((pv.dyd[(a, mu)] - slot_fd(d, false, a, &lin)).abs() < 1e-6);
        }
    }
    if let Some(dudd) = &pv.dudd {
        for a in 0..4 {
            for mu in 0..4 {
                for nu in mu..4 {
                    let quad = shifted(&d.x, mu) * shifted(&d.x, nu);
                    let fd = 0.5 * slot_fd(d, true, a, &quad);
                    prop_assert!((dudd[a][(mu, nu)] - fd).abs() < 1e-6);
                }
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eta_and_matter_slots_match_bumped_fields(seed in any::<u64>(), use_kg in any::<bool>()) {
        let mut rng = common::rng(seed);
        let theory = if use_kg { common::kg(0.7) } else { common::em() };
        check_slot_partials(&Draw::new(&mut rng, theory))?;
    }

    #[test]
    fn piola_kirchhoff_routes_agree(seed in any::<u64>(), use_kg in any::<bool>()) {
        let mut rng = common::rng(seed);
        let theory = if use_kg { common::kg(1.2) } else { common::em() };
        let c = common::off_shell(&mut rng, theory, 4);
        let inputs = c.inputs(&common::point(&mut rng, 4)).unwrap();
        let pv = parametrized_lagrangian(c.theory.as_ref(), &inputs).unwrap();
        let pk = piola_kirchhoff(&inputs, &pv);
        prop_assert_eq!(pk.second_formula.is_some(), use_kg);
        prop_assert!(pk.discrepancy() < 1e-8, "{}", pk.discrepancy());
    }

    #[test]
    fn parametrized_density_is_equivariant(seed in any::<u64>(), use_kg in any::<bool>()) {
        let mut rng = common::rng(seed);
        let theory = if use_kg { common::kg(0.9) } else { common::em() };
        let c = common::off_shell(&mut rng, theory, 4);
        let sigma = Diffeo::new(random_near_identity(&mut rng, 4, 0.1));
        let x = common::point(&mut rng, 4);
        let jac = sigma.forward().jet(&x, 1).unwrap();
        let lhs = c.apply_diffeo(&sigma).tilde_density(&jac.values()).unwrap()
            * jac.jacobian().unwrap().det();
        let rhs = c.tilde_density(&x).unwrap();
        prop_assert!((lhs - rhs).abs() / (1.0 + rhs.abs()) < 1e-7);
    }
}
