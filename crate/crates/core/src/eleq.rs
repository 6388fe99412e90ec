//! Pointwise Euler–Lagrange residuals for the matter fields and the
//! covariance field, and the identity tying the latter to the covariant
//! divergence of the SEM density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    christoffel, christoffel_pullback, covariant_divergence_density, SemDensity,
};
use crate::jets::{total_derivative, total_divergence, JetPoint, Steps};
use crate::linalg::Mat;
use crate::parametrize::{Configuration, FiberJet};
use crate::sem::hilbert_with_d1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualKind {
    Matter,
    /// From the parametrized density, or from `L` at `G = η*g`.
    MatterOriginal,
    EtaFirstOrder,
    EtaSecondOrder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElResidual {
    pub kind: ResidualKind,
    pub values: Vec<f64>,
    pub steps: Steps,
}

impl ElResidual {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn flat_rows(m: &Mat<f64>) -> Vec<f64> {
    // [μ][A] from a matrix stored (A, μ)
    m.transpose().as_slice().to_vec()
}

/// `E_A = ∂L̃/∂y^A − D_μ ∂L̃/∂y^A_{,μ}`.
pub fn el_residual_matter(config: &Configuration, x: &[f64], steps: Steps) -> Result<ElResidual> {
    let pv = config.parametrized(x)?;
    let div = total_divergence(
        |y| Ok(flat_rows(&config.parametrized(y)?.dyd)),
        x,
        steps.inner(),
    )?;
    Ok(ElResidual {
        kind: ResidualKind::Matter,
        values: pv.dy.iter().zip(&div).map(|(a, b)| a - b).collect(),
        steps,
    })
}

/// The same residual computed from `L` at `G = η*g`.
pub fn el_residual_matter_original(
    config: &Configuration,
    x: &[f64],
    steps: Steps,
) -> Result<ElResidual> {
    let (_, lv) = config.original(x)?;
    let div = total_divergence(
        |y| Ok(flat_rows(&config.original(y)?.1.dyd)),
        x,
        steps.inner(),
    )?;
    Ok(ElResidual {
        kind: ResidualKind::MatterOriginal,
        values: lv.dy.iter().zip(&div).map(|(a, b)| a - b).collect(),
        steps,
    })
}

fn require_order(config: &Configuration, expected: u8) -> Result<()> {
    let found = config.theory.coupling_order();
    if found != expected {
        return Err(Error::WrongCouplingOrder { expected, found });
    }
    Ok(())
}

/// `E_a = ∂L̃/∂η^a − D_μ ∂L̃/∂η^a_{,μ}`.
pub fn el_residual_eta_first_order(
    config: &Configuration,
    x: &[f64],
    steps: Steps,
) -> Result<ElResidual> {
    require_order(config, 0)?;
    let pv = config.parametrized(x)?;
    let div = total_divergence(
        |y| Ok(flat_rows(&config.parametrized(y)?.dud)),
        x,
        steps.inner(),
    )?;
    Ok(ElResidual {
        kind: ResidualKind::EtaFirstOrder,
        values: pv.du.iter().zip(&div).map(|(a, b)| a - b).collect(),
        steps,
    })
}

/// `E_a = ∂L̃/∂η^a − D_μ ∂L̃/∂η^a_{,μ} + D_μ D_ν ∂L̃/∂η^a_{,μν}`, the double
/// total derivative taken as nested central differences.
pub fn el_residual_eta_second_order(
    config: &Configuration,
    x: &[f64],
    steps: Steps,
) -> Result<ElResidual> {
    require_order(config, 1)?;
    let n = config.dim();
    let pv = config.parametrized(x)?;
    let div = total_divergence(
        |y| Ok(flat_rows(&config.parametrized(y)?.dud)),
        x,
        steps.inner(),
    )?;
    let mut values: Vec<f64> = pv.du.iter().zip(&div).map(|(a, b)| a - b).collect();
    let second = |y: &[f64], mu: usize, nu: usize| -> Result<Vec<f64>> {
        let r = config
            .parametrized(y)?
            .dudd
            .ok_or(Error::MissingJet("second-order momenta"))?;
        Ok(r.iter().map(|m| m[(mu, nu)]).collect())
    };
    for mu in 0..n {
        for nu in mu..n {
            let dd = total_derivative(
                |y| total_derivative(|z| second(z, mu, nu), y, nu, steps.inner()),
                x,
                mu,
                steps.outer(),
            )?;
            let w = if mu == nu { 1.0 } else { 2.0 };
            for (v, d) in values.iter_mut().zip(&dd) {
                *v += w * d;
            }
        }
    }
    Ok(ElResidual {
        kind: ResidualKind::EtaSecondOrder,
        values,
        steps,
    })
}

/// Covariance-field residual of whichever order the theory requires.
pub fn el_residual_eta(config: &Configuration, x: &[f64], steps: Steps) -> Result<ElResidual> {
    match config.theory.coupling_order() {
        0 => el_residual_eta_first_order(config, x, steps),
        _ => el_residual_eta_second_order(config, x, steps),
    }
}

/// The two sides of the covariance-field identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem2Routes {
    /// `2 κ^ρ_b g^{ba} E_a`
    pub contracted: Vec<f64>,
    /// `−2(∂_μ 𝔗^{μρ} + Γ^ρ_{μν} 𝔗^{μν})` with `Γ` transported from the
    /// fiber symbols.
    pub divergence: Vec<f64>,
}

impl Theorem2Routes {
    pub fn discrepancy(&self) -> f64 {
        self.contracted
            .iter()
            .zip(&self.divergence)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Contract the raw `η` residual with `g^{ab}` and `κ`, and evaluate the
/// covariant divergence with `Γ` obtained from the fiber symbols.
pub fn theorem2_contraction(
    el_eta: &[f64],
    eta_jet2: &JetPoint,
    kappa: &Mat<f64>,
    fiber: &FiberJet,
    sem: &SemDensity,
) -> Result<Theorem2Routes> {
    let n = kappa.dim();
    let ginv = fiber.g.inverse()?;
    let raised = ginv.matvec(el_eta);
    let contracted = kappa.matvec(&raised).iter().map(|v| 2.0 * v).collect();
    let gamma = christoffel_pullback(eta_jet2, kappa, &fiber.christoffel()?)?;
    let div = covariant_divergence_density(sem, &gamma)?;
    debug_assert_eq!(div.len(), n);
    Ok(Theorem2Routes {
        contracted,
        divergence: div.iter().map(|v| -2.0 * v).collect(),
    })
}

/// Both routes at `x`.
pub fn theorem2(config: &Configuration, x: &[f64], steps: Steps) -> Result<Theorem2Routes> {
    let e = el_residual_eta(config, x, steps)?;
    let eta_jet = config.eta.jet(x, 2)?;
    let kappa = eta_jet.jacobian()?.inverse()?;
    let fiber = config.fiber.jet(&eta_jet.values())?;
    let sem = hilbert_with_d1(config, x, steps)?;
    theorem2_contraction(&e.values, &eta_jet, &kappa, &fiber, &sem)
}

/// `−2(∂_μ 𝔗^{μρ} + Γ^ρ_{μν} 𝔗^{μν})` with `Γ` computed directly from
/// `G = η*g`, for cross-checking the transported symbols.
pub fn divergence_direct(config: &Configuration, x: &[f64], steps: Steps) -> Result<Vec<f64>> {
    let sem = hilbert_with_d1(config, x, steps)?;
    let gamma = christoffel(&config.metric(x)?)?;
    Ok(covariant_divergence_density(&sem, &gamma)?
        .iter()
        .map(|v| -2.0 * v)
        .collect())
}
