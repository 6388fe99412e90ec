//! Stress-energy-momentum tensor densities: the Hilbert formula, the flux
//! formula built from lift coefficients, the relation between the original
//! and parametrized SEM tensors, and the covariant divergence.

use crate::error::{Error, Result};
use crate::geometry::{christoffel, covariant_divergence_density, MetricJet, SemDensity};
use crate::jets::{total_derivative, total_divergence, FdScheme, Steps};
use crate::linalg::{Mat, Tensor3};
use crate::parametrize::Configuration;
use crate::theories::{lagrangian, FieldTheory, LagrangianValue, MatterJet};

fn require_order(theory: &dyn FieldTheory, expected: u8) -> Result<()> {
    let found = theory.coupling_order();
    if found != expected {
        return Err(Error::WrongCouplingOrder { expected, found });
    }
    Ok(())
}

/// `𝔗^{μν} = 2 ∂L/∂G_{μν}` for a non-derivatively coupled theory.
pub fn hilbert_sem(
    theory: &dyn FieldTheory,
    matter: &MatterJet<f64>,
    metric: &MetricJet<f64>,
) -> Result<SemDensity> {
    require_order(theory, 0)?;
    let lv = lagrangian(theory, matter, metric)?;
    Ok(SemDensity::contravariant(lv.dg.map(|v| 2.0 * v)))
}

fn flatten3(
    t: &Tensor3<f64>,
    order: impl Fn(usize, usize, usize) -> (usize, usize, usize),
) -> Vec<f64> {
    let n = t.dim();
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b, c) = order(i, j, k);
                out.push(t[(a, b, c)]);
            }
        }
    }
    out
}

/// `Σ_ρ D_ρ ∂L/∂G_{μν,ρ}` at `x`.
fn divergence_of_dgd(config: &Configuration, x: &[f64], scheme: FdScheme) -> Result<Mat<f64>> {
    let n = config.dim();
    let d = total_divergence(
        |y| {
            let (_, lv) = config.original(y)?;
            let p = lv
                .dgd
                .ok_or(Error::MissingJet("metric-derivative partials"))?;
            // [ρ][μ][ν]
            Ok(flatten3(&p, |rho, mu, nu| (mu, nu, rho)))
        },
        x,
        scheme,
    )?;
    Ok(Mat::from_fn(n, |mu, nu| d[mu * n + nu]))
}

/// `𝔗^{μν} = 2[∂L/∂G_{μν} − D_ρ(∂L/∂G_{μν,ρ})]` for a derivative coupling.
pub fn hilbert_sem_derivative_coupled(
    config: &Configuration,
    x: &[f64],
    scheme: FdScheme,
) -> Result<SemDensity> {
    require_order(config.theory.as_ref(), 1)?;
    let (_, lv) = config.original(x)?;
    let div = divergence_of_dgd(config, x, scheme)?;
    let n = config.dim();
    Ok(SemDensity::contravariant(Mat::from_fn(n, |mu, nu| {
        2.0 * (lv.dg[(mu, nu)] - div[(mu, nu)])
    })))
}

/// Hilbert SEM density of whichever coupling order the theory has.
pub fn hilbert_at(config: &Configuration, x: &[f64], scheme: FdScheme) -> Result<SemDensity> {
    match config.theory.coupling_order() {
        0 => {
            let inputs = config.inputs(x)?;
            hilbert_sem(config.theory.as_ref(), &inputs.matter, &inputs.metric())
        }
        _ => hilbert_sem_derivative_coupled(config, x, scheme),
    }
}

/// Hilbert SEM density with `∂_ρ 𝔗^{μν}` filled in. Nested differences use
/// the outer step for `∂_ρ` and the inner step inside `𝔗`.
pub fn hilbert_with_d1(config: &Configuration, x: &[f64], steps: Steps) -> Result<SemDensity> {
    let n = config.dim();
    let inner = steps.inner();
    let outer = if config.theory.coupling_order() == 0 {
        inner
    } else {
        steps.outer()
    };
    let t = hilbert_at(config, x, inner)?;
    let q = |y: &[f64]| Ok(hilbert_at(config, y, inner)?.data.as_slice().to_vec());
    let mut d1 = Tensor3::zeros(n);
    for rho in 0..n {
        let d = total_derivative(q, x, rho, outer)?;
        for mu in 0..n {
            for nu in 0..n {
                d1[(mu, nu, rho)] = d[mu * n + nu];
            }
        }
    }
    Ok(t.with_d1(d1))
}

/// `∂_μ 𝔗^{μρ} + Γ^ρ_{μν} 𝔗^{μν}` of the Hilbert SEM density at `x`.
pub fn conservation_residual(config: &Configuration, x: &[f64], steps: Steps) -> Result<Vec<f64>> {
    let t = hilbert_with_d1(config, x, steps)?;
    let gamma = christoffel(&config.metric(x)?)?;
    covariant_divergence_density(&t, &gamma)
}

/// Which system the flux formula is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxSystem {
    /// Matter fields on the background `G = η*g`; for derivative couplings
    /// `G` is included as a field with its tensor lift.
    Original,
    /// Matter fields plus the covariance field, with `L̃`.
    Parametrized,
}

struct FluxData {
    density: f64,
    y: Vec<f64>,
    yd: Mat<f64>,
    dyd: Mat<f64>,
    metric: MetricJet<f64>,
    original: LagrangianValue,
    /// `∂L̃/∂u^a_{,μ}` and `∂L̃/∂u^a_{,μν}`
    eta: Option<(Mat<f64>, Option<Vec<Mat<f64>>>)>,
    ud: Mat<f64>,
    udd: Option<Vec<Mat<f64>>>,
}

fn flux_data(config: &Configuration, x: &[f64], system: FluxSystem) -> Result<FluxData> {
    let inputs = config.inputs(x)?;
    let (metric, original, density, dyd, eta) = match system {
        FluxSystem::Original => {
            let metric = inputs.metric();
            let lv = lagrangian(config.theory.as_ref(), &inputs.matter, &metric)?;
            (metric, lv.clone(), lv.density, lv.dyd, None)
        }
        FluxSystem::Parametrized => {
            let pv = crate::parametrize::parametrized_lagrangian(config.theory.as_ref(), &inputs)?;
            (
                pv.metric,
                pv.original,
                pv.density,
                pv.dyd,
                Some((pv.dud, pv.dudd)),
            )
        }
    };
    Ok(FluxData {
        density,
        y: inputs.matter.y,
        yd: inputs.matter.yd,
        dyd,
        metric,
        original,
        eta,
        ud: inputs.eta.ud,
        udd: inputs.eta.udd,
    })
}

/// The operand of `D_ρ` in the flux formula, laid out `[ρ][μ][ν]`.
fn flux_operand(config: &Configuration, data: &FluxData, system: FluxSystem) -> Vec<f64> {
    let n = config.dim();
    let lift = config.theory.lift_coefficients(&data.y);
    let mut out = vec![0.0; n * n * n];
    for rho in 0..n {
        for mu in 0..n {
            for nu in 0..n {
                let mut acc = 0.0;
                for a in 0..n {
                    acc += data.dyd[(a, rho)] * lift.c1[(a, mu, nu)];
                }
                if system == FluxSystem::Original {
                    if let (Some(p), Some(_)) = (&data.original.dgd, &data.metric.d1) {
                        // G as a field: P^{αβ,ρ} C^{(αβ)μ}_ν = −2 P^{μβ,ρ} G_{βν}
                        for beta in 0..n {
                            acc -= 2.0 * p[(mu, beta, rho)] * data.metric.g[(beta, nu)];
                        }
                    }
                }
                out[(rho * n + mu) * n + nu] = acc;
            }
        }
    }
    out
}

/// Mixed SEM density `𝔗^μ_ν` from the flux formula
/// `Lδ^μ_ν − ∂L/∂ψ_{,μ} ψ_{,ν} + ∂L/∂ψ_{,μ} C_ν + D_ρ(∂L/∂ψ_{,ρ} C^μ_ν)`.
pub fn flux_formula_sem(
    config: &Configuration,
    x: &[f64],
    system: FluxSystem,
    scheme: FdScheme,
) -> Result<SemDensity> {
    let theory = config.theory.as_ref();
    if theory.index() > 1 {
        return Err(Error::IndexTooHigh(theory.index()));
    }
    let n = config.dim();
    let data = flux_data(config, x, system)?;
    let lift = theory.lift_coefficients(&data.y);
    let div = total_divergence(
        |y| {
            let d = flux_data(config, y, system)?;
            Ok(flux_operand(config, &d, system))
        },
        x,
        scheme,
    )?;
    let mut t = Mat::from_fn(n, |mu, nu| {
        let mut acc = if mu == nu { data.density } else { 0.0 };
        for a in 0..n {
            acc += data.dyd[(a, mu)] * (lift.c0[(a, nu)] - data.yd[(a, nu)]);
        }
        acc + div[mu * n + nu]
    });
    match system {
        FluxSystem::Original => {
            if let (Some(p), Some(gd)) = (&data.original.dgd, &data.metric.d1) {
                for mu in 0..n {
                    for nu in 0..n {
                        let mut acc = 0.0;
                        for al in 0..n {
                            for beta in 0..n {
                                acc += p[(al, beta, mu)] * gd[(al, beta, nu)];
                            }
                        }
                        t[(mu, nu)] -= acc;
                    }
                }
            }
        }
        FluxSystem::Parametrized => {
            let (dud, dudd) = data.eta.as_ref().expect("parametrized data");
            for mu in 0..n {
                for nu in 0..n {
                    let mut acc = 0.0;
                    for a in 0..n {
                        acc += dud[(a, mu)] * data.ud[(a, nu)];
                    }
                    if let (Some(r), Some(udd)) = (dudd, &data.udd) {
                        for a in 0..n {
                            for rho in 0..n {
                                acc += 2.0 * r[a][(mu, rho)] * udd[a][(rho, nu)];
                            }
                        }
                    }
                    t[(mu, nu)] -= acc;
                }
            }
        }
    }
    Ok(SemDensity::mixed(t))
}

/// `𝔗̃^μ_ν − 𝔗^μ_ν + 2 (δL/δG_{μρ}) G_{ρν}`.
pub fn sem_relation_residual(
    tilde: &SemDensity,
    orig: &SemDensity,
    dg: &Mat<f64>,
    g: &Mat<f64>,
) -> Mat<f64> {
    let lowered = dg.matmul(g);
    let n = g.dim();
    Mat::from_fn(n, |mu, nu| {
        tilde.data[(mu, nu)] - orig.data[(mu, nu)] + 2.0 * lowered[(mu, nu)]
    })
}

/// All SEM quantities at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct SemReport {
    pub hilbert: SemDensity,
    pub flux_mixed: SemDensity,
    pub flux_tilde: SemDensity,
    pub relation_residual: Mat<f64>,
    pub conservation_residual: Vec<f64>,
}

pub fn sem_report(config: &Configuration, x: &[f64], steps: Steps) -> Result<SemReport> {
    let scheme = steps.inner();
    let hilbert = hilbert_with_d1(config, x, steps)?;
    let gamma = christoffel(&config.metric(x)?)?;
    let conservation_residual = covariant_divergence_density(&hilbert, &gamma)?;
    let flux_mixed = flux_formula_sem(config, x, FluxSystem::Original, scheme)?;
    let flux_tilde = flux_formula_sem(config, x, FluxSystem::Parametrized, scheme)?;
    let metric = config.metric(x)?;
    let half = hilbert.data.map(|v| 0.5 * v);
    let relation_residual = sem_relation_residual(&flux_tilde, &flux_mixed, &half, &metric.g);
    Ok(SemReport {
        hilbert,
        flux_mixed,
        flux_tilde,
        relation_residual,
        conservation_residual,
    })
}
