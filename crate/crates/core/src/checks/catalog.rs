use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Check, CheckContext, PointResult};
use crate::eleq::{el_residual_eta, el_residual_matter, theorem2};
use crate::error::Result;
use crate::jets::Diffeo;
use crate::parametrize::piola_kirchhoff;
use crate::scenarios::random_near_identity;
use crate::sem::sem_report;

/// Matter Euler–Lagrange residual below which a point counts as on shell.
pub const ON_SHELL_THRESHOLD: f64 = 1e-7;

/// Size of the random near-identity maps drawn when a scenario has no `σ`.
pub const RANDOM_SIGMA_EPS: f64 = 0.1;

fn coupling(ctx: &CheckContext) -> u8 {
    ctx.prepared.config.theory.coupling_order()
}

fn on_shell(ctx: &CheckContext, x: &[f64]) -> Result<Option<String>> {
    let e = el_residual_matter(&ctx.prepared.config, x, ctx.steps)?.max_abs();
    Ok((e >= ON_SHELL_THRESHOLD)
        .then(|| format!("off shell (matter residual {e:.3e} ≥ {ON_SHELL_THRESHOLD:e})")))
}

fn sigma_for(ctx: &CheckContext, index: usize) -> Diffeo {
    match &ctx.prepared.sigma {
        Some(s) => s.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            rng.set_stream(index as u64 + 1);
            Diffeo::new(random_near_identity(
                &mut rng,
                ctx.prepared.config.dim(),
                RANDOM_SIGMA_EPS,
            ))
        }
    }
}

pub struct Equivariance;

impl Check for Equivariance {
    fn name(&self) -> &'static str {
        "equivariance"
    }
    fn citation(&self) -> &'static str {
        "Equivariance of the parametrized Lagrangian: σ_*(L̃(j¹φ, j¹η)) = L̃(j¹(σ_Y φ), j¹(σ_S η))"
    }
    fn tolerance(&self, _: &CheckContext) -> f64 {
        1e-7
    }
    fn evaluate(&self, ctx: &CheckContext, index: usize, x: &[f64]) -> Result<PointResult> {
        let config = &ctx.prepared.config;
        let sigma = sigma_for(ctx, index);
        let moved = config.apply_diffeo(&sigma);
        let jac = sigma.forward().jet(x, 1)?;
        let det = jac.jacobian()?.det();
        let lhs = moved.tilde_density(&jac.values())? * det;
        let rhs = config.tilde_density(x)?;
        Ok(PointResult::Residual((lhs - rhs).abs() / (1.0 + rhs.abs())))
    }
}

pub struct PiolaKirchhoffCheck;

impl Check for PiolaKirchhoffCheck {
    fn name(&self) -> &'static str {
        "piola_kirchhoff"
    }
    fn citation(&self) -> &'static str {
        "Piola–Kirchhoff momenta: ρ_a^μ = ∂L̃/∂u^a_μ = 2 ∂L/∂G_{μν} u^b_ν g_ab"
    }
    fn tolerance(&self, _: &CheckContext) -> f64 {
        1e-8
    }
    fn evaluate(&self, ctx: &CheckContext, _: usize, x: &[f64]) -> Result<PointResult> {
        let config = &ctx.prepared.config;
        let inputs = config.inputs(x)?;
        let pv = crate::parametrize::parametrized_lagrangian(config.theory.as_ref(), &inputs)?;
        Ok(PointResult::Residual(
            piola_kirchhoff(&inputs, &pv).discrepancy(),
        ))
    }
}

pub struct Theorem2Check;

impl Check for Theorem2Check {
    fn name(&self) -> &'static str {
        "theorem2"
    }
    fn citation(&self) -> &'static str {
        "Euler–Lagrange equations for the covariance field are equivalent to the vanishing of the covariant divergence of the SEM tensor density"
    }
    fn tolerance(&self, _: &CheckContext) -> f64 {
        1e-6
    }
    fn not_applicable(&self, ctx: &CheckContext) -> Option<String> {
        (coupling(ctx) != 0).then(|| "derivative coupling; see dcoupled_theorem2".to_string())
    }
    fn evaluate(&self, ctx: &CheckContext, _: usize, x: &[f64]) -> Result<PointResult> {
        let r = theorem2(&ctx.prepared.config, x, ctx.steps)?;
        Ok(PointResult::Residual(r.discrepancy()))
    }
}

pub struct Corollary;

impl Check for Corollary {
    fn name(&self) -> &'static str {
        "corollary"
    }
    fn citation(&self) -> &'static str {
        "The Euler–Lagrange equations for the covariance field are vacuously satisfied when the matter fields are on shell"
    }
    fn tolerance(&self, ctx: &CheckContext) -> f64 {
        if coupling(ctx) == 0 {
            1e-6
        } else {
            1e-5
        }
    }
    fn evaluate(&self, ctx: &CheckContext, _: usize, x: &[f64]) -> Result<PointResult> {
        if let Some(reason) = on_shell(ctx, x)? {
            return Ok(PointResult::NotApplicable(reason));
        }
        let e = el_residual_eta(&ctx.prepared.config, x, ctx.steps)?;
        Ok(PointResult::Residual(e.max_abs()))
    }
}

pub struct SemRelation;

impl Check for SemRelation {
    fn name(&self) -> &'static str {
        "sem_relation"
    }
    fn citation(&self) -> &'static str {
        "Relation between SEM tensor densities: 𝔗̃^μ_ν = 𝔗^μ_ν − 2 (δL/δG_{μρ}) G_{ρν}"
    }
    fn tolerance(&self, ctx: &CheckContext) -> f64 {
        if coupling(ctx) == 0 {
            1e-8
        } else {
            1e-6
        }
    }
    fn evaluate(&self, ctx: &CheckContext, _: usize, x: &[f64]) -> Result<PointResult> {
        let r = sem_report(&ctx.prepared.config, x, ctx.steps)?;
        Ok(PointResult::Residual(r.relation_residual.max_abs()))
    }
}

pub struct SemVanishing;

impl Check for SemVanishing {
    fn name(&self) -> &'static str {
        "sem_vanishing"
    }
    fn citation(&self) -> &'static str {
        "The SEM tensor density of the fully covariant, fully dynamic parametrized theory vanishes on shell"
    }
    fn tolerance(&self, _: &CheckContext) -> f64 {
        1e-6
    }
    fn evaluate(&self, ctx: &CheckContext, _: usize, x: &[f64]) -> Result<PointResult> {
        if let Some(reason) = on_shell(ctx, x)? {
            return Ok(PointResult::NotApplicable(reason));
        }
        let t = crate::sem::flux_formula_sem(
            &ctx.prepared.config,
            x,
            crate::sem::FluxSystem::Parametrized,
            ctx.steps.inner(),
        )?;
        Ok(PointResult::Residual(t.max_abs()))
    }
}

pub struct ElMatter;

impl Check for ElMatter {
    fn name(&self) -> &'static str {
        "el_matter"
    }
    fn citation(&self) -> &'static str {
        "Matter Euler–Lagrange equations are unchanged by parametrization (on-shell construction)"
    }
    fn tolerance(&self, ctx: &CheckContext) -> f64 {
        if coupling(ctx) == 0 {
            1e-7
        } else {
            1e-6
        }
    }
    fn evaluate(&self, ctx: &CheckContext, _: usize, x: &[f64]) -> Result<PointResult> {
        let e = el_residual_matter(&ctx.prepared.config, x, ctx.steps)?;
        Ok(PointResult::Residual(e.max_abs()))
    }
}

pub struct DcoupledTheorem2;

impl Check for DcoupledTheorem2 {
    fn name(&self) -> &'static str {
        "dcoupled_theorem2"
    }
    fn citation(&self) -> &'static str {
        "Derivative coupling: second-order covariance-field equations are equivalent to ∇_μ𝔗^{μν} = 0 with the variational Hilbert SEM density"
    }
    fn tolerance(&self, _: &CheckContext) -> f64 {
        1e-5
    }
    fn not_applicable(&self, ctx: &CheckContext) -> Option<String> {
        (coupling(ctx) != 1).then(|| "theory is not derivatively coupled; see theorem2".to_string())
    }
    fn evaluate(&self, ctx: &CheckContext, _: usize, x: &[f64]) -> Result<PointResult> {
        let r = theorem2(&ctx.prepared.config, x, ctx.steps)?;
        Ok(PointResult::Residual(r.discrepancy()))
    }
}
