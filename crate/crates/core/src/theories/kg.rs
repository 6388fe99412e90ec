use super::{FieldTheory, LiftCoefficients, MatterJet};
use crate::error::{Error, Result};
use crate::geometry::{christoffel, inverse_metric, volume_factor, MetricJet};
use crate::jets::TensorRank;
use crate::linalg::{Mat, Tensor3};
use crate::scalar::{Dual, Real};

/// Massive vector field coupled to the metric through its Levi-Civita
/// connection:
/// `L = ½ G_{σρ}(G^{μν} φ^σ_{;μ} φ^ρ_{;ν} − m² φ^σ φ^ρ)√−G`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KgVectorTheory {
    mass: f64,
}

impl KgVectorTheory {
    pub const NAME: &'static str = "kg_vector";

    pub fn new(mass: f64) -> Result<Self> {
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::Validation(format!(
                "mass must be finite and non-negative, got {mass}"
            )));
        }
        Ok(Self { mass })
    }

    pub fn density_generic<S: Real>(
        &self,
        matter: &MatterJet<S>,
        metric: &MetricJet<S>,
    ) -> Result<S> {
        let n = metric.dim();
        let gamma = christoffel(metric)?;
        let ginv = inverse_metric(metric)?;
        let vol = volume_factor(metric)?;
        let phi = &matter.y;
        // cov[(σ, μ)] = φ^σ_{,μ} + Γ^σ_{μλ} φ^λ
        let cov = Mat::from_fn(n, |s, mu| {
            let mut acc = matter.yd[(s, mu)];
            for l in 0..n {
                acc += gamma.get(s, mu, l) * phi[l];
            }
            acc
        });
        // lowered[(ρ, ν)] = G_{ρσ} φ^σ_{;ν}
        let lowered = metric.g.matmul(&cov);
        let mut kinetic = S::zero();
        let mut mass_term = S::zero();
        for s in 0..n {
            for mu in 0..n {
                for nu in 0..n {
                    kinetic += ginv[(mu, nu)] * cov[(s, mu)] * lowered[(s, nu)];
                }
            }
            for r in 0..n {
                mass_term += metric.g[(s, r)] * phi[s] * phi[r];
            }
        }
        Ok((kinetic - mass_term * (self.mass * self.mass)) * vol * 0.5)
    }
}

impl FieldTheory for KgVectorTheory {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn rank(&self) -> TensorRank {
        TensorRank::Vector
    }

    fn coupling_order(&self) -> u8 {
        1
    }

    fn mass(&self) -> Option<f64> {
        Some(self.mass)
    }

    fn density(&self, matter: &MatterJet<Dual>, metric: &MetricJet<Dual>) -> Result<Dual> {
        self.density_generic(matter, metric)
    }

    /// `ξ^{(λ)} = φ^μ ξ^λ_{,μ}`, i.e. `C^{(λ)ρ}_ν = δ^λ_ν φ^ρ`.
    fn lift_coefficients(&self, values: &[f64]) -> LiftCoefficients {
        let n = values.len();
        LiftCoefficients {
            c0: Mat::zeros(n),
            c1: Tensor3::from_fn(n, |l, rho, nu| if l == nu { values[rho] } else { 0.0 }),
        }
    }
}
