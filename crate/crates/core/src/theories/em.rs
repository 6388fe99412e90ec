use super::{FieldTheory, LiftCoefficients, MatterJet};
use crate::error::Result;
use crate::geometry::{inverse_metric, volume_factor, MetricJet};
use crate::jets::TensorRank;
use crate::linalg::{Mat, Tensor3};
use crate::scalar::{Dual, Real};

/// Source-free electromagnetism, `L = −¼ G^{μα}G^{νβ}F_{αβ}F_{μν}√−G` with
/// `F_{μν} = A_{ν,μ} − A_{μ,ν}`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EmTheory;

impl EmTheory {
    pub const NAME: &'static str = "em";

    pub fn field_strength<S: Real>(yd: &Mat<S>) -> Mat<S> {
        Mat::from_fn(yd.dim(), |mu, nu| yd[(nu, mu)] - yd[(mu, nu)])
    }

    pub fn density_generic<S: Real>(matter: &MatterJet<S>, metric: &MetricJet<S>) -> Result<S> {
        let n = metric.dim();
        let ginv = inverse_metric(metric)?;
        let vol = volume_factor(metric)?;
        let f = Self::field_strength(&matter.yd);
        // F^{μν} = G^{μα} F_{αβ} G^{βν}
        let fup = ginv.matmul(&f).matmul(&ginv);
        let mut acc = S::zero();
        for mu in 0..n {
            for nu in 0..n {
                acc += fup[(mu, nu)] * f[(mu, nu)];
            }
        }
        Ok(acc * vol * (-0.25))
    }
}

impl FieldTheory for EmTheory {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn rank(&self) -> TensorRank {
        TensorRank::Covector
    }

    fn coupling_order(&self) -> u8 {
        0
    }

    fn density(&self, matter: &MatterJet<Dual>, metric: &MetricJet<Dual>) -> Result<Dual> {
        Self::density_generic(matter, metric)
    }

    /// `ξ^{(λ)} = −A_μ ξ^μ_{,λ}`, i.e. `C^{(λ)ρ}_ν = −A_ν δ^ρ_λ`.
    fn lift_coefficients(&self, values: &[f64]) -> LiftCoefficients {
        let n = values.len();
        LiftCoefficients {
            c0: Mat::zeros(n),
            c1: Tensor3::from_fn(n, |l, rho, nu| if rho == l { -values[nu] } else { 0.0 }),
        }
    }
}
