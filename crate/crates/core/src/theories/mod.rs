//! Lagrangian densities with a background (or pulled-back) metric.
//!
//! Each theory implements [`FieldTheory::density`] over [`Dual`] numbers;
//! every partial derivative with respect to a jet or metric slot is one
//! evaluation with a unit tangent in that slot.

mod em;
mod kg;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::MetricJet;
use crate::jets::{JetPoint, TensorRank};
use crate::linalg::{Mat, Tensor3};
use crate::scalar::{Dual, Real};

pub use em::EmTheory;
pub use kg::KgVectorTheory;

/// Values `y^A` and first partials `y^A_{,μ}` (row `A`, column `μ`).
#[derive(Clone, Debug, PartialEq)]
pub struct MatterJet<S> {
    pub y: Vec<S>,
    pub yd: Mat<S>,
}

impl MatterJet<f64> {
    pub fn from_jet(j: &JetPoint) -> Result<Self> {
        j.require_order(1, "matter first derivatives")?;
        if j.len() != j.base_dim() {
            return Err(Error::DimensionMismatch(
                "matter fields need one component per coordinate".into(),
            ));
        }
        Ok(Self {
            y: j.values(),
            yd: Mat::from_fn(j.len(), |a, mu| j.d1(a, mu)),
        })
    }

    pub fn lift<S: Real>(&self) -> MatterJet<S> {
        MatterJet {
            y: self.y.iter().map(|&v| S::from(v)).collect(),
            yd: self.yd.map(S::from),
        }
    }
}

/// Density value and its partials at one point.
///
/// Metric partials follow the full-sum convention
/// `dL = dG_{μν} δG_{μν}` summed over all ordered pairs, so they are
/// symmetric in `(μ, ν)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianValue {
    pub density: f64,
    /// `∂L/∂G_{μν}`
    pub dg: Mat<f64>,
    /// `∂L/∂G_{μν,ρ}` stored as `(μ, ν, ρ)`; only for derivative couplings.
    pub dgd: Option<Tensor3<f64>>,
    /// `∂L/∂y^A`
    pub dy: Vec<f64>,
    /// `∂L/∂y^A_{,μ}` (row `A`, column `μ`)
    pub dyd: Mat<f64>,
}

/// Coefficients of the lifted infinitesimal diffeomorphism,
/// `ξ^A = C^{Aρ}_ν ξ^ν_{,ρ} + C^A_ν ξ^ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftCoefficients {
    /// `C^A_ν` (row `A`, column `ν`)
    pub c0: Mat<f64>,
    /// `C^{Aρ}_ν` stored as `(A, ρ, ν)`
    pub c1: Tensor3<f64>,
}

impl LiftCoefficients {
    /// `ξ^A` given `ξ^ν` and `dxi[(ν, ρ)] = ξ^ν_{,ρ}`.
    pub fn contract(&self, xi: &[f64], dxi: &Mat<f64>) -> Vec<f64> {
        let n = xi.len();
        (0..n)
            .map(|a| {
                let mut acc = 0.0;
                for nu in 0..n {
                    acc += self.c0[(a, nu)] * xi[nu];
                    for rho in 0..n {
                        acc += self.c1[(a, rho, nu)] * dxi[(nu, rho)];
                    }
                }
                acc
            })
            .collect()
    }
}

/// A first-order Lagrangian density coupled to a metric.
pub trait FieldTheory: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn rank(&self) -> TensorRank;
    /// 0 when only `G_{μν}` enters, 1 when `G_{μν,ρ}` does too.
    fn coupling_order(&self) -> u8;
    fn mass(&self) -> Option<f64> {
        None
    }
    /// Differential index of the lift.
    fn index(&self) -> u8 {
        1
    }
    fn density(&self, matter: &MatterJet<Dual>, metric: &MetricJet<Dual>) -> Result<Dual>;
    fn lift_coefficients(&self, values: &[f64]) -> LiftCoefficients;
}

fn tangent<F>(f: F) -> Result<f64>
where
    F: FnOnce() -> Result<Dual>,
{
    f().map(|d| d.d)
}

/// Evaluate the density and all its slot partials.
pub fn lagrangian(
    theory: &dyn FieldTheory,
    matter: &MatterJet<f64>,
    metric: &MetricJet<f64>,
) -> Result<LagrangianValue> {
    let n = metric.dim();
    if matter.y.len() != n {
        return Err(Error::DimensionMismatch(
            "matter and metric dimensions differ".into(),
        ));
    }
    let m0: MatterJet<Dual> = matter.lift();
    let g0: MetricJet<Dual> = metric.lift();
    let density = theory.density(&m0, &g0)?.v;

    let mut dy = vec![0.0; n];
    for (a, slot) in dy.iter_mut().enumerate() {
        let mut m = m0.clone();
        m.y[a].d = 1.0;
        *slot = tangent(|| theory.density(&m, &g0))?;
    }
    let mut dyd = Mat::zeros(n);
    for a in 0..n {
        for mu in 0..n {
            let mut m = m0.clone();
            m.yd[(a, mu)].d = 1.0;
            dyd[(a, mu)] = tangent(|| theory.density(&m, &g0))?;
        }
    }
    let mut dg = Mat::zeros(n);
    for mu in 0..n {
        for nu in mu..n {
            let mut g = g0.clone();
            g.g[(mu, nu)].d = 1.0;
            g.g[(nu, mu)].d = 1.0;
            let mut v = tangent(|| theory.density(&m0, &g))?;
            if mu != nu {
                v *= 0.5;
            }
            dg[(mu, nu)] = v;
            dg[(nu, mu)] = v;
        }
    }
    let dgd = if theory.coupling_order() >= 1 {
        metric.require_d1()?;
        let mut t = Tensor3::zeros(n);
        for mu in 0..n {
            for nu in mu..n {
                for rho in 0..n {
                    let mut g = g0.clone();
                    let d1 = g.d1.as_mut().expect("checked above");
                    d1[(mu, nu, rho)].d = 1.0;
                    d1[(nu, mu, rho)].d = 1.0;
                    let mut v = tangent(|| theory.density(&m0, &g))?;
                    if mu != nu {
                        v *= 0.5;
                    }
                    t[(mu, nu, rho)] = v;
                    t[(nu, mu, rho)] = v;
                }
            }
        }
        Some(t)
    } else {
        None
    };
    Ok(LagrangianValue {
        density,
        dg,
        dgd,
        dy,
        dyd,
    })
}

/// Parameters a theory may be built with.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TheoryParams {
    pub mass: Option<f64>,
}

pub type TheoryBuilder = fn(&TheoryParams) -> Result<Arc<dyn FieldTheory>>;

/// Theories selectable by name at run time.
#[derive(Clone)]
pub struct TheoryRegistry {
    entries: Vec<(&'static str, TheoryBuilder)>,
}

impl fmt::Debug for TheoryRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl TheoryRegistry {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// The built-in catalog: `em` and `kg_vector`.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(EmTheory::NAME, |p| {
            if p.mass.is_some() {
                return Err(Error::Validation("theory em takes no mass".into()));
            }
            Ok(Arc::new(EmTheory))
        });
        r.register(KgVectorTheory::NAME, |p| {
            let m = p
                .mass
                .ok_or_else(|| Error::Validation("theory kg_vector needs a mass".into()))?;
            Ok(Arc::new(KgVectorTheory::new(m)?))
        });
        r
    }

    /// Add or replace an entry.
    pub fn register(&mut self, name: &'static str, builder: TheoryBuilder) {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(e) => e.1 = builder,
            None => self.entries.push((name, builder)),
        }
    }

    pub fn build(&self, name: &str, params: &TheoryParams) -> Result<Arc<dyn FieldTheory>> {
        let (_, b) = self
            .entries
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::UnsupportedTheory(name.to_string()))?;
        b(params)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }
}

/// Build a theory from the standard registry.
pub fn theory_by_name(name: &str, params: &TheoryParams) -> Result<Arc<dyn FieldTheory>> {
    TheoryRegistry::standard().build(name, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup() {
        let r = TheoryRegistry::standard();
        assert_eq!(r.names(), vec!["em", "kg_vector"]);
        assert_eq!(
            r.build("em", &TheoryParams::default()).unwrap().name(),
            "em"
        );
        let kg = r
            .build("kg_vector", &TheoryParams { mass: Some(2.0) })
            .unwrap();
        assert_eq!((kg.coupling_order(), kg.mass()), (1, Some(2.0)));
        assert!(matches!(
            r.build("proca", &TheoryParams::default()),
            Err(Error::UnsupportedTheory(_))
        ));
        assert!(r.build("kg_vector", &TheoryParams::default()).is_err());
    }
}
