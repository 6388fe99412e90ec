//! Fields transported by diffeomorphisms, evaluated as exact jets.
//!
//! Transport by `σ` needs the jet of `σ⁻¹` at the evaluation point. That jet
//! comes either from an explicit inverse expression or from Newton inversion
//! followed by series reversion of `σ`'s own jet.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::field::{Field, FieldMap};
use super::newton::{invert_series, invert_series_matrix, newton_invert};
use super::taylor::Taylor;
use crate::error::{Error, Result};

/// Tensor character of a matter field, which fixes how it is pushed forward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorRank {
    /// One-form `A_μ`: `(σ_* A)(x′) = A(σ⁻¹x′) · Dσ⁻¹(x′)`.
    Covector,
    /// Vector `φ^μ`: `(σ_* φ)(x′) = Dσ(σ⁻¹x′) · φ(σ⁻¹x′)`.
    Vector,
}

/// Source of jets of `σ⁻¹`.
#[derive(Clone, Debug)]
pub enum InverseMap {
    Explicit(Arc<dyn Field>),
    /// Invert the forward map numerically at each point.
    Newton(Arc<dyn Field>),
}

impl InverseMap {
    /// Jet of `σ⁻¹` at `x`, to `order`.
    pub fn taylor_at(&self, x: &[f64], order: usize) -> Result<Vec<Taylor>> {
        match self {
            InverseMap::Explicit(inv) => inv.taylor(x, order),
            InverseMap::Newton(fwd) => {
                let y = newton_invert(fwd.as_ref(), x, x)?;
                let fy = fwd.taylor(&y, order.max(1))?;
                invert_series(&fy, &y, order)
            }
        }
    }
}

/// A diffeomorphism `σ` together with a way to evaluate `σ⁻¹`.
#[derive(Clone, Debug)]
pub struct Diffeo {
    forward: Arc<dyn Field>,
    inverse: InverseMap,
}

impl Diffeo {
    /// `σ` with its inverse obtained by Newton inversion.
    pub fn new(forward: FieldMap) -> Self {
        let forward: Arc<dyn Field> = Arc::new(forward);
        Self {
            inverse: InverseMap::Newton(forward.clone()),
            forward,
        }
    }

    pub fn with_inverse(forward: FieldMap, inverse: FieldMap) -> Self {
        Self {
            forward: Arc::new(forward),
            inverse: InverseMap::Explicit(Arc::new(inverse)),
        }
    }

    pub fn from_parts(forward: Arc<dyn Field>, inverse: InverseMap) -> Self {
        Self { forward, inverse }
    }

    pub fn forward(&self) -> &Arc<dyn Field> {
        &self.forward
    }

    pub fn inverse(&self) -> &InverseMap {
        &self.inverse
    }
}

/// `f ∘ σ⁻¹`: how `σ_S` acts on a covariance field.
#[derive(Clone, Debug)]
pub struct Composed {
    pub field: Arc<dyn Field>,
    pub inverse: InverseMap,
}

impl Field for Composed {
    fn domain_dim(&self) -> usize {
        self.field.domain_dim()
    }

    fn codomain_dim(&self) -> usize {
        self.field.codomain_dim()
    }

    fn taylor(&self, x: &[f64], order: usize) -> Result<Vec<Taylor>> {
        let s = self.inverse.taylor_at(x, order)?;
        let y: Vec<f64> = s.iter().map(|t| t.value()).collect();
        let fy = self.field.taylor(&y, order)?;
        Ok(fy.iter().map(|f| f.compose(&y, &s)).collect())
    }
}

/// Push-forward of a tensor field by `σ`, given `σ⁻¹`.
#[derive(Clone, Debug)]
pub struct Transported {
    pub field: Arc<dyn Field>,
    pub rank: TensorRank,
    pub inverse: InverseMap,
}

impl Field for Transported {
    fn domain_dim(&self) -> usize {
        self.field.domain_dim()
    }

    fn codomain_dim(&self) -> usize {
        self.field.codomain_dim()
    }

    fn taylor(&self, x: &[f64], order: usize) -> Result<Vec<Taylor>> {
        let n = x.len();
        if self.field.codomain_dim() != n {
            return Err(Error::DimensionMismatch(
                "tensor transport needs n components".into(),
            ));
        }
        let s_hi = self.inverse.taylor_at(x, order + 1)?;
        let s: Vec<Taylor> = s_hi.iter().map(|t| t.truncate(order)).collect();
        let y: Vec<f64> = s.iter().map(|t| t.value()).collect();
        let fy = self.field.taylor(&y, order)?;
        let pulled: Vec<Taylor> = fy.iter().map(|f| f.compose(&y, &s)).collect();
        // ds[b][μ] = ∂_μ S^b
        let ds: Vec<Vec<Taylor>> = s_hi
            .iter()
            .map(|sb| (0..n).map(|mu| sb.derivative(mu)).collect())
            .collect();
        let zero = Taylor::constant(pulled[0].layout(), 0.0);
        match self.rank {
            TensorRank::Covector => Ok((0..n)
                .map(|mu| {
                    (0..n).fold(zero.clone(), |acc, b| {
                        acc.add_ref(&pulled[b].mul_ref(&ds[b][mu]))
                    })
                })
                .collect()),
            TensorRank::Vector => {
                // Dσ at σ⁻¹(x) is the inverse of Dσ⁻¹ at x.
                let inv = invert_series_matrix(&ds)?;
                Ok((0..n)
                    .map(|mu| {
                        (0..n).fold(zero.clone(), |acc, b| {
                            acc.add_ref(&inv[mu][b].mul_ref(&pulled[b]))
                        })
                    })
                    .collect())
            }
        }
    }
}
