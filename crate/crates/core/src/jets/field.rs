use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::taylor::{layout, Taylor};
use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Highest jet order exposed through [`eval_jet`].
pub const MAX_JET_ORDER: usize = 4;

/// Values and partial derivatives of a map at a base point.
///
/// Component `a` is stored as a truncated Taylor series, so `d2(a, μ, ν)` and
/// `d2(a, ν, μ)` read the same coefficient.
#[derive(Clone, Debug)]
pub struct JetPoint {
    base: Vec<f64>,
    comps: Vec<Taylor>,
}

impl JetPoint {
    pub fn new(base: Vec<f64>, comps: Vec<Taylor>) -> Self {
        Self { base, comps }
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.comps.first().map(|c| c.order()).unwrap_or(0)
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// Number of base coordinates.
    pub fn base_dim(&self) -> usize {
        self.base.len()
    }

    pub fn components(&self) -> &[Taylor] {
        &self.comps
    }

    pub fn value(&self, a: usize) -> f64 {
        self.comps[a].value()
    }

    pub fn values(&self) -> Vec<f64> {
        self.comps.iter().map(|c| c.value()).collect()
    }

    pub fn d1(&self, a: usize, mu: usize) -> f64 {
        self.comps[a].partial(&[mu])
    }

    pub fn d2(&self, a: usize, mu: usize, nu: usize) -> f64 {
        self.comps[a].partial(&[mu, nu])
    }

    pub fn partial(&self, a: usize, vars: &[usize]) -> f64 {
        self.comps[a].partial(vars)
    }

    pub fn require_order(&self, k: usize, what: &'static str) -> Result<()> {
        if self.order() < k {
            Err(Error::MissingJet(what))
        } else {
            Ok(())
        }
    }

    /// First-derivative matrix `[a][μ]`; square maps only.
    pub fn jacobian(&self) -> Result<Mat<f64>> {
        self.require_order(1, "first derivatives")?;
        if self.len() != self.base_dim() {
            return Err(Error::DimensionMismatch(
                "jacobian of non-square map".into(),
            ));
        }
        Ok(Mat::from_fn(self.len(), |a, mu| self.d1(a, mu)))
    }

    /// `d1` as nested rows `[a][μ]`.
    pub fn d1_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|a| (0..self.base_dim()).map(|mu| self.d1(a, mu)).collect())
            .collect()
    }
}

/// Anything that can produce exact jets at a point.
pub trait Field: Send + Sync + fmt::Debug {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;
    /// Taylor expansion of every component around `x`, to the given order.
    fn taylor(&self, x: &[f64], order: usize) -> Result<Vec<Taylor>>;

    fn jet(&self, x: &[f64], order: usize) -> Result<JetPoint> {
        Ok(JetPoint::new(x.to_vec(), self.taylor(x, order)?))
    }

    fn value(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.taylor(x, 0)?.iter().map(|t| t.value()).collect())
    }
}

/// A map given by one analytic expression per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FieldMap {
    components: Vec<Expr>,
    domain_dim: usize,
}

impl FieldMap {
    pub fn new(components: Vec<Expr>, domain_dim: usize) -> Result<Self> {
        if domain_dim == 0 {
            return Err(Error::DimensionMismatch(
                "field map needs at least one coordinate".into(),
            ));
        }
        for (i, c) in components.iter().enumerate() {
            if let Some(v) = c.max_var() {
                if v >= domain_dim {
                    return Err(Error::DimensionMismatch(format!(
                        "component {i} references x{v} but domain has dimension {domain_dim}"
                    )));
                }
            }
        }
        Ok(Self {
            components,
            domain_dim,
        })
    }

    /// Parse prefix-form component strings; the domain dimension is the
    /// number of components (the square case used for spacetime maps).
    pub fn parse_square(src: &[impl AsRef<str>]) -> Result<Self> {
        let comps = src
            .iter()
            .map(|s| Expr::parse(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let n = comps.len();
        Self::new(comps, n)
    }

    pub fn parse(src: &[impl AsRef<str>], domain_dim: usize) -> Result<Self> {
        let comps = src
            .iter()
            .map(|s| Expr::parse(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps, domain_dim)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            components: (0..n).map(Expr::x).collect(),
            domain_dim: n,
        }
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn into_arc(self) -> Arc<dyn Field> {
        Arc::new(self)
    }
}

impl TryFrom<Vec<String>> for FieldMap {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        FieldMap::parse_square(&v)
    }
}

impl From<FieldMap> for Vec<String> {
    fn from(f: FieldMap) -> Self {
        f.components.iter().map(|e| e.to_string()).collect()
    }
}

impl Field for FieldMap {
    fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    fn codomain_dim(&self) -> usize {
        self.components.len()
    }

    fn taylor(&self, x: &[f64], order: usize) -> Result<Vec<Taylor>> {
        if x.len() != self.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, map expects {}",
                x.len(),
                self.domain_dim
            )));
        }
        let l = layout(self.domain_dim, order);
        let vars: Vec<Taylor> = x
            .iter()
            .enumerate()
            .map(|(i, &xi)| Taylor::variable(&l, i, xi))
            .collect();
        self.components.iter().map(|e| e.eval(&vars)).collect()
    }

    fn value(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|e| e.eval_f64(x)).collect()
    }
}

/// Exact jet of `f` at `p` via forward-mode Taylor arithmetic.
pub fn eval_jet(f: &dyn Field, p: &[f64], order: usize) -> Result<JetPoint> {
    if order > MAX_JET_ORDER {
        return Err(Error::MissingJet("jet order above 4 is not supported"));
    }
    f.jet(p, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_jet() {
        let f = FieldMap::parse_square(&["(* x0 x1)", "x1"]).unwrap();
        let j = eval_jet(&f, &[2.0, 3.0], 1).unwrap();
        assert_eq!(j.value(0), 6.0);
        assert_eq!(j.d1(0, 0), 3.0);
        assert_eq!(j.d1(0, 1), 2.0);
    }

    #[test]
    fn sine_jet_at_origin() {
        let f = FieldMap::parse(&["(sin x0)"], 1).unwrap();
        let j = eval_jet(&f, &[0.0], 2).unwrap();
        assert_eq!((j.value(0), j.d1(0, 0), j.d2(0, 0, 0)), (0.0, 1.0, 0.0));
    }

    #[test]
    fn order_above_four_rejected() {
        let f = FieldMap::identity(2);
        assert!(matches!(
            eval_jet(&f, &[0.0, 0.0], 5),
            Err(Error::MissingJet(_))
        ));
    }

    #[test]
    fn out_of_range_symbol_rejected() {
        assert!(matches!(
            FieldMap::parse(&["x2"], 2),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn missing_jet_detected() {
        let f = FieldMap::identity(2);
        let j = eval_jet(&f, &[0.0, 0.0], 1).unwrap();
        assert!(j.require_order(2, "second derivatives").is_err());
        assert!(j.jacobian().is_ok());
    }

    #[test]
    fn serde_uses_prefix_strings() {
        let f = FieldMap::parse_square(&["(sin x0)", "(* 2.0 x1)"]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"["(sin x0)","(* 2.0 x1)"]"#);
        let back: FieldMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
