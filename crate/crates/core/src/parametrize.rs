//! The covariance construction: a diffeomorphism `η: X → S` carries a fixed
//! metric `g` on `S` back to `G = η*g`, and the parametrized density is
//! `L̃(j¹φ, j¹η) = L(j¹φ; η*g)` (or `j²η` for derivative couplings).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_lorentz, christoffel, Christoffel, MetricJet};
use crate::jets::{Composed, Diffeo, Expr, Field, FieldMap, InverseMap, JetPoint, Transported};
use crate::linalg::{Mat, Tensor3};
use crate::scalar::{Dual, Real};
use crate::theories::{lagrangian, FieldTheory, LagrangianValue, MatterJet};

/// Metric `g_{ab}(u)` on the fiber copy `S`, one expression per entry in the
/// coordinates `x0..` (read as `u^a`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<String>>", into = "Vec<Vec<String>>")]
pub struct FiberMetric {
    dim: usize,
    map: FieldMap,
}

/// Fiber metric with its first and second `u`-derivatives at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberJet {
    pub g: Mat<f64>,
    /// `g_{ab,c}` as `(a, b, c)`
    pub g1: Tensor3<f64>,
    /// `g2[d][(a, b, c)] = g_{ab,cd}`
    pub g2: Vec<Tensor3<f64>>,
}

impl FiberJet {
    pub fn christoffel(&self) -> Result<Christoffel<f64>> {
        christoffel(&MetricJet::with_d1(self.g.clone(), self.g1.clone()))
    }
}

impl FiberMetric {
    pub fn new(rows: Vec<Vec<Expr>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(
                "fiber metric must be a square matrix of size ≥ 2".into(),
            ));
        }
        for a in 0..n {
            for b in a + 1..n {
                if rows[a][b].to_string() != rows[b][a].to_string() {
                    return Err(Error::Validation(format!(
                        "fiber metric entries ({a},{b}) and ({b},{a}) differ"
                    )));
                }
            }
        }
        let map = FieldMap::new(rows.into_iter().flatten().collect(), n)?;
        Ok(Self { dim: n, map })
    }

    pub fn parse(rows: &[Vec<&str>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| Expr::parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    pub fn minkowski(n: usize) -> Self {
        let rows = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| match (a == b, a) {
                        (true, 0) => Expr::c(-1.0),
                        (true, _) => Expr::c(1.0),
                        _ => Expr::c(0.0),
                    })
                    .collect()
            })
            .collect();
        Self::new(rows).expect("minkowski metric is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, a: usize, b: usize) -> &Expr {
        &self.map.components()[a * self.dim + b]
    }

    /// Jet to order 2 at fiber point `u`.
    pub fn jet(&self, u: &[f64]) -> Result<FiberJet> {
        let n = self.dim;
        let t = self.map.taylor(u, 2)?;
        let at = |a: usize, b: usize| &t[a * n + b];
        Ok(FiberJet {
            g: Mat::from_fn(n, |a, b| at(a, b).value()),
            g1: Tensor3::from_fn(n, |a, b, c| at(a, b).partial(&[c])),
            g2: (0..n)
                .map(|d| Tensor3::from_fn(n, |a, b, c| at(a, b).partial(&[c, d])))
                .collect(),
        })
    }

    pub fn value(&self, u: &[f64]) -> Result<Mat<f64>> {
        let v = self.map.value(u)?;
        Ok(Mat::from_fn(self.dim, |a, b| v[a * self.dim + b]))
    }
}

impl TryFrom<Vec<Vec<String>>> for FiberMetric {
    type Error = Error;
    fn try_from(rows: Vec<Vec<String>>) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| Expr::parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }
}

impl From<FiberMetric> for Vec<Vec<String>> {
    fn from(m: FiberMetric) -> Self {
        (0..m.dim)
            .map(|a| (0..m.dim).map(|b| m.entry(a, b).to_string()).collect())
            .collect()
    }
}

/// A covariance field `η: X → S`, optionally with an explicit inverse `κ`.
#[derive(Clone, Debug)]
pub struct CovarianceField {
    eta: Arc<dyn Field>,
    inverse: Option<Arc<dyn Field>>,
}

impl CovarianceField {
    pub fn new(eta: Arc<dyn Field>) -> Self {
        Self { eta, inverse: None }
    }

    pub fn with_inverse(eta: Arc<dyn Field>, inverse: Arc<dyn Field>) -> Self {
        Self {
            eta,
            inverse: Some(inverse),
        }
    }

    pub fn identity(n: usize) -> Self {
        let id = FieldMap::identity(n).into_arc();
        Self::with_inverse(id.clone(), id)
    }

    pub fn eta(&self) -> &Arc<dyn Field> {
        &self.eta
    }

    pub fn explicit_inverse(&self) -> Option<&Arc<dyn Field>> {
        self.inverse.as_ref()
    }

    /// How to evaluate `κ = η⁻¹`.
    pub fn inverse_map(&self) -> InverseMap {
        match &self.inverse {
            Some(k) => InverseMap::Explicit(k.clone()),
            None => InverseMap::Newton(self.eta.clone()),
        }
    }

    pub fn jet(&self, x: &[f64], order: usize) -> Result<JetPoint> {
        self.eta.jet(x, order)
    }

    /// `det Dη(x)`, required to be positive.
    pub fn orientation(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eta.jet(x, 1)?.jacobian()?.det())
    }

    pub fn check_oriented(&self, x: &[f64]) -> Result<()> {
        let d = self.orientation(x)?;
        if d > 0.0 {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "covariance field has det Dη = {d:e} ≤ 0 at point {x:?}"
            )))
        }
    }
}

/// First and (optionally) second partials of `η`, generic so single slots
/// can carry a dual tangent.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaJet<S> {
    pub u: Vec<f64>,
    /// `u^a_{,μ}` (row `a`, column `μ`)
    pub ud: Mat<S>,
    /// `udd[a][(μ, ν)] = u^a_{,μν}`
    pub udd: Option<Vec<Mat<S>>>,
}

impl EtaJet<f64> {
    pub fn from_jet(j: &JetPoint) -> Result<Self> {
        j.require_order(1, "covariance field first derivatives")?;
        let n = j.len();
        let udd = (j.order() >= 2).then(|| {
            (0..n)
                .map(|a| Mat::from_fn(n, |mu, nu| j.d2(a, mu, nu)))
                .collect()
        });
        Ok(Self {
            u: j.values(),
            ud: j.jacobian()?,
            udd,
        })
    }

    pub fn lift<S: Real>(&self) -> EtaJet<S> {
        EtaJet {
            u: self.u.clone(),
            ud: self.ud.map(S::from),
            udd: self
                .udd
                .as_ref()
                .map(|v| v.iter().map(|m| m.map(S::from)).collect()),
        }
    }
}

/// `G_{μν} = u^a_μ u^b_ν g_ab` and, when second partials and `g_{ab,c}` are
/// given, `G_{μν,ρ}`.
pub fn pullback_generic<S: Real>(
    ud: &Mat<S>,
    udd: Option<&[Mat<S>]>,
    g: &Mat<S>,
    g1: Option<&Tensor3<S>>,
) -> MetricJet<S> {
    let n = ud.dim();
    // w[(a, ν)] = g_ab u^b_ν
    let w = g.matmul(ud);
    let big_g = Mat::from_fn(n, |mu, nu| {
        let mut acc = S::zero();
        for a in 0..n {
            acc += ud[(a, mu)] * w[(a, nu)];
        }
        acc
    });
    let d1 = match (udd, g1) {
        (Some(udd), Some(g1)) => {
            // h[(μ, ν, c)] = u^a_μ u^b_ν g_{ab,c}
            let mut h = Tensor3::zeros(n);
            for c in 0..n {
                for mu in 0..n {
                    for nu in mu..n {
                        let mut acc = S::zero();
                        for a in 0..n {
                            for b in 0..n {
                                acc += ud[(a, mu)] * ud[(b, nu)] * g1[(a, b, c)];
                            }
                        }
                        h[(mu, nu, c)] = acc;
                        h[(nu, mu, c)] = acc;
                    }
                }
            }
            let mut d = Tensor3::zeros(n);
            for mu in 0..n {
                for nu in mu..n {
                    for rho in 0..n {
                        let mut acc = S::zero();
                        for a in 0..n {
                            acc += udd[a][(mu, rho)] * w[(a, nu)] + w[(a, mu)] * udd[a][(nu, rho)];
                        }
                        for c in 0..n {
                            acc += h[(mu, nu, c)] * ud[(c, rho)];
                        }
                        d[(mu, nu, rho)] = acc;
                        d[(nu, mu, rho)] = acc;
                    }
                }
            }
            Some(d)
        }
        _ => None,
    };
    MetricJet { g: big_g, d1 }
}

/// `G = η*g` at the base point of `eta_jet`, components only.
pub fn pullback_metric(eta_jet: &JetPoint, g: &FiberMetric) -> Result<MetricJet<f64>> {
    let eta = EtaJet::from_jet(eta_jet)?;
    let gv = g.value(&eta.u)?;
    let m = pullback_generic(&eta.ud, None, &gv, None);
    check_lorentz(&m.g)?;
    Ok(m)
}

/// `G = η*g` together with `G_{μν,ρ}`.
pub fn pullback_metric_jet(eta_jet2: &JetPoint, g: &FiberMetric) -> Result<MetricJet<f64>> {
    eta_jet2.require_order(2, "covariance field second derivatives")?;
    let eta = EtaJet::from_jet(eta_jet2)?;
    let fj = g.jet(&eta.u)?;
    let m = pullback_generic(&eta.ud, eta.udd.as_deref(), &fj.g, Some(&fj.g1));
    check_lorentz(&m.g)?;
    Ok(m)
}

/// `L̃` and its partials at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametrizedValue {
    pub density: f64,
    /// `∂L̃/∂y^A`
    pub dy: Vec<f64>,
    /// `∂L̃/∂y^A_{,μ}`
    pub dyd: Mat<f64>,
    /// `∂L̃/∂u^a`
    pub du: Vec<f64>,
    /// `∂L̃/∂u^a_{,μ}` (row `a`, column `μ`)
    pub dud: Mat<f64>,
    /// `∂L̃/∂u^a_{,μν}`, full-sum convention, symmetric in `(μ, ν)`
    pub dudd: Option<Vec<Mat<f64>>>,
    /// `G = η*g` with `G_{μν,ρ}`.
    pub metric: MetricJet<f64>,
    /// The unparametrized density and its partials at `G`.
    pub original: LagrangianValue,
}

/// Everything the parametrized density depends on at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamInputs {
    pub matter: MatterJet<f64>,
    pub eta: EtaJet<f64>,
    pub fiber: FiberJet,
}

impl ParamInputs {
    pub fn new(matter_jet: &JetPoint, eta_jet: &JetPoint, g: &FiberMetric) -> Result<Self> {
        let eta = EtaJet::from_jet(eta_jet)?;
        Ok(Self {
            matter: MatterJet::from_jet(matter_jet)?,
            fiber: g.jet(&eta.u)?,
            eta,
        })
    }

    /// `G = η*g`, with derivatives when second partials of `η` are present.
    pub fn metric(&self) -> MetricJet<f64> {
        pullback_generic(
            &self.eta.ud,
            self.eta.udd.as_deref(),
            &self.fiber.g,
            Some(&self.fiber.g1),
        )
    }
}

fn tilde_density(
    theory: &dyn FieldTheory,
    matter: &MatterJet<Dual>,
    eta: &EtaJet<Dual>,
    g: &Mat<Dual>,
    g1: &Tensor3<Dual>,
) -> Result<Dual> {
    let metric = if theory.coupling_order() >= 1 {
        let udd = eta
            .udd
            .as_deref()
            .ok_or(Error::MissingJet("covariance field second derivatives"))?;
        pullback_generic(&eta.ud, Some(udd), g, Some(g1))
    } else {
        pullback_generic(&eta.ud, None, g, None)
    };
    theory.density(matter, &metric)
}

/// `L̃ = L(j¹φ; η*g)` and all its slot partials.
pub fn parametrized_lagrangian(
    theory: &dyn FieldTheory,
    inputs: &ParamInputs,
) -> Result<ParametrizedValue> {
    let n = inputs.eta.ud.dim();
    let second = theory.coupling_order() >= 1;
    if second && inputs.eta.udd.is_none() {
        return Err(Error::MissingJet("covariance field second derivatives"));
    }
    let metric = inputs.metric();
    check_lorentz(&metric.g)?;
    let original = lagrangian(theory, &inputs.matter, &metric)?;

    let m0: MatterJet<Dual> = inputs.matter.lift();
    let e0: EtaJet<Dual> = inputs.eta.lift();
    let g0: Mat<Dual> = inputs.fiber.g.map(Dual::from);
    let g10: Tensor3<Dual> = inputs.fiber.g1.map(Dual::from);
    let eval = |m: &MatterJet<Dual>, e: &EtaJet<Dual>, g: &Mat<Dual>, g1: &Tensor3<Dual>| {
        tilde_density(theory, m, e, g, g1)
    };
    let density = eval(&m0, &e0, &g0, &g10)?.v;

    let mut dy = vec![0.0; n];
    for (a, slot) in dy.iter_mut().enumerate() {
        let mut m = m0.clone();
        m.y[a].d = 1.0;
        *slot = eval(&m, &e0, &g0, &g10)?.d;
    }
    let mut dyd = Mat::zeros(n);
    for a in 0..n {
        for mu in 0..n {
            let mut m = m0.clone();
            m.yd[(a, mu)].d = 1.0;
            dyd[(a, mu)] = eval(&m, &e0, &g0, &g10)?.d;
        }
    }
    // u^a enters only through g(u): g → g + ε g_{,a}, g_{,c} → g_{,c} + ε g_{,ca}
    let fj = &inputs.fiber;
    let mut du = vec![0.0; n];
    for (a, slot) in du.iter_mut().enumerate() {
        let g = Mat::from_fn(n, |b, c| Dual::new(fj.g[(b, c)], fj.g1[(b, c, a)]));
        let g1 = Tensor3::from_fn(n, |b, c, d| {
            Dual::new(fj.g1[(b, c, d)], fj.g2[a][(b, c, d)])
        });
        *slot = eval(&m0, &e0, &g, &g1)?.d;
    }
    let mut dud = Mat::zeros(n);
    for a in 0..n {
        for mu in 0..n {
            let mut e = e0.clone();
            e.ud[(a, mu)].d = 1.0;
            dud[(a, mu)] = eval(&m0, &e, &g0, &g10)?.d;
        }
    }
    let dudd = if second {
        let mut out = vec![Mat::zeros(n); n];
        for (a, slot) in out.iter_mut().enumerate() {
            for mu in 0..n {
                for nu in mu..n {
                    let mut e = e0.clone();
                    let udd = e.udd.as_mut().expect("checked above");
                    udd[a][(mu, nu)].d = 1.0;
                    udd[a][(nu, mu)].d = 1.0;
                    let mut v = eval(&m0, &e, &g0, &g10)?.d;
                    if mu != nu {
                        v *= 0.5;
                    }
                    slot[(mu, nu)] = v;
                    slot[(nu, mu)] = v;
                }
            }
        }
        Some(out)
    } else {
        None
    };
    Ok(ParametrizedValue {
        density,
        dy,
        dyd,
        du,
        dud,
        dudd,
        metric,
        original,
    })
}

/// Piola–Kirchhoff momenta by the chain-rule formula and by direct slot
/// perturbation of `L̃`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiolaKirchhoff {
    /// `ρ_a^μ` from partials of `L` (row `a`, column `μ`)
    pub formula: Mat<f64>,
    /// `∂L̃/∂u^a_{,μ}`
    pub direct: Mat<f64>,
    /// Second-order momenta `∂L̃/∂u^a_{,μν}` from partials of `L`, for
    /// derivative couplings.
    pub second_formula: Option<Vec<Mat<f64>>>,
    pub second_direct: Option<Vec<Mat<f64>>>,
}

impl PiolaKirchhoff {
    /// Largest componentwise disagreement between the two routes.
    pub fn discrepancy(&self) -> f64 {
        let mut m = 0.0f64;
        for (a, b) in self.formula.as_slice().iter().zip(self.direct.as_slice()) {
            m = m.max((a - b).abs());
        }
        if let (Some(f), Some(d)) = (&self.second_formula, &self.second_direct) {
            for (fa, da) in f.iter().zip(d) {
                for (a, b) in fa.as_slice().iter().zip(da.as_slice()) {
                    m = m.max((a - b).abs());
                }
            }
        }
        m
    }
}

/// `ρ_a^μ = 2 ∂L/∂G_{μν} u^b_ν g_ab`, extended by the `G_{μν,ρ}` chain for
/// derivative couplings, next to `∂L̃/∂u^a_{,μ}`.
pub fn piola_kirchhoff(inputs: &ParamInputs, value: &ParametrizedValue) -> PiolaKirchhoff {
    let n = inputs.eta.ud.dim();
    let ud = &inputs.eta.ud;
    let fj = &inputs.fiber;
    let q = &value.original.dg;
    let w = fj.g.matmul(ud);
    let mut formula = Mat::from_fn(n, |a, mu| {
        let mut acc = 0.0;
        for b in 0..n {
            acc += 2.0 * q[(mu, b)] * w[(a, b)];
        }
        acc
    });
    let mut second_formula = None;
    if let (Some(p), Some(udd)) = (&value.original.dgd, &inputs.eta.udd) {
        for a in 0..n {
            for mu in 0..n {
                let mut acc = 0.0;
                for beta in 0..n {
                    for rho in 0..n {
                        // g_ab u^b_{βρ} + g_{ab,d} u^b_β u^d_ρ
                        let mut k = 0.0;
                        for b in 0..n {
                            k += fj.g[(a, b)] * udd[b][(beta, rho)];
                            for d in 0..n {
                                k += fj.g1[(a, b, d)] * ud[(b, beta)] * ud[(d, rho)];
                            }
                        }
                        acc += 2.0 * p[(mu, beta, rho)] * k;
                    }
                }
                for al in 0..n {
                    for beta in 0..n {
                        let mut k = 0.0;
                        for c in 0..n {
                            for b in 0..n {
                                k += ud[(c, al)] * ud[(b, beta)] * fj.g1[(c, b, a)];
                            }
                        }
                        acc += p[(al, beta, mu)] * k;
                    }
                }
                formula[(a, mu)] += acc;
            }
        }
        second_formula = Some(
            (0..n)
                .map(|a| {
                    Mat::from_fn(n, |mu, nu| {
                        (0..n)
                            .map(|beta| (p[(mu, beta, nu)] + p[(nu, beta, mu)]) * w[(a, beta)])
                            .sum()
                    })
                })
                .collect(),
        );
    }
    PiolaKirchhoff {
        formula,
        direct: value.dud.clone(),
        second_formula,
        second_direct: value.dudd.clone(),
    }
}

/// A theory together with concrete matter and covariance fields and a fiber
/// metric: enough to evaluate every quantity at any point.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub theory: Arc<dyn FieldTheory>,
    pub matter: Arc<dyn Field>,
    pub eta: CovarianceField,
    pub fiber: FiberMetric,
}

impl Configuration {
    pub fn new(
        theory: Arc<dyn FieldTheory>,
        matter: Arc<dyn Field>,
        eta: CovarianceField,
        fiber: FiberMetric,
    ) -> Result<Self> {
        let n = fiber.dim();
        let dims = [
            matter.domain_dim(),
            matter.codomain_dim(),
            eta.eta().domain_dim(),
            eta.eta().codomain_dim(),
        ];
        if dims.iter().any(|&d| d != n) {
            return Err(Error::DimensionMismatch(format!(
                "fiber metric has dimension {n}, fields have {dims:?}"
            )));
        }
        Ok(Self {
            theory,
            matter,
            eta,
            fiber,
        })
    }

    pub fn dim(&self) -> usize {
        self.fiber.dim()
    }

    /// Jets at `x`: matter to order 1, `η` to order 2, fiber metric to order 2.
    pub fn inputs(&self, x: &[f64]) -> Result<ParamInputs> {
        ParamInputs::new(&self.matter.jet(x, 1)?, &self.eta.jet(x, 2)?, &self.fiber)
    }

    /// `G = η*g` with first derivatives at `x`.
    pub fn metric(&self, x: &[f64]) -> Result<MetricJet<f64>> {
        pullback_metric_jet(&self.eta.jet(x, 2)?, &self.fiber)
    }

    /// The unparametrized density and partials at `G = η*g`.
    pub fn original(&self, x: &[f64]) -> Result<(MetricJet<f64>, LagrangianValue)> {
        let inputs = self.inputs(x)?;
        let metric = inputs.metric();
        check_lorentz(&metric.g)?;
        let lv = lagrangian(self.theory.as_ref(), &inputs.matter, &metric)?;
        Ok((metric, lv))
    }

    pub fn parametrized(&self, x: &[f64]) -> Result<ParametrizedValue> {
        parametrized_lagrangian(self.theory.as_ref(), &self.inputs(x)?)
    }

    /// `L̃` alone.
    pub fn tilde_density(&self, x: &[f64]) -> Result<f64> {
        let inputs = self.inputs(x)?;
        let metric = inputs.metric();
        let lv = self.theory.density(&inputs.matter.lift(), &metric.lift())?;
        Ok(lv.v)
    }

    /// Act with a spacetime diffeomorphism `σ`: `η ↦ η∘σ⁻¹`, matter pushed
    /// forward according to its tensor rank.
    pub fn apply_diffeo(&self, sigma: &Diffeo) -> Configuration {
        let eta_new: Arc<dyn Field> = Arc::new(Composed {
            field: self.eta.eta().clone(),
            inverse: sigma.inverse().clone(),
        });
        // (η∘σ⁻¹)⁻¹ = σ∘κ
        let eta = match self.eta.explicit_inverse() {
            Some(k) => CovarianceField::with_inverse(
                eta_new,
                Arc::new(Composed {
                    field: sigma.forward().clone(),
                    inverse: InverseMap::Explicit(k.clone()),
                }),
            ),
            None => CovarianceField::new(eta_new),
        };
        let matter: Arc<dyn Field> = Arc::new(Transported {
            field: self.matter.clone(),
            rank: self.theory.rank(),
            inverse: sigma.inverse().clone(),
        });
        Configuration {
            theory: self.theory.clone(),
            matter,
            eta,
            fiber: self.fiber.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fiber_metric_round_trip() {
        let g = FiberMetric::parse(&[vec!["-1", "(* 0.1 x0)"], vec!["(* 0.1 x0)", "1"]]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: FiberMetric = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(FiberMetric::parse(&[vec!["-1", "x0"], vec!["0", "1"]]).is_err());
    }

    #[test]
    fn identity_pullback_of_minkowski() {
        let j = FieldMap::identity(4).jet(&[0.1, 0.2, 0.3, 0.4], 2).unwrap();
        let m = pullback_metric_jet(&j, &FiberMetric::minkowski(4)).unwrap();
        assert_eq!(m.g, MetricJet::minkowski(4).g);
        assert_eq!(m.d1.unwrap().max_abs(), 0.0);
    }

    #[test]
    fn scaling_pullback() {
        let eta = FieldMap::parse_square(&["(* 2 x0)", "(* 2 x1)"]).unwrap();
        let j = eta.jet(&[0.3, 0.1], 1).unwrap();
        let m = pullback_metric(&j, &FiberMetric::minkowski(2)).unwrap();
        assert_eq!(m.g, Mat::diag(&[-4.0, 4.0]));
    }

    #[test]
    fn degenerate_jacobian_rejected() {
        let eta = FieldMap::parse_square(&["x0", "(* 0 x1)"]).unwrap();
        let j = eta.jet(&[0.3, 0.1], 1).unwrap();
        assert!(pullback_metric(&j, &FiberMetric::minkowski(2)).is_err());
    }
}
