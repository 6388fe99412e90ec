//! Lorentzian metric algebra at a point.
//!
//! Sign convention is `(−, +, …, +)`. SEM tensor densities carry weight 1
//! (they include the `√−G` factor), so their covariant divergence has no
//! trace-of-Christoffel term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::JetPoint;
use crate::linalg::{negative_inertia, Mat, Tensor3};
use crate::scalar::Real;

/// Absolute determinant threshold for [`inverse_metric`].
pub const SINGULAR_DET: f64 = 1e-12;

/// Metric components with optional first coordinate derivatives
/// `d1[(μ, ν, ρ)] = G_{μν,ρ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet<S> {
    pub g: Mat<S>,
    pub d1: Option<Tensor3<S>>,
}

impl<S: Real> MetricJet<S> {
    pub fn new(g: Mat<S>) -> Self {
        Self { g, d1: None }
    }

    pub fn with_d1(g: Mat<S>, d1: Tensor3<S>) -> Self {
        Self { g, d1: Some(d1) }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn require_d1(&self) -> Result<&Tensor3<S>> {
        self.d1
            .as_ref()
            .ok_or(Error::MissingJet("metric first derivatives"))
    }

    /// Real part, dropping tangents.
    pub fn re(&self) -> MetricJet<f64> {
        MetricJet {
            g: self.g.map(|x| x.re()),
            d1: self.d1.as_ref().map(|t| t.map(|x| x.re())),
        }
    }
}

impl MetricJet<f64> {
    pub fn minkowski(n: usize) -> Self {
        let mut d = vec![1.0; n];
        d[0] = -1.0;
        Self::with_d1(Mat::diag(&d), Tensor3::zeros(n))
    }

    /// Embed into another real type with zero tangents.
    pub fn lift<S: Real>(&self) -> MetricJet<S> {
        MetricJet {
            g: self.g.map(S::from),
            d1: self.d1.as_ref().map(|t| t.map(S::from)),
        }
    }
}

/// Christoffel symbols `Γ^ρ_{μν}` stored as `symbols[(ρ, μ, ν)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel<S> {
    pub symbols: Tensor3<S>,
}

impl<S: Real> Christoffel<S> {
    pub fn get(&self, rho: usize, mu: usize, nu: usize) -> S {
        self.symbols[(rho, mu, nu)]
    }

    pub fn dim(&self) -> usize {
        self.symbols.dim()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemForm {
    /// `𝔗^{μν}`
    Contravariant,
    /// `𝔗^μ_ν`, row `μ`, column `ν`
    Mixed,
}

/// SEM tensor density. The density weight is always 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SemDensity {
    pub form: SemForm,
    pub data: Mat<f64>,
    /// `d1[(μ, ν, ρ)] = ∂_ρ 𝔗^{μν}` when populated.
    pub d1: Option<Tensor3<f64>>,
}

impl SemDensity {
    pub const WEIGHT: u8 = 1;

    pub fn contravariant(data: Mat<f64>) -> Self {
        Self {
            form: SemForm::Contravariant,
            data,
            d1: None,
        }
    }

    pub fn mixed(data: Mat<f64>) -> Self {
        Self {
            form: SemForm::Mixed,
            data,
            d1: None,
        }
    }

    pub fn with_d1(mut self, d1: Tensor3<f64>) -> Self {
        self.d1 = Some(d1);
        self
    }

    pub fn weight(&self) -> u8 {
        Self::WEIGHT
    }

    /// `𝔗^μ_ν = 𝔗^{μρ} G_{ρν}` from the contravariant form.
    pub fn lower(&self, g: &Mat<f64>) -> Result<SemDensity> {
        if self.form != SemForm::Contravariant {
            return Err(Error::DimensionMismatch(
                "lowering needs the contravariant form".into(),
            ));
        }
        Ok(SemDensity::mixed(self.data.matmul(g)))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.max_abs()
    }
}

/// Require exactly one negative eigenvalue.
pub fn check_lorentz(g: &Mat<f64>) -> Result<()> {
    match negative_inertia(g)? {
        1 => Ok(()),
        k => Err(Error::WrongSignature(format!("{k} negative eigenvalues"))),
    }
}

/// `G^{μν}` by Gauss elimination with partial pivoting.
pub fn inverse_metric<S: Real>(m: &MetricJet<S>) -> Result<Mat<S>> {
    let (inv, det) = m.g.inverse_and_det()?;
    if det.re().abs() < SINGULAR_DET {
        return Err(Error::SingularMetric { pivot: det.re() });
    }
    Ok(inv)
}

/// `√(−det G)`.
pub fn volume_factor<S: Real>(m: &MetricJet<S>) -> Result<S> {
    let det = m.g.det();
    if det.re() >= 0.0 {
        return Err(Error::WrongSignature(format!(
            "det G = {:e} is not negative",
            det.re()
        )));
    }
    Ok((-det).sqrt())
}

/// Levi-Civita symbols `Γ^ρ_{μν} = ½ G^{ρλ}(G_{λμ,ν} + G_{λν,μ} − G_{μν,λ})`.
pub fn christoffel<S: Real>(m: &MetricJet<S>) -> Result<Christoffel<S>> {
    let d1 = m.require_d1()?;
    let ginv = inverse_metric(m)?;
    christoffel_with_inverse(&ginv, d1)
}

pub(crate) fn christoffel_with_inverse<S: Real>(
    ginv: &Mat<S>,
    d1: &Tensor3<S>,
) -> Result<Christoffel<S>> {
    let n = ginv.dim();
    // lowered[(λ, μ, ν)]
    let lowered = Tensor3::from_fn(n, |l, mu, nu| {
        (d1[(l, mu, nu)] + d1[(l, nu, mu)] - d1[(mu, nu, l)]) * 0.5
    });
    let mut symbols = Tensor3::zeros(n);
    for rho in 0..n {
        for mu in 0..n {
            for nu in mu..n {
                let mut acc = S::zero();
                for l in 0..n {
                    acc += ginv[(rho, l)] * lowered[(l, mu, nu)];
                }
                symbols[(rho, mu, nu)] = acc;
                symbols[(rho, nu, mu)] = acc;
            }
        }
    }
    Ok(Christoffel { symbols })
}

/// Symbols of `G = η*g` from those of `g`:
/// `Γ^ρ_{μν} = η^b_{,μν} κ^ρ_b + η^c_{,μ} η^d_{,ν} γ^b_{cd} κ^ρ_b`.
pub fn christoffel_pullback(
    eta_jet2: &JetPoint,
    kappa: &Mat<f64>,
    gamma_fiber: &Christoffel<f64>,
) -> Result<Christoffel<f64>> {
    eta_jet2.require_order(2, "second derivatives of the covariance field")?;
    let n = kappa.dim();
    let mut symbols = Tensor3::zeros(n);
    for mu in 0..n {
        for nu in mu..n {
            // v^b = η^b_{,μν} + γ^b_{cd} η^c_{,μ} η^d_{,ν}
            let v: Vec<f64> = (0..n)
                .map(|b| {
                    let mut acc = eta_jet2.d2(b, mu, nu);
                    for c in 0..n {
                        for d in 0..n {
                            acc +=
                                gamma_fiber.get(b, c, d) * eta_jet2.d1(c, mu) * eta_jet2.d1(d, nu);
                        }
                    }
                    acc
                })
                .collect();
            for rho in 0..n {
                let s: f64 = (0..n).map(|b| kappa[(rho, b)] * v[b]).sum();
                symbols[(rho, mu, nu)] = s;
                symbols[(rho, nu, mu)] = s;
            }
        }
    }
    Ok(Christoffel { symbols })
}

/// `D^ρ = ∂_μ 𝔗^{μρ} + Γ^ρ_{μν} 𝔗^{μν}` for a weight-1 contravariant density.
pub fn covariant_divergence_density(t: &SemDensity, gamma: &Christoffel<f64>) -> Result<Vec<f64>> {
    if t.form != SemForm::Contravariant {
        return Err(Error::DimensionMismatch(
            "divergence needs the contravariant form".into(),
        ));
    }
    let d1 =
        t.d1.as_ref()
            .ok_or(Error::MissingJet("SEM density derivatives"))?;
    let n = t.data.dim();
    Ok((0..n)
        .map(|rho| {
            let mut acc = 0.0;
            for mu in 0..n {
                acc += d1[(mu, rho, mu)];
                for nu in 0..n {
                    acc += gamma.get(rho, mu, nu) * t.data[(mu, nu)];
                }
            }
            acc
        })
        .collect())
}
