//! On-shell solution constructors and random analytic fields.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::jets::{Expr, Field, FieldMap, InverseMap, TensorRank, Transported};
use crate::parametrize::{CovarianceField, FiberMetric};

/// Tolerance for the nullity and dispersion constraints.
pub const CONSTRAINT_TOL: f64 = 1e-12;

fn flat_dot(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
}

fn wave(k: &[f64], coeff: f64) -> Expr {
    if coeff == 0.0 {
        Expr::c(0.0)
    } else {
        Expr::c(coeff) * Expr::linear(k).cos()
    }
}

/// `A_μ = amplitude · ε_μ cos(k·x)` with `k` null and `ε` transverse
/// with respect to the flat metric.
pub fn em_plane_wave(k: &[f64], eps: &[f64], amplitude: f64) -> Result<FieldMap> {
    let n = k.len();
    if eps.len() != n || n < 2 {
        return Err(Error::DimensionMismatch(
            "wave vector and polarization lengths differ".into(),
        ));
    }
    let kk = flat_dot(k, k);
    if kk.abs() > CONSTRAINT_TOL {
        return Err(Error::BadDispersion(format!("k·k = {kk:e}, expected null")));
    }
    let ek = flat_dot(eps, k);
    if ek.abs() > CONSTRAINT_TOL {
        return Err(Error::BadDispersion(format!("ε·k = {ek:e}, expected 0")));
    }
    FieldMap::new(eps.iter().map(|&e| wave(k, amplitude * e)).collect(), n)
}

/// `φ^σ = amplitude · ε^σ cos(k·x)` solving the flat vector Klein–Gordon
/// equation, which for this Lagrangian requires `k·k = +m²`.
pub fn kg_plane_wave(k: &[f64], eps: &[f64], amplitude: f64, mass: f64) -> Result<FieldMap> {
    let n = k.len();
    if eps.len() != n || n < 2 {
        return Err(Error::DimensionMismatch(
            "wave vector and polarization lengths differ".into(),
        ));
    }
    let kk = flat_dot(k, k);
    if (kk - mass * mass).abs() > CONSTRAINT_TOL {
        return Err(Error::BadDispersion(format!(
            "k·k = {kk:e}, expected m² = {:e}",
            mass * mass
        )));
    }
    FieldMap::new(eps.iter().map(|&e| wave(k, amplitude * e)).collect(), n)
}

/// Transport a solution on the flat fiber back to spacetime through `η`,
/// the tensor action of `κ = η⁻¹`.
pub fn pull_back_solution(
    flat_solution: Arc<dyn Field>,
    eta: &CovarianceField,
    rank: TensorRank,
) -> Arc<dyn Field> {
    Arc::new(Transported {
        field: flat_solution,
        rank,
        inverse: InverseMap::Explicit(eta.eta().clone()),
    })
}

fn uniform(rng: &mut impl Rng, bound: f64) -> f64 {
    rng.random_range(-bound..=bound)
}

/// `c · sin(a·x + b)` with `|c| ≤ amp`, `|a_i| ≤ freq`.
fn random_trig(rng: &mut impl Rng, n: usize, amp: f64, freq: f64) -> Expr {
    let a: Vec<f64> = (0..n).map(|_| uniform(rng, freq)).collect();
    let b = uniform(rng, std::f64::consts::PI);
    Expr::c(uniform(rng, amp)) * (Expr::linear(&a) + Expr::c(b)).sin()
}

/// `c · x^i x^j` with `|c| ≤ amp`.
fn random_quadratic(rng: &mut impl Rng, n: usize, amp: f64) -> Expr {
    let i = rng.random_range(0..n);
    let j = rng.random_range(0..n);
    Expr::c(uniform(rng, amp)) * Expr::x(i) * Expr::x(j)
}

/// Map `x ↦ x + ε v(x)` with `v` a sum of one trig and one quadratic term
/// per component. With `ε ≤ 0.1` on `[−1, 1]^n` the Jacobian stays strictly
/// diagonally dominant, so the map is an oriented diffeomorphism there.
pub fn random_near_identity(rng: &mut impl Rng, n: usize, eps: f64) -> FieldMap {
    let amp = 0.3;
    let comps = (0..n)
        .map(|mu| {
            let v = random_trig(rng, n, amp, 1.0) + random_quadratic(rng, n, amp);
            Expr::x(mu) + Expr::c(eps) * v
        })
        .collect();
    FieldMap::new(comps, n).expect("components only use x0..x(n-1)")
}

/// Minkowski plus a symmetric analytic perturbation of size `delta`.
pub fn random_fiber_metric(rng: &mut impl Rng, n: usize, delta: f64) -> FiberMetric {
    let mut rows = vec![vec![Expr::c(0.0); n]; n];
    for a in 0..n {
        for b in a..n {
            let base = match (a == b, a) {
                (true, 0) => -1.0,
                (true, _) => 1.0,
                _ => 0.0,
            };
            let h = if rng.random_bool(0.5) {
                random_trig(rng, n, 1.0, 1.0)
            } else {
                Expr::c(uniform(rng, 1.0)) * Expr::x(rng.random_range(0..n))
            };
            let e = Expr::c(base) + Expr::c(delta) * h;
            rows[a][b] = e.clone();
            rows[b][a] = e;
        }
    }
    FiberMetric::new(rows).expect("square symmetric matrix")
}

/// Generic off-shell matter field with O(1) values and derivatives.
pub fn random_matter(rng: &mut impl Rng, n: usize) -> FieldMap {
    let comps = (0..n)
        .map(|_| {
            Expr::c(uniform(rng, 1.0))
                + random_trig(rng, n, 1.0, 1.5)
                + random_trig(rng, n, 0.5, 1.0)
                + random_quadratic(rng, n, 0.5)
        })
        .collect();
    FieldMap::new(comps, n).expect("components only use x0..x(n-1)")
}

/// Uniform point in `[lo, hi]^n`.
pub fn random_point(rng: &mut impl Rng, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    lo.iter()
        .zip(hi)
        .map(|(&l, &h)| if h > l { rng.random_range(l..h) } else { l })
        .collect()
}

/// Random null wave vector and transverse polarization in the flat metric.
pub fn random_null_wave(rng: &mut impl Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    // spatial direction d, k = ω(1, d); ε spatial and orthogonal to d
    let mut d: Vec<f64> = (0..n - 1).map(|_| uniform(rng, 1.0)).collect();
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
    d.iter_mut().for_each(|v| *v /= norm);
    let omega = rng.random_range(0.5..1.5);
    let mut k = vec![omega];
    k.extend(d.iter().map(|v| omega * v));
    let mut e: Vec<f64> = (0..n - 1).map(|_| uniform(rng, 1.0)).collect();
    if n == 2 {
        // only the pure-gauge polarization is transverse in 1+1 dimensions
        let mut eps = vec![1.0];
        eps.extend(d.iter().copied());
        let eps: Vec<f64> = eps.iter().map(|v| v * omega).collect();
        return (k, eps);
    }
    let proj: f64 = e.iter().zip(&d).map(|(a, b)| a * b).sum();
    e.iter_mut().zip(&d).for_each(|(a, b)| *a -= proj * b);
    let mut eps = vec![0.0];
    eps.extend(e);
    (k, eps)
}
