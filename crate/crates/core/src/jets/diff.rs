//! Numerical total derivatives along the base.
//!
//! Everything that is a partial with respect to a jet coordinate is computed
//! exactly elsewhere; the operator `D_μ` is the one place where a controlled
//! `O(h²)` central-difference error enters.

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const DEFAULT_STEP: f64 = 1e-4;
pub const DEFAULT_OUTER_STEP: f64 = 2e-4;

/// Central-difference scheme for `D_μ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdScheme {
    pub h: f64,
    /// Combine steps `h` and `h/2` to cancel the `O(h²)` term.
    pub richardson: bool,
}

impl Default for FdScheme {
    fn default() -> Self {
        Self {
            h: DEFAULT_STEP,
            richardson: false,
        }
    }
}

impl FdScheme {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            richardson: false,
        }
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    pub fn halved(self) -> Self {
        Self {
            h: self.h / 2.0,
            ..self
        }
    }
}

/// Step sizes for single and nested total derivatives. Nested
/// differences use `h_outer` for the outer operator and `h` for the inner one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Steps {
    pub h: f64,
    pub h_outer: f64,
    #[serde(default)]
    pub richardson: bool,
}

impl Default for Steps {
    fn default() -> Self {
        Self {
            h: DEFAULT_STEP,
            h_outer: DEFAULT_OUTER_STEP,
            richardson: false,
        }
    }
}

impl Steps {
    pub fn inner(&self) -> FdScheme {
        FdScheme::new(self.h).with_richardson(self.richardson)
    }

    pub fn outer(&self) -> FdScheme {
        FdScheme::new(self.h_outer).with_richardson(self.richardson)
    }

    pub fn halved(self) -> Self {
        Self {
            h: self.h / 2.0,
            h_outer: self.h_outer / 2.0,
            ..self
        }
    }

    pub fn with_step(self, h: f64) -> Self {
        Self {
            h,
            h_outer: 2.0 * h,
            ..self
        }
    }
}

fn central<F>(q: &F, p: &[f64], mu: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut plus = p.to_vec();
    let mut minus = p.to_vec();
    plus[mu] += h;
    minus[mu] -= h;
    let qp = q(&plus)?;
    let qm = q(&minus)?;
    Ok(qp
        .iter()
        .zip(&qm)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect())
}

/// `D_μ q` at `p`, where `q` re-evaluates all jets exactly at the shifted points.
pub fn total_derivative<F>(q: F, p: &[f64], mu: usize, scheme: FdScheme) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let coarse = central(&q, p, mu, scheme.h)?;
    if !scheme.richardson {
        return Ok(coarse);
    }
    let fine = central(&q, p, mu, scheme.h / 2.0)?;
    Ok(fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Divergence-style sum `Σ_μ D_μ q_μ`, where `q` returns, for each point, a
/// flat array laid out as `[μ][rest]` and the result has length `rest`.
pub fn total_divergence<F>(q: F, p: &[f64], scheme: FdScheme) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = p.len();
    let mut out: Option<Vec<f64>> = None;
    for mu in 0..n {
        let d = total_derivative(&q, p, mu, scheme)?;
        let rest = d.len() / n;
        let slice = &d[mu * rest..(mu + 1) * rest];
        match &mut out {
            None => out = Some(slice.to_vec()),
            Some(acc) => acc.iter_mut().zip(slice).for_each(|(a, b)| *a += b),
        }
    }
    Ok(out.unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_zero_derivative() {
        let d = total_derivative(|_| Ok(vec![3.0]), &[0.2, 0.4], 1, FdScheme::default()).unwrap();
        assert!(d[0].abs() < 1e-12);
    }

    #[test]
    fn coordinate_has_unit_derivative() {
        let d = total_derivative(|x| Ok(vec![x[0]]), &[0.3, 0.1], 0, FdScheme::default()).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn richardson_improves_accuracy() {
        let q = |x: &[f64]| Ok(vec![(3.0 * x[0]).sin()]);
        let exact = 3.0 * (0.9f64).cos();
        let s = FdScheme::new(1e-2);
        let plain = total_derivative(q, &[0.3], 0, s).unwrap()[0];
        let rich = total_derivative(q, &[0.3], 0, s.with_richardson(true)).unwrap()[0];
        assert!((rich - exact).abs() < (plain - exact).abs() * 1e-2);
    }

    #[test]
    fn divergence_of_linear_field() {
        // q_μ = (x0, 2 x1) → div = 3
        let q = |x: &[f64]| Ok(vec![x[0], 2.0 * x[1]]);
        let d = total_divergence(q, &[0.1, 0.2], FdScheme::default()).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0] - 3.0).abs() < 1e-9);
    }
}
