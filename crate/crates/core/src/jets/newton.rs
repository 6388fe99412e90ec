//! Inversion of diffeomorphisms: pointwise by damped Newton, and as jets by
//! series reversion.

use super::field::Field;
use super::taylor::{layout, Taylor};
use crate::error::{Error, Result};
use crate::linalg::{solve, Mat};

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;

fn residual(f: &dyn Field, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let fx = f.value(x)?;
    let r: Vec<f64> = fx.iter().zip(y).map(|(a, b)| a - b).collect();
    let norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((r, norm))
}

/// Solve `f(x) = y` starting from `guess`, to `‖f(x) − y‖∞ < 1e-12`.
pub fn newton_invert(f: &dyn Field, y: &[f64], guess: &[f64]) -> Result<Vec<f64>> {
    let mut x = guess.to_vec();
    let (mut r, mut norm) = residual(f, &x, y)?;
    for _ in 0..NEWTON_MAX_ITER {
        if norm < NEWTON_TOL {
            return Ok(x);
        }
        let jac = f.jet(&x, 1)?.jacobian()?;
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let dx = solve(&jac, &neg)?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + t * d).collect();
            match residual(f, &trial, y) {
                Ok((rt, nt)) if nt < norm => {
                    x = trial;
                    r = rt;
                    norm = nt;
                    break;
                }
                Ok(_) | Err(Error::DomainError(_)) if t >= 1e-6 => t *= 0.5,
                // stagnated: take the step anyway and let the iteration cap decide
                Ok((rt, nt)) => {
                    x = trial;
                    r = rt;
                    norm = nt;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }
    if norm < NEWTON_TOL {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            iterations: NEWTON_MAX_ITER,
            residual: norm,
        })
    }
}

/// Given the Taylor expansion `forward` of a map `F` around `y`, return the
/// expansion of `F⁻¹` around `x = F(y)` to the same order.
///
/// Uses chord iterations `S ← S − J⁻¹(F∘S − id)` on truncated series; each
/// pass fixes one more order. The constant term of `S` is pinned to `y`.
pub fn invert_series(forward: &[Taylor], y: &[f64], order: usize) -> Result<Vec<Taylor>> {
    let n = y.len();
    if forward.len() != n || forward[0].order() < order.max(1) {
        return Err(Error::MissingJet(
            "series reversion needs a square map jet of sufficient order",
        ));
    }
    let jac = Mat::from_fn(n, |a, mu| forward[a].partial(&[mu]));
    let jinv = jac.inverse().map_err(|_| Error::SingularJacobian)?;
    let l = layout(n, order);
    let offsets: Vec<Taylor> = (0..n).map(|i| Taylor::variable(&l, i, 0.0)).collect();
    let mut s: Vec<Taylor> = (0..n)
        .map(|i| {
            let mut t = Taylor::constant(&l, y[i]);
            if order >= 1 {
                for j in 0..n {
                    t = t.add_ref(&offsets[j].scaled(jinv[(i, j)]));
                }
            }
            t
        })
        .collect();
    for _ in 1..order {
        let composed: Vec<Taylor> = forward.iter().map(|f| f.compose(y, &s)).collect();
        let resid: Vec<Taylor> = (0..n)
            .map(|i| {
                let mut r = composed[i].sub_ref(&offsets[i]);
                r.set_value(0.0);
                r
            })
            .collect();
        for i in 0..n {
            let mut corr = Taylor::constant(&l, 0.0);
            for j in 0..n {
                corr = corr.add_ref(&resid[j].scaled(jinv[(i, j)]));
            }
            s[i] = s[i].sub_ref(&corr);
        }
    }
    Ok(s)
}

/// Gauss–Jordan inverse of a matrix of series, pivoting on constant terms.
pub fn invert_series_matrix(m: &[Vec<Taylor>]) -> Result<Vec<Vec<Taylor>>> {
    let n = m.len();
    let l = m[0][0].layout().clone();
    let mut a: Vec<Vec<Taylor>> = m.to_vec();
    let mut inv: Vec<Vec<Taylor>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Taylor::constant(&l, if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&r, &s| a[r][col].value().abs().total_cmp(&a[s][col].value().abs()))
            .expect("non-empty");
        if a[p][col].value().abs() < 1e-14 {
            return Err(Error::SingularJacobian);
        }
        a.swap(p, col);
        inv.swap(p, col);
        let pinv = crate::scalar::Scalar::try_recip(&a[col][col])?;
        for j in 0..n {
            a[col][j] = a[col][j].mul_ref(&pinv);
            inv[col][j] = inv[col][j].mul_ref(&pinv);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let da = f.mul_ref(&a[col][j]);
                let di = f.mul_ref(&inv[col][j]);
                a[r][j] = a[r][j].sub_ref(&da);
                inv[r][j] = inv[r][j].sub_ref(&di);
            }
        }
    }
    Ok(inv)
}
