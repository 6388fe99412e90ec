//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Taylor`] holds the Taylor coefficients `c_α = ∂^α f / α!` of a function
//! of `nvars` variables around some base point, for all multi-indices with
//! `|α| ≤ order`. Arithmetic on these objects is exact polynomial arithmetic
//! modulo terms of degree `order + 1`, so every partial derivative read back
//! from the result is free of truncation error. Each mixed partial is stored
//! once, which makes symmetry of mixed partials exact.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Monomial bookkeeping shared by every series with the same `(nvars, order)`.
pub struct Layout {
    nvars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    degrees: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `α_i + α_j = α_k`, restricted to `|α_k| ≤ order`.
    products: Vec<(u16, u16, u16)>,
    /// `α!` per monomial.
    factorials: Vec<f64>,
}

impl fmt::Debug for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Layout(nvars={}, order={})", self.nvars, self.order)
    }
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Self {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        for deg in 0..=order {
            let mut cur = vec![0u8; nvars];
            push_degree(&mut exponents, &mut cur, 0, deg);
        }
        let degrees: Vec<usize> = exponents
            .iter()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .collect();
        let index: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let mut products = Vec::new();
        for (i, ei) in exponents.iter().enumerate() {
            for (j, ej) in exponents.iter().enumerate() {
                if degrees[i] + degrees[j] > order {
                    continue;
                }
                let sum: Vec<u8> = ei.iter().zip(ej).map(|(a, b)| a + b).collect();
                products.push((i as u16, j as u16, index[&sum] as u16));
            }
        }
        let factorials = exponents
            .iter()
            .map(|e| e.iter().map(|&k| factorial(k as usize)).product())
            .collect();
        Self {
            nvars,
            order,
            exponents,
            degrees,
            index,
            products,
            factorials,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exponents
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

// Enumerates exponent vectors of total degree `remaining` in lexicographically
// decreasing order of the leading variables, so that x0 precedes x1 in degree 1.
fn push_degree(out: &mut Vec<Vec<u8>>, cur: &mut [u8], pos: usize, remaining: usize) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining as u8;
        out.push(cur.to_vec());
        cur[pos] = 0;
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=remaining).rev() {
        cur[pos] = k as u8;
        push_degree(out, cur, pos + 1, remaining - k);
    }
    cur[pos] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, b| a * b as f64)
}

/// Shared layout for `(nvars, order)`.
pub fn layout(nvars: usize, order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("layout cache poisoned");
    guard
        .entry((nvars, order))
        .or_insert_with(|| Arc::new(Layout::build(nvars, order)))
        .clone()
}

/// Multi-index (as exponent vector) of a list of variable indices.
pub fn multi_index(nvars: usize, vars: &[usize]) -> Vec<u8> {
    let mut alpha = vec![0u8; nvars];
    for &v in vars {
        alpha[v] += 1;
    }
    alpha
}

#[derive(Clone)]
pub struct Taylor {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Taylor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Taylor{:?}", self.coeffs)
    }
}

impl Taylor {
    pub fn constant(layout: &Arc<Layout>, v: f64) -> Self {
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = v;
        Self {
            layout: layout.clone(),
            coeffs,
        }
    }

    /// The coordinate function `x_var` expanded around `x_var = v`.
    pub fn variable(layout: &Arc<Layout>, var: usize, v: f64) -> Self {
        let mut t = Self::constant(layout, v);
        if layout.order >= 1 {
            t.coeffs[1 + var] = 1.0;
        }
        t
    }

    pub fn from_coeffs(layout: &Arc<Layout>, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), layout.len());
        Self {
            layout: layout.clone(),
            coeffs,
        }
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Partial derivative `∂^k f / ∂x_{vars[0]} … ∂x_{vars[k-1]}` at the base point.
    pub fn partial(&self, vars: &[usize]) -> f64 {
        let alpha = multi_index(self.nvars(), vars);
        match self.layout.index_of(&alpha) {
            Some(i) => self.coeffs[i] * self.layout.factorials[i],
            None => panic!(
                "partial of order {} exceeds jet order {}",
                vars.len(),
                self.order()
            ),
        }
    }

    /// Overwrite the partial derivative for the given multi-index.
    pub fn set_partial(&mut self, vars: &[usize], value: f64) {
        let alpha = multi_index(self.nvars(), vars);
        let i = self
            .layout
            .index_of(&alpha)
            .expect("partial exceeds jet order");
        self.coeffs[i] = value / self.layout.factorials[i];
    }

    pub fn set_value(&mut self, v: f64) {
        self.coeffs[0] = v;
    }

    fn same_layout(&self, o: &Taylor) {
        debug_assert!(
            Arc::ptr_eq(&self.layout, &o.layout)
                || (self.layout.nvars == o.layout.nvars && self.layout.order == o.layout.order),
            "mixing Taylor layouts {:?} and {:?}",
            self.layout,
            o.layout
        );
    }

    fn zip(&self, o: &Taylor, f: impl Fn(f64, f64) -> f64) -> Taylor {
        self.same_layout(o);
        Taylor {
            layout: self.layout.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn mul_ref(&self, o: &Taylor) -> Taylor {
        self.same_layout(o);
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for &(i, j, k) in &self.layout.products {
            coeffs[k as usize] += self.coeffs[i as usize] * o.coeffs[j as usize];
        }
        Taylor {
            layout: self.layout.clone(),
            coeffs,
        }
    }

    pub fn add_ref(&self, o: &Taylor) -> Taylor {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub_ref(&self, o: &Taylor) -> Taylor {
        self.zip(o, |a, b| a - b)
    }

    pub fn scaled(&self, c: f64) -> Taylor {
        Taylor {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `Σ_k taylor_coeffs[k] · (self − self(0))^k`, i.e. `f(self)` for a
    /// univariate `f` given by its Taylor coefficients at the base value.
    fn compose_univariate(&self, taylor_coeffs: &[f64]) -> Taylor {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut out = Taylor::constant(&self.layout, taylor_coeffs[0]);
        let mut power = h.clone();
        for (k, &ck) in taylor_coeffs.iter().enumerate().skip(1) {
            if ck != 0.0 {
                for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                    *o += ck * p;
                }
            }
            if k < self.order() {
                power = power.mul_ref(&h);
            }
        }
        out
    }

    fn has_higher_terms(&self) -> bool {
        self.coeffs[1..].iter().any(|c| *c != 0.0)
    }

    /// Derivative with respect to variable `var`; the result has order one less.
    pub fn derivative(&self, var: usize) -> Taylor {
        assert!(self.order() >= 1, "cannot differentiate an order-0 series");
        let target = layout(self.nvars(), self.order() - 1);
        let mut coeffs = vec![0.0; target.len()];
        for (i, alpha) in target.exponents.iter().enumerate() {
            let mut up = alpha.clone();
            up[var] += 1;
            let j = self
                .layout
                .index_of(&up)
                .expect("raised index within order");
            coeffs[i] = self.coeffs[j] * up[var] as f64;
        }
        Taylor {
            layout: target,
            coeffs,
        }
    }

    /// Drop all terms above `order`.
    pub fn truncate(&self, order: usize) -> Taylor {
        assert!(order <= self.order());
        if order == self.order() {
            return self.clone();
        }
        let target = layout(self.nvars(), order);
        let coeffs = self.coeffs[..target.len()].to_vec();
        Taylor {
            layout: target,
            coeffs,
        }
    }

    /// Evaluate the polynomial represented by `self` (expanded around `base`)
    /// at the series `args[i]`, i.e. the composition `self ∘ args`.
    ///
    /// `args` must share one layout; the result lives in that layout. The
    /// composition is exact to the order of `args` when `self.order()` is at
    /// least that order.
    pub fn compose(&self, base: &[f64], args: &[Taylor]) -> Taylor {
        assert_eq!(args.len(), self.nvars());
        let target = args[0].layout.clone();
        let k = target.order.min(self.order());
        let deltas: Vec<Taylor> = args
            .iter()
            .zip(base)
            .map(|(a, b)| {
                let mut d = a.clone();
                d.coeffs[0] -= b;
                d
            })
            .collect();
        // powers[i][p] = deltas[i]^p
        let powers: Vec<Vec<Taylor>> = deltas
            .iter()
            .map(|d| {
                let mut v = vec![Taylor::constant(&target, 1.0)];
                for p in 1..=k {
                    let next = v[p - 1].mul_ref(d);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Taylor::constant(&target, 0.0);
        for (m, alpha) in self.layout.exponents.iter().enumerate() {
            let c = self.coeffs[m];
            if c == 0.0 || self.layout.degrees[m] > k {
                continue;
            }
            let mut term = Taylor::constant(&target, c);
            for (i, &e) in alpha.iter().enumerate() {
                if e > 0 {
                    term = term.mul_ref(&powers[i][e as usize]);
                }
            }
            for (o, t) in out.coeffs.iter_mut().zip(&term.coeffs) {
                *o += t;
            }
        }
        out
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, o: Taylor) -> Taylor {
        self.add_ref(&o)
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, o: Taylor) -> Taylor {
        self.sub_ref(&o)
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, o: Taylor) -> Taylor {
        self.mul_ref(&o)
    }
}

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, o: Taylor) -> Taylor {
        // Callers that need domain checking go through `try_recip`.
        self.mul_ref(
            &o.try_recip()
                .expect("division by a series with zero constant term"),
        )
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scaled(-1.0)
    }
}

impl Scalar for Taylor {
    fn re(&self) -> f64 {
        self.coeffs[0]
    }

    fn lift(&self, c: f64) -> Self {
        Taylor::constant(&self.layout, c)
    }

    fn sin(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sin(), a.cos());
        let cycle = [s, c, -s, -c];
        let coeffs: Vec<f64> = (0..=self.order())
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose_univariate(&coeffs)
    }

    fn cos(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sin(), a.cos());
        let cycle = [c, -s, -c, s];
        let coeffs: Vec<f64> = (0..=self.order())
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose_univariate(&coeffs)
    }

    fn exp(&self) -> Self {
        let e = self.value().exp();
        let coeffs: Vec<f64> = (0..=self.order()).map(|k| e / factorial(k)).collect();
        self.compose_univariate(&coeffs)
    }

    fn try_sqrt(&self) -> Result<Self> {
        let a = self.value();
        if a < 0.0 || (a == 0.0 && self.has_higher_terms()) {
            return Err(Error::DomainError(format!(
                "sqrt of series with base value {a:e}"
            )));
        }
        // binom(1/2, k) a^{1/2 - k}
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        let mut binom = 1.0;
        for k in 0..=self.order() {
            if k > 0 {
                binom *= (0.5 - (k as f64 - 1.0)) / k as f64;
            }
            coeffs.push(binom * a.powf(0.5 - k as f64));
        }
        if a == 0.0 {
            coeffs.truncate(1);
        }
        Ok(self.compose_univariate(&coeffs))
    }

    fn try_recip(&self) -> Result<Self> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(Error::DomainError(format!(
                "reciprocal of series with base value {a:e}"
            )));
        }
        let coeffs: Vec<f64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * a.powi(-(k as i32) - 1))
            .collect();
        Ok(self.compose_univariate(&coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_counts_monomials() {
        assert_eq!(layout(4, 4).len(), 70);
        assert_eq!(layout(2, 2).len(), 6);
        assert_eq!(layout(3, 0).len(), 1);
        let l = layout(3, 1);
        assert_eq!(l.exponents()[1], vec![1, 0, 0]);
        assert_eq!(l.exponents()[3], vec![0, 0, 1]);
    }

    #[test]
    fn product_of_coordinates() {
        let l = layout(2, 2);
        let x = Taylor::variable(&l, 0, 2.0);
        let y = Taylor::variable(&l, 1, 3.0);
        let p = x * y;
        assert_eq!(p.value(), 6.0);
        assert_eq!(p.partial(&[0]), 3.0);
        assert_eq!(p.partial(&[1]), 2.0);
        assert_eq!(p.partial(&[0, 1]), 1.0);
        assert_eq!(p.partial(&[0, 0]), 0.0);
    }

    #[test]
    fn sin_at_zero() {
        let l = layout(1, 4);
        let s = Taylor::variable(&l, 0, 0.0).sin();
        assert_eq!(s.value(), 0.0);
        assert_eq!(s.partial(&[0]), 1.0);
        assert_eq!(s.partial(&[0, 0]), 0.0);
        assert!((s.partial(&[0, 0, 0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_and_sqrt_derivatives() {
        let l = layout(1, 3);
        let x = Taylor::variable(&l, 0, 2.0);
        let r = x.try_recip().unwrap();
        // d^3/dx^3 1/x = -6/x^4
        assert!((r.partial(&[0, 0, 0]) + 6.0 / 16.0).abs() < 1e-14);
        let s = x.try_sqrt().unwrap();
        // d^2/dx^2 sqrt(x) = -1/4 x^{-3/2}
        assert!((s.partial(&[0, 0]) + 0.25 * 2f64.powf(-1.5)).abs() < 1e-14);
        assert!(Taylor::variable(&l, 0, 0.0).try_sqrt().is_err());
    }

    #[test]
    fn derivative_and_truncate() {
        let l = layout(2, 3);
        let x = Taylor::variable(&l, 0, 1.0);
        let y = Taylor::variable(&l, 1, 2.0);
        let f = x.clone() * x * y; // x^2 y
        let fx = f.derivative(0); // 2xy
        assert_eq!(fx.order(), 2);
        assert_eq!(fx.value(), 4.0);
        assert_eq!(fx.partial(&[1]), 2.0);
        assert_eq!(fx.partial(&[0, 1]), 2.0);
        let t = f.truncate(1);
        assert_eq!(t.partial(&[0]), 4.0);
    }

    #[test]
    fn composition_with_linear_map() {
        // f(u) = u^2 around u = 1, composed with u(x) = 1 + 2x around x = 0.
        let lu = layout(1, 2);
        let u = Taylor::variable(&lu, 0, 1.0);
        let f = u.clone() * u;
        let lx = layout(1, 2);
        let arg = Taylor::variable(&lx, 0, 0.0).scaled(2.0) + Taylor::constant(&lx, 1.0);
        let g = f.compose(&[1.0], &[arg]);
        // (1 + 2x)^2 = 1 + 4x + 4x^2
        assert_eq!(g.value(), 1.0);
        assert_eq!(g.partial(&[0]), 4.0);
        assert_eq!(g.partial(&[0, 0]), 8.0);
    }
}
