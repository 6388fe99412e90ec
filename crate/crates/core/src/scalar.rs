//! Scalar types that the Lagrangian and geometry code is generic over.
//!
//! Plain `f64` is used for values; [`Dual`] carries one forward-mode tangent
//! and is how every partial derivative with respect to a jet or metric slot is
//! obtained. Truncated multivariate Taylor series ([`crate::jets::Taylor`])
//! implement [`Scalar`] but not [`Real`], because they are not `Copy`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Arithmetic shared by every number type an expression can be evaluated in.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// The real (value) part.
    fn re(&self) -> f64;
    /// A constant living in the same space as `self`.
    fn lift(&self, c: f64) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn try_sqrt(&self) -> Result<Self>;
    fn try_recip(&self) -> Result<Self>;

    fn scale(&self, c: f64) -> Self {
        self.clone() * self.lift(c)
    }

    fn powi(&self, n: i32) -> Result<Self> {
        if n < 0 {
            return self.try_recip()?.powi(-n);
        }
        let mut acc = self.lift(1.0);
        let mut base = self.clone();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        Ok(acc)
    }
}

/// Copyable scalars with an embedding of the reals; the geometry and
/// Lagrangian code is written against this.
pub trait Real:
    Scalar
    + Copy
    + From<f64>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self {
        Self::from(0.0)
    }
    fn one() -> Self {
        Self::from(1.0)
    }
    fn sqrt(self) -> Self;
}

fn check_sqrt(x: f64) -> Result<()> {
    if x < 0.0 {
        Err(Error::DomainError(format!("sqrt of negative value {x:e}")))
    } else {
        Ok(())
    }
}

fn check_recip(x: f64) -> Result<()> {
    if x == 0.0 || !x.is_finite() {
        Err(Error::DomainError(format!("division by {x:e}")))
    } else {
        Ok(())
    }
}

impl Scalar for f64 {
    fn re(&self) -> f64 {
        *self
    }
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn try_sqrt(&self) -> Result<Self> {
        check_sqrt(*self)?;
        Ok(f64::sqrt(*self))
    }
    fn try_recip(&self) -> Result<Self> {
        check_recip(*self)?;
        Ok(1.0 / *self)
    }
}

impl Real for f64 {
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// First-order dual number `v + d·ε` with `ε² = 0`.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub const fn new(v: f64, d: f64) -> Self {
        Self { v, d }
    }

    /// A value seeded with unit tangent.
    pub const fn var(v: f64) -> Self {
        Self { v, d: 1.0 }
    }

    pub const fn constant(v: f64) -> Self {
        Self { v, d: 0.0 }
    }
}

impl fmt::Debug for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}ε", self.v, self.d)
    }
}

impl From<f64> for Dual {
    fn from(v: f64) -> Self {
        Dual::constant(v)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.v + o.v, self.d + o.d)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.v - o.v, self.d - o.d)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.v;
        Dual::new(self.v * inv, (self.d - self.v * o.d * inv) * inv)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.v, -self.d)
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    fn add(self, c: f64) -> Dual {
        Dual::new(self.v + c, self.d)
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    fn sub(self, c: f64) -> Dual {
        Dual::new(self.v - c, self.d)
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, c: f64) -> Dual {
        Dual::new(self.v * c, self.d * c)
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, o: Dual) {
        self.v += o.v;
        self.d += o.d;
    }
}

impl SubAssign for Dual {
    fn sub_assign(&mut self, o: Dual) {
        self.v -= o.v;
        self.d -= o.d;
    }
}

impl MulAssign for Dual {
    fn mul_assign(&mut self, o: Dual) {
        *self = *self * o;
    }
}

impl Scalar for Dual {
    fn re(&self) -> f64 {
        self.v
    }
    fn lift(&self, c: f64) -> Self {
        Dual::constant(c)
    }
    fn sin(&self) -> Self {
        Dual::new(self.v.sin(), self.d * self.v.cos())
    }
    fn cos(&self) -> Self {
        Dual::new(self.v.cos(), -self.d * self.v.sin())
    }
    fn exp(&self) -> Self {
        let e = self.v.exp();
        Dual::new(e, self.d * e)
    }
    fn try_sqrt(&self) -> Result<Self> {
        check_sqrt(self.v)?;
        if self.v == 0.0 && self.d != 0.0 {
            return Err(Error::DomainError("sqrt not differentiable at 0".into()));
        }
        Ok(Real::sqrt(*self))
    }
    fn try_recip(&self) -> Result<Self> {
        check_recip(self.v)?;
        Ok(Dual::constant(1.0) / *self)
    }
}

impl Real for Dual {
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let d = if self.d == 0.0 {
            0.0
        } else {
            self.d / (2.0 * s)
        };
        Dual::new(s, d)
    }
}
