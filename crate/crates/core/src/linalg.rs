//! Small dense square matrices and rank-3 arrays over a generic scalar.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative pivot threshold below which a matrix is treated as singular.
pub const SINGULAR_PIVOT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Copy> Mat<S> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn map<T: Copy>(&self, f: impl Fn(S) -> T) -> Mat<T> {
        Mat {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }
}

impl<S: Real> Mat<S> {
    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn diag(d: &[f64]) -> Self {
        Self::from_fn(
            d.len(),
            |i, j| if i == j { S::from(d[i]) } else { S::zero() },
        )
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let mut acc = S::zero();
            for k in 0..n {
                acc += self[(i, k)] * o[(k, j)];
            }
            acc
        })
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|i| {
                let mut acc = S::zero();
                for k in 0..self.n {
                    acc += self[(i, k)] * v[k];
                }
                acc
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.re().abs()))
    }

    /// Gauss elimination with partial pivoting; returns the inverse and the determinant.
    pub fn inverse_and_det(&self) -> Result<(Self, S)> {
        let n = self.n;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let mut det = S::one();
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r, &s| a[(r, col)].re().abs().total_cmp(&a[(s, col)].re().abs()))
                .expect("non-empty range");
            let p = a[(pivot_row, col)];
            if p.re().abs() < SINGULAR_PIVOT * scale {
                return Err(Error::SingularMetric { pivot: p.re() });
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
                det = -det;
            }
            det *= p;
            let pinv = S::one() / p;
            for j in 0..n {
                a[(col, j)] *= pinv;
                inv[(col, j)] *= pinv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                for j in 0..n {
                    let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok((inv, det))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_and_det().map(|(inv, _)| inv)
    }

    pub fn det(&self) -> S {
        match self.inverse_and_det() {
            Ok((_, d)) => d,
            Err(_) => S::zero(),
        }
    }

    fn swap_rows(&mut self, r: usize, s: usize) {
        for j in 0..self.n {
            self.data.swap(r * self.n + j, s * self.n + j);
        }
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}

/// Rank-3 array `t[(i, j, k)]` with all index ranges equal.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Copy> Tensor3<S> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn map<T: Copy>(&self, f: impl Fn(S) -> T) -> Tensor3<T> {
        Tensor3 {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }
}

impl<S: Real> Tensor3<S> {
    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _, _| S::zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.re().abs()))
    }
}

impl<S> Index<(usize, usize, usize)> for Tensor3<S> {
    type Output = S;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &S {
        &self.data[(i * self.n + j) * self.n + k]
    }
}

impl<S> IndexMut<(usize, usize, usize)> for Tensor3<S> {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut S {
        &mut self.data[(i * self.n + j) * self.n + k]
    }
}

/// Solve `a x = b` for real `a` by Gauss elimination.
pub fn solve(a: &Mat<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let inv = a.inverse().map_err(|_| Error::SingularJacobian)?;
    Ok(inv.matvec(b))
}

/// Number of negative eigenvalues of a real symmetric matrix, or an error if
/// any eigenvalue is (relatively) zero.
pub fn negative_inertia(m: &Mat<f64>) -> Result<usize> {
    let n = m.dim();
    let sym = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = nalgebra::SymmetricEigen::new(sym).eigenvalues;
    let scale = eig
        .iter()
        .fold(0.0f64, |s, e| s.max(e.abs()))
        .max(f64::MIN_POSITIVE);
    if eig.iter().any(|e| e.abs() < SINGULAR_PIVOT * scale) {
        return Err(Error::WrongSignature("degenerate metric".into()));
    }
    Ok(eig.iter().filter(|e| **e < 0.0).count())
}
