//! Small dense linear algebra over any coefficient field.
//!
//! Matrices here are at most a few dozen rows (Gram systems, modules of
//! dimension `2m+1`), so plain row-major storage and `O(n³)` routines suffice.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use crate::laurent::Coeff;
use crate::scalar::Real;

/// A [`Coeff`] ring that is also a field.
pub trait Field: Coeff + Div<Output = Self> {}

impl<F: Coeff + Div<Output = F>> Field for F {}

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn diagonal(d: &[F]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> F) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: &F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.rows), |acc, _| &acc * self)
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(F::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone())
            })
            .collect()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].magnitude()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_tridiagonal(&self) -> bool {
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| i.abs_diff(j) <= 1 || self[(i, j)].is_zero())
        })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn lu(&self) -> Option<Lu<F>> {
        Lu::factor(self)
    }

    pub fn inverse(&self) -> Option<Self> {
        let lu = self.lu()?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            let mut e = vec![F::zero(); n];
            e[j] = F::one();
            let col = lu.solve(&e);
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Some(inv)
    }

    /// 1-norm condition number; infinite when singular.
    pub fn cond1(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.norm1() * inv.norm1(),
            None => f64::INFINITY,
        }
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[F]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl<F: Field> Mul for &Matrix<F> {
    type Output = Matrix<F>;
    fn mul(self, rhs: Self) -> Matrix<F> {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let mut out = Matrix::<F>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                }
            }
        }
        out
    }
}

impl<F: Field> Add for &Matrix<F> {
    type Output = Matrix<F>;
    fn add(self, rhs: Self) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<F: Field> Sub for &Matrix<F> {
    type Output = Matrix<F>;
    fn sub(self, rhs: Self) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

/// `PA = LU` with partial pivoting (largest magnitude; any nonzero pivot in exact arithmetic).
pub struct Lu<F> {
    lu: Matrix<F>,
    perm: Vec<usize>,
}

impl<F: Field> Lu<F> {
    fn factor(a: &Matrix<F>) -> Option<Self> {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].magnitude().total_cmp(&lu[(j, k)].magnitude()))?;
            if lu[(p, k)].is_zero() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(p * n + j, k * n + j);
                }
                perm.swap(p, k);
            }
            let pivot = lu[(k, k)].clone();
            for i in k + 1..n {
                let f = lu[(i, k)].clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    lu[(i, j)] = lu[(i, j)].clone() - f.clone() * lu[(k, j)].clone();
                }
                lu[(i, k)] = f;
            }
        }
        Some(Lu { lu, perm })
    }

    pub fn solve(&self, b: &[F]) -> Vec<F> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<F> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i].clone() - self.lu[(i, j)].clone() * x[j].clone();
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] = x[i].clone() - self.lu[(i, j)].clone() * x[j].clone();
            }
            x[i] = x[i].clone() / self.lu[(i, i)].clone();
        }
        x
    }
}

/// Solves `Ax = b`; `None` when `A` is exactly singular.
pub fn solve<F: Field>(a: &Matrix<F>, b: &[F]) -> Option<Vec<F>> {
    Some(a.lu()?.solve(b))
}

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Clone, Debug)]
pub struct SymTridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> SymTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        SymTridiagonal { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence / LDLᵀ inertia).
    pub fn count_below(&self, x: &T) -> usize {
        let tiny = T::from_f64(f64::MIN_POSITIVE.sqrt());
        let mut count = 0;
        let mut d = T::one();
        for i in 0..self.dim() {
            let off2 = if i == 0 { T::zero() } else { self.off[i - 1].clone() * self.off[i - 1].clone() };
            d = if i == 0 {
                self.diag[0].clone() - x.clone()
            } else {
                self.diag[i].clone() - x.clone() - off2 / d
            };
            if d.is_zero() {
                d = -tiny.clone();
            }
            if d < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn bounds(&self) -> (T, T) {
        let n = self.dim();
        let mut lo = self.diag[0].clone();
        let mut hi = self.diag[0].clone();
        for i in 0..n {
            let mut r = T::zero();
            if i > 0 {
                r = r + self.off[i - 1].abs();
            }
            if i + 1 < n {
                r = r + self.off[i].abs();
            }
            let a = self.diag[i].clone() - r.clone();
            let b = self.diag[i].clone() + r;
            if a < lo {
                lo = a;
            }
            if b > hi {
                hi = b;
            }
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to relative width `rel_tol`.
    pub fn eigenvalue(&self, k: usize, rel_tol: f64) -> T {
        let (mut lo, mut hi) = self.bounds();
        let half = T::from_f64(0.5);
        let width0 = (hi.clone() - lo.clone()).to_f64().abs().max(f64::MIN_POSITIVE);
        for _ in 0..2000 {
            let mid = (lo.clone() + hi.clone()) * half.clone();
            if self.count_below(&mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            let w = (hi.clone() - lo.clone()).to_f64();
            let scale = lo.to_f64().abs().max(hi.to_f64().abs()).max(width0 * 1e-300);
            if w <= rel_tol * scale {
                break;
            }
        }
        (lo + hi) * half
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self, rel_tol: f64) -> Vec<T> {
        (0..self.dim()).map(|k| self.eigenvalue(k, rel_tol)).collect()
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i].clone()
            } else if i == j + 1 {
                self.off[j].clone()
            } else if j == i + 1 {
                self.off[i].clone()
            } else {
                T::zero()
            }
        })
    }

    /// Unit eigenvector for an eigenvalue approximation `lambda` by inverse iteration.
    pub fn eigenvector(&self, lambda: &T, iterations: usize) -> Vec<T> {
        let n = self.dim();
        let a = self.to_dense();
        // perturb the shift so the shifted matrix stays invertible
        let scale = lambda.abs().to_f64().max(self.bounds().1.abs().to_f64()).max(1.0);
        let nudge = T::from_f64(scale * T::epsilon().max(1e-300) * 16.0);
        let shifted = &a - &Matrix::identity(n).scale(&(lambda.clone() + nudge));
        let Some(lu) = shifted.lu() else {
            // exact eigenvalue hit; fall back to a direct null-space vector
            return null_vector(&shifted);
        };
        let mut v: Vec<T> = (0..n).map(|i| T::one() + T::from_f64(i as f64 * 0.01)).collect();
        for _ in 0..iterations.max(1) {
            v = lu.solve(&v);
            normalize(&mut v);
        }
        v
    }
}

fn normalize<T: Real>(v: &mut [T]) {
    let norm = v.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone()).sqrt();
    if !norm.is_zero() {
        for x in v.iter_mut() {
            *x = x.clone() / norm.clone();
        }
    }
}

/// Null vector of a singular tridiagonal-like matrix by forward recurrence.
fn null_vector<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let n = a.rows();
    let mut v = vec![T::zero(); n];
    v[0] = T::one();
    for i in 0..n - 1 {
        // row i: a[i,i-1] v[i-1] + a[i,i] v[i] + a[i,i+1] v[i+1] = 0
        let mut s = a[(i, i)].clone() * v[i].clone();
        if i > 0 {
            s = s + a[(i, i - 1)].clone() * v[i - 1].clone();
        }
        v[i + 1] = if a[(i, i + 1)].is_zero() { T::zero() } else { -s / a[(i, i + 1)].clone() };
    }
    normalize(&mut v);
    v
}

/// Pairwise (cascade) summation in fixed order, so results do not depend on threading.
pub fn pairwise_sum<F: Coeff>(xs: &[F]) -> F {
    match xs.len() {
        0 => F::zero(),
        1 => xs[0].clone(),
        n if n <= 8 => xs.iter().skip(1).fold(xs[0].clone(), |acc, x| acc + x.clone()),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
