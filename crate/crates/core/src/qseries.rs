//! q-shifted factorials, symmetric q-numbers and the `ϑ_l` family.

use std::ops::Mul;

use crate::error::{Error, Result};
use crate::laurent::Coeff;
use crate::scalar::Scalar;

/// Deformation parameter with `0 < q < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QBase<T>(T);

impl<T: Scalar> QBase<T> {
    pub fn new(q: T) -> Result<Self> {
        if q > T::zero() && q < T::one() {
            Ok(QBase(q))
        } else {
            Err(Error::InvalidArgument(format!("q must lie in (0, 1), got {q:?}")))
        }
    }

    pub fn value(&self) -> &T {
        &self.0
    }

    /// `q^e` for integer `e`.
    pub fn powi(&self, e: i64) -> T {
        self.0.powi(e)
    }

    /// `q^e` for real `e`; fails in exact mode unless `e` is an integer.
    pub fn pow(&self, e: &T) -> Result<T> {
        self.0
            .pow_scalar(e)
            .ok_or_else(|| Error::NotRepresentable(format!("q^{e:?}")))
    }

    /// The base `q²` used on the polynomial side of the spherical correspondence.
    pub fn squared(&self) -> Self {
        QBase(self.0.clone() * self.0.clone())
    }
}

/// When to stop multiplying factors of an infinite product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub epsilon: f64,
    pub max_terms: usize,
}

impl TruncationPolicy {
    pub fn new(epsilon: f64, max_terms: usize) -> Result<Self> {
        if !(epsilon > 0.0) || max_terms == 0 {
            return Err(Error::InvalidArgument(format!(
                "truncation policy needs epsilon > 0 and max_terms ≥ 1 (got {epsilon}, {max_terms})"
            )));
        }
        Ok(TruncationPolicy { epsilon, max_terms })
    }

    /// Tail tolerance matched to the unit roundoff of `T`.
    pub fn for_scalar<T: Scalar>() -> Self {
        let eps = T::epsilon();
        if eps == 0.0 || eps >= f64::EPSILON {
            Self::default()
        } else {
            TruncationPolicy { epsilon: eps / 4.0, max_terms: 100_000 }
        }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { epsilon: 1e-17, max_terms: 10_000 }
    }
}

/// `(x;q)_k = Π_{i<k} (1 - x q^i)`.
pub fn qpoch_finite<T, X>(x: &X, q: &QBase<T>, k: usize) -> X
where
    T: Scalar,
    X: Coeff + Mul<T, Output = X>,
{
    let mut acc = X::one();
    let mut xi = x.clone();
    for _ in 0..k {
        acc = acc * (X::one() - xi.clone());
        xi = xi * q.value().clone();
    }
    acc
}

/// Truncated `(x;q)_∞` with relative tail error at most `policy.epsilon`.
///
/// Stops at the first `K` with `|x|q^K ≤ 1/2` and `2|x|q^K/(1-q) ≤ ε`, which
/// bounds `|log Π_{i≥K}(1 - x q^i)|` by `ε`.
pub fn qpoch_infinite<T, X>(x: &X, q: &QBase<T>, policy: &TruncationPolicy) -> Result<X>
where
    T: Scalar,
    X: Coeff + Mul<T, Output = X>,
{
    let qf = q.value().to_f64();
    let mut tail = x.magnitude();
    let mut acc = X::one();
    let mut xi = x.clone();
    for _ in 0..=policy.max_terms {
        if tail <= 0.5 && 2.0 * tail / (1.0 - qf) <= policy.epsilon {
            return Ok(acc);
        }
        acc = acc * (X::one() - xi.clone());
        xi = xi * q.value().clone();
        tail *= qf;
    }
    Err(Error::TruncationFailure { epsilon: policy.epsilon, max_terms: policy.max_terms })
}

/// Symmetric q-number `[α]_q = (q^α - q^{-α})/(q - q^{-1})`.
pub fn q_number<T: Scalar>(alpha: i64, q: &QBase<T>) -> T {
    let qv = q.value();
    (q.powi(alpha) - q.powi(-alpha)) / (qv.clone() - T::one() / qv.clone())
}

/// `ϑ_l(s) = (s^{-1} - s q^{-2l})/(q - q^{-1})`.
pub fn theta<T: Scalar>(l: i64, s: &T, q: &QBase<T>) -> Result<T> {
    if s.is_zero() {
        return Err(Error::InvalidArgument("ϑ_l(s) needs s ≠ 0".into()));
    }
    let qv = q.value();
    Ok((T::one() / s.clone() - s.clone() * q.powi(-2 * l)) / (qv.clone() - T::one() / qv.clone()))
}

/// `s_l = ϑ_0(q^{σ-2l})`, the spectrum of the coideal generator.
pub fn coideal_eigenvalue<T: Scalar>(l: i64, sigma: &T, q: &QBase<T>) -> Result<T> {
    let s = q.pow(sigma)? * q.powi(-2 * l);
    theta(0, &s, q)
}
