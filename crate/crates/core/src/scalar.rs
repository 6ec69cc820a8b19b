//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! [`Scalar`] is the field interface (exact rationals qualify), [`Real`] adds
//! the transcendental functions needed for quadrature and eigenvectors.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::laurent::Coeff;

/// A field element usable as matrix entry, polynomial coefficient or parameter.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Coeff + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;

    fn from_i64(n: i64) -> Self;

    /// Nearest `f64`, used for tolerance checks and reporting.
    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// Unit roundoff of the representation; zero for exact arithmetic.
    fn epsilon() -> f64;

    fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// `self^e` when it is representable; exact types only accept integer `e`.
    fn pow_scalar(&self, e: &Self) -> Option<Self>;

    fn is_exact() -> bool {
        Self::epsilon() == 0.0
    }
}

/// Real scalars with the elementary functions.
pub trait Real: Scalar {
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn pi() -> Self;
}

macro_rules! impl_float {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn from_i64(n: i64) -> Self {
                n as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
            fn epsilon() -> f64 {
                <$t>::EPSILON as f64
            }
            fn powi(&self, n: i64) -> Self {
                match i32::try_from(n) {
                    Ok(n) => <$t>::powi(*self, n),
                    Err(_) => <$t>::powf(*self, n as $t),
                }
            }
            fn pow_scalar(&self, e: &Self) -> Option<Self> {
                Some(<$t>::powf(*self, *e))
            }
        }

        impl Real for $t {
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn powf(&self, e: &Self) -> Self {
                <$t>::powf(*self, *e)
            }
            fn pi() -> Self {
                std::f64::consts::PI as $t
            }
        }
    };
}

impl_float!(f32);
impl_float!(f64);

impl Scalar for BigRational {
    /// Exact binary value of the float.
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn epsilon() -> f64 {
        0.0
    }
    fn pow_scalar(&self, e: &Self) -> Option<Self> {
        if !e.is_integer() {
            return None;
        }
        let n = e.to_integer().to_i64()?;
        Some(Scalar::powi(self, n))
    }
}

/// Exact rational from a decimal or fraction literal such as `"1/2"` or `"0.25"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, den);
    Some(if neg { -r } else { r })
}

/// Magnitude of a complex scalar as `f64`.
pub fn cabs<T: Scalar>(z: &Complex<T>) -> f64 {
    let re = z.re.to_f64();
    let im = z.im.to_f64();
    re.hypot(im)
}

/// Exact complex conjugate (no `Float` bound needed).
pub fn conj<T: Scalar>(z: &Complex<T>) -> Complex<T> {
    Complex::new(z.re.clone(), -z.im.clone())
}

pub fn real<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[allow(dead_code)]
pub(crate) fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_i64(i64::from_usize(n).expect("index fits in i64"))
}

/// `e^{iθ}`.
pub fn cis<T: Real>(theta: &T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_powers_are_exact() {
        let q = parse_rational("1/2").unwrap();
        assert_eq!(Scalar::powi(&q, -3), <BigRational as Scalar>::from_i64(8));
        assert_eq!(q.pow_scalar(&<BigRational as Scalar>::from_i64(2)).unwrap(), parse_rational("0.25").unwrap());
        assert!(q.pow_scalar(&parse_rational("1/3").unwrap()).is_none());
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("-0.125").unwrap(), BigRational::new((-1).into(), 8.into()));
        assert_eq!(parse_rational("3").unwrap(), <BigRational as Scalar>::from_i64(3));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn float_powi_matches_powf() {
        assert_eq!(Scalar::powi(&0.5f64, -4), 16.0);
        assert_eq!(Scalar::powi(&0.5f32, 3), 0.125);
    }
}
