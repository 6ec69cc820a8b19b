//! 192-bit binary floating point scalar.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_traits::{Num, One, Zero};

use crate::scalar::{Real, Scalar};

/// Mantissa bits carried by [`Hp`].
pub const HP_BITS: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// High-precision real number, the `hp` precision mode.
#[derive(Clone)]
pub struct Hp(BigFloat);

impl Hp {
    pub fn from_big(x: BigFloat) -> Self {
        Hp(x)
    }

    pub fn as_big(&self) -> &BigFloat {
        &self.0
    }

    /// Parse a decimal literal at full precision.
    pub fn parse(s: &str) -> Option<Self> {
        let v = with_consts(|cc| BigFloat::parse(s, astro_float::Radix::Dec, HP_BITS, RM, cc));
        (!v.is_nan()).then_some(Hp(v))
    }
}

impl fmt::Debug for Hp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hp({})", self.0)
    }
}

impl fmt::Display for Hp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq for Hp {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Hp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr for Hp {
            type Output = Hp;
            fn $m(self, rhs: Hp) -> Hp {
                let f: fn(&BigFloat, &BigFloat) -> BigFloat = $body;
                Hp(f(&self.0, &rhs.0))
            }
        }
    };
}

binop!(Add, add, |a, b| a.add(b, HP_BITS, RM));
binop!(Sub, sub, |a, b| a.sub(b, HP_BITS, RM));
binop!(Mul, mul, |a, b| a.mul(b, HP_BITS, RM));
binop!(Div, div, |a, b| a.div(b, HP_BITS, RM));
binop!(Rem, rem, |a, b| a.rem(b));

impl Neg for Hp {
    type Output = Hp;
    fn neg(self) -> Hp {
        Hp(self.0.neg())
    }
}

impl Zero for Hp {
    fn zero() -> Self {
        Hp(BigFloat::from_f64(0.0, HP_BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Hp {
    fn one() -> Self {
        Hp(BigFloat::from_f64(1.0, HP_BITS))
    }
}

impl Num for Hp {
    type FromStrRadixErr = ();

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ()> {
        if radix != 10 {
            return Err(());
        }
        Hp::parse(s).ok_or(())
    }
}

impl Scalar for Hp {
    fn from_f64(x: f64) -> Self {
        Hp(BigFloat::from_f64(x, HP_BITS))
    }

    fn from_i64(n: i64) -> Self {
        Hp(BigFloat::from_i64(n, HP_BITS))
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, sign, exp, _)) = self.0.as_raw_parts() else {
            return 0.0;
        };
        // mantissa words are little-endian with the top bit of the last word set
        let mut top = words.iter().rev().take(2);
        let hi = top.next().copied().unwrap_or(0) as f64;
        let lo = top.next().copied().unwrap_or(0) as f64;
        let v = ldexp(hi + lo * 2f64.powi(-64), exp - 64);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    fn abs(&self) -> Self {
        Hp(self.0.abs())
    }

    fn epsilon() -> f64 {
        2f64.powi(-(HP_BITS as i32) + 1)
    }

    fn pow_scalar(&self, e: &Self) -> Option<Self> {
        Some(self.powf(e))
    }
}

/// `x · 2^e` without intermediate overflow or underflow of the power.
fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

impl Real for Hp {
    fn sqrt(&self) -> Self {
        Hp(self.0.sqrt(HP_BITS, RM))
    }

    fn exp(&self) -> Self {
        Hp(with_consts(|cc| self.0.exp(HP_BITS, RM, cc)))
    }

    fn ln(&self) -> Self {
        Hp(with_consts(|cc| self.0.ln(HP_BITS, RM, cc)))
    }

    fn sin(&self) -> Self {
        Hp(with_consts(|cc| self.0.sin(HP_BITS, RM, cc)))
    }

    fn cos(&self) -> Self {
        Hp(with_consts(|cc| self.0.cos(HP_BITS, RM, cc)))
    }

    fn powf(&self, e: &Self) -> Self {
        if e.0.is_int() {
            let n = e.to_f64();
            if n.abs() < 1e15 {
                return Scalar::powi(self, n as i64);
            }
        }
        Hp(with_consts(|cc| self.0.pow(&e.0, HP_BITS, RM, cc)))
    }

    fn pi() -> Self {
        Hp(with_consts(|cc| cc.pi(HP_BITS, RM)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn to_f64_roundtrips_doubles() {
        for x in [1.0, -2.5, 0.1, 3.0e-300, 1.0e300, std::f64::consts::PI] {
            assert_eq!(Hp::from_f64(x).to_f64(), x);
        }
        assert_eq!(Hp::zero().to_f64(), 0.0);
    }

    #[test]
    fn carries_more_than_128_bits() {
        let third = Hp::one() / Hp::from_i64(3);
        let back = third.clone() * Hp::from_i64(3) - Hp::one();
        assert!(back.abs().to_f64() < 1e-55);
        let tiny = Hp::from_f64(2f64.powi(-130));
        assert!((Hp::one() + tiny) != Hp::one());
    }

    #[test]
    fn elementary_functions() {
        let two = Hp::from_i64(2);
        let r = two.sqrt();
        assert!((r.clone() * r - two).abs().to_f64() < 1e-55);
        assert!((Hp::pi().cos() + Hp::one()).abs().to_f64() < 1e-55);
        let h = Hp::from_f64(0.5).powf(&Hp::from_f64(0.7));
        assert!((h.to_f64() - 0.5f64.powf(0.7)).abs() < 1e-15);
        assert_eq!(Hp::from_f64(0.5).powf(&Hp::from_i64(-3)).to_f64(), 8.0);
    }
}
