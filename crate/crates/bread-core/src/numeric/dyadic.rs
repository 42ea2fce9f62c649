//! Dyadic rationals `m · 2^e` with odd-or-zero mantissa.
//!
//! These are the grid points of every directed rounding in the crate: the
//! bisection midpoints in the operator-norm search and the working values of
//! the log-magnitude refinement.  Keeping the mantissa odd makes the
//! representation canonical, so equality is structural.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Rounding direction for [`Dyadic::round_from_rational`]: toward −∞ or +∞,
/// so that a rounded value is a one-sided bound of the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: BigInt,
    exp: i64,
}

impl Dyadic {
    /// Build `m · 2^e`, normalizing so the stored mantissa is odd or zero.
    pub fn new(mantissa: BigInt, exp: i64) -> Self {
        if mantissa.is_zero() {
            return Dyadic { mantissa, exp: 0 };
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> (tz as usize),
            exp: exp + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exp: 0 }
    }

    pub fn from_integer(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mantissa << (self.exp as usize))
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << ((-self.exp) as usize))
        }
    }

    /// Exact conversion when the reduced denominator is a power of two.
    pub fn from_rational_exact(x: &Rational) -> Option<Self> {
        if x.is_zero() {
            return Some(Dyadic::zero());
        }
        let d = x.denom();
        if (d & (d - 1u32)).is_zero() {
            Some(Dyadic::new(x.numer().clone(), -(d.bits() as i64 - 1)))
        } else {
            None
        }
    }

    /// Round `x` to a dyadic with at most `bits` significant mantissa bits,
    /// in the given direction (toward −∞ / +∞, so the result is a one-sided
    /// bound of `x`).
    pub fn round_from_rational(x: &Rational, bits: u32, dir: Rounding) -> Self {
        assert!(bits >= 1);
        if x.is_zero() {
            return Dyadic::zero();
        }
        let s = super::floor_log2(&x.abs());
        let e = s - bits as i64 + 1;
        // m = x / 2^e, rounded to an integer in the requested direction.
        let shifted = x * super::pow2(-e);
        let m = match dir {
            Rounding::Down => shifted.numer().div_floor(shifted.denom()),
            Rounding::Up => shifted.numer().div_ceil(shifted.denom()),
        };
        Dyadic::new(m, e)
    }

    pub fn neg(&self) -> Self {
        Dyadic { mantissa: -&self.mantissa, exp: self.exp }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mantissa << ((self.exp - e) as usize);
        let b = &other.mantissa << ((other.exp - e) as usize);
        Dyadic::new(a + b, e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        // Product of odd mantissas is odd: already normalized.
        Dyadic {
            mantissa: &self.mantissa * &other.mantissa,
            exp: self.exp + other.exp,
        }
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let (ls, rs) = (self.mantissa.sign(), other.mantissa.sign());
        if ls != rs {
            return ls.cmp(&rs);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mantissa << ((self.exp - e) as usize);
        let b = &other.mantissa << ((other.exp - e) as usize);
        a.cmp(&b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{pow2, rat, rint};

    #[test]
    fn round_trip_on_dyadic_inputs() {
        for (n, d) in [(3i64, 8i64), (-7, 16), (5, 1), (0, 1), (1, 1024)] {
            let x = rat(n, d);
            let y = Dyadic::from_rational_exact(&x).expect("dyadic input");
            assert_eq!(y.to_rational(), x);
        }
        assert!(Dyadic::from_rational_exact(&rat(1, 3)).is_none());
    }

    #[test]
    fn directed_rounding_brackets_the_input() {
        let x = rat(1, 3);
        for bits in [1u32, 4, 10, 30] {
            let lo = Dyadic::round_from_rational(&x, bits, Rounding::Down).to_rational();
            let hi = Dyadic::round_from_rational(&x, bits, Rounding::Up).to_rational();
            assert!(lo <= x && x <= hi);
            assert!(&hi - &lo <= pow2(-(bits as i64) - 1));
        }
        let neg = rat(-22, 7);
        let lo = Dyadic::round_from_rational(&neg, 8, Rounding::Down).to_rational();
        let hi = Dyadic::round_from_rational(&neg, 8, Rounding::Up).to_rational();
        assert!(lo <= neg && neg <= hi);
    }

    #[test]
    fn arithmetic_matches_rationals() {
        let a = Dyadic::new(BigInt::from(12), -3); // 3/2
        assert_eq!(a.to_rational(), rat(3, 2));
        let b = Dyadic::new(BigInt::from(-5), 1); // -10
        assert_eq!(a.add(&b).to_rational(), rat(3, 2) + rint(-10));
        assert_eq!(a.mul(&b).to_rational(), rat(3, 2) * rint(-10));
        assert_eq!(a.cmp_value(&b), Ordering::Greater);
        assert_eq!(a.neg().cmp_value(&b), Ordering::Greater);
    }
}
