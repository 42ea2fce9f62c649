//! Exact and certified arithmetic kernel.
//!
//! Four layers, from hardest to softest guarantees:
//! * [`Rational`] — arbitrary-precision rationals, always in lowest terms.
//!   Every coefficient in the construction (powers of 2, ratios `j/(j+1)`,
//!   `1 − t/a`) lives here exactly.
//! * [`Dyadic`] — `m · 2^e` with odd (or zero) mantissa; the directed
//!   rounding grid used by bisection and the log-magnitude refinement.
//! * [`LogMagnitude`] — certified two-sided bounds on `log2` of a positive
//!   quantity, for numbers like `2^(2 + a²)` that cannot be materialized.
//! * [`CertifiedScalar`] — an exact rational or an outward-rounded enclosure
//!   `[lo, hi]`; the only thing square roots and eigenvalue bounds return.

mod certified;
mod dyadic;
mod log_mag;
mod sqrt;

pub use certified::{CertOrd, CertifiedScalar};
pub use dyadic::{Dyadic, Rounding};
pub use log_mag::LogMagnitude;
pub use sqrt::{isqrt, sqrt_enclosure};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational; `num_rational` keeps it reduced with a
/// positive denominator, which is exactly the invariant we need.
pub type Rational = num_rational::BigRational;

/// `n/d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer shorthand.
pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Big-integer shorthand.
pub fn rbig(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// `2^e` exactly, for any signed machine exponent.
pub fn pow2(e: i64) -> Rational {
    let one = BigInt::one();
    if e >= 0 {
        Rational::from_integer(one << (e as usize))
    } else {
        Rational::new(one.clone(), one << ((-e) as usize))
    }
}

/// `2^e` for a big-integer exponent. The exponent must fit in the address
/// space once non-negative; callers guard sizes via [`LogMagnitude`] first.
pub fn pow2_big(e: &BigInt) -> Rational {
    let bits = i64::try_from(e.abs().clone()).expect("pow2_big exponent out of range");
    pow2(if e.is_negative() { -bits } else { bits })
}

/// Largest `e` with `2^e ≤ x`; requires `x > 0`.
pub fn floor_log2(x: &Rational) -> i64 {
    assert!(x.is_positive(), "floor_log2 needs a positive argument");
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    // The bit-length guess is off by at most one in each direction.
    if pow2(e) > *x {
        e -= 1;
    }
    if pow2(e + 1) <= *x {
        e += 1;
    }
    debug_assert!(pow2(e) <= *x && *x < pow2(e + 1));
    e
}

/// Is `x` an exact (possibly negative) power of two?
pub fn is_pow2(x: &Rational) -> Option<i64> {
    if !x.is_positive() {
        return None;
    }
    let pow_of_two = |b: &BigInt| b.is_one() || (b & (b - 1u32)).is_zero();
    if pow_of_two(x.numer()) && pow_of_two(x.denom()) {
        Some(x.numer().bits() as i64 - x.denom().bits() as i64)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_and_floor_log2_agree() {
        for e in -40i64..40 {
            let x = pow2(e);
            assert_eq!(floor_log2(&x), e);
            assert_eq!(is_pow2(&x), Some(e));
        }
        // strictly between powers
        let x = rat(3, 4);
        assert_eq!(floor_log2(&x), -1);
        assert_eq!(is_pow2(&x), None);
        assert_eq!(floor_log2(&rat(1, 3)), -2);
        assert_eq!(floor_log2(&rint(5)), 2);
    }

    #[test]
    fn rational_field_sanity() {
        let a = rat(3, 7);
        let b = rat(-5, 11);
        let c = rat(13, 2);
        assert_eq!((&a + &b) + &c, &a + (&b + &c));
        assert_eq!(&a * &b, &b * &a);
        assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        assert_eq!(&a * &a.recip(), rint(1));
    }
}
