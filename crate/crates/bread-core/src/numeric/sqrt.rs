//! Certified square roots.
//!
//! `sqrt_enclosure` returns an exact value whenever the input is a rational
//! square, otherwise an enclosure of width `2^{-bits}` built from the integer
//! square root of a scaled numerator.  The enclosure endpoints are exact
//! rationals, so downstream comparisons stay certified.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::certified::CertifiedScalar;
use super::{pow2, rbig, Rational};
use crate::error::{Error, Result};

/// Floor of the integer square root of a non-negative big integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "integer square root of a negative number");
    n.sqrt()
}

/// Certified enclosure of `√x`.
///
/// * negative input → `NegativeSqrt`;
/// * zero, or `x` with both numerator and denominator perfect squares →
///   exact result;
/// * otherwise `[s·2^{-bits}, (s+1)·2^{-bits}]` with `s = ⌊√(x·4^bits)⌋`,
///   an enclosure of width exactly `2^{-bits}`.
pub fn sqrt_enclosure(x: &Rational, bits: u32) -> Result<CertifiedScalar> {
    sqrt_enclosure_raw(x, bits)
}

/// Implementation shared with `CertifiedScalar::sqrt`.
pub(super) fn sqrt_enclosure_raw(x: &Rational, bits: u32) -> Result<CertifiedScalar> {
    if x.is_negative() {
        return Err(Error::NegativeSqrt(x.clone()));
    }
    if x.is_zero() {
        return Ok(CertifiedScalar::Exact(Rational::zero()));
    }
    let pn = isqrt(x.numer());
    let qd = isqrt(x.denom());
    if &(&pn * &pn) == x.numer() && &(&qd * &qd) == x.denom() {
        return Ok(CertifiedScalar::Exact(Rational::new(pn, qd)));
    }
    // s = ⌊√(x·4^bits)⌋ gives s² ≤ x·4^bits < (s+1)², i.e.
    // s·2^{-bits} ≤ √x < (s+1)·2^{-bits}.
    let scaled = (x * pow2(2 * bits as i64)).floor().to_integer();
    let s = isqrt(&scaled);
    debug_assert!(rbig(&s * &s) <= x * pow2(2 * bits as i64));
    let lo = rbig(s.clone()) * pow2(-(bits as i64));
    let hi = rbig(s + 1) * pow2(-(bits as i64));
    Ok(CertifiedScalar::enclosure(lo, hi))
}
