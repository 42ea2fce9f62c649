//! Certified bounds on `log2` of a positive quantity.
//!
//! The growth conditions of interest compare numbers like `a² ` against
//! `1 + 2^(2+b²)` where `b` itself may only be known through its logarithm.
//! Materializing such towers is impossible; comparing their logarithms is
//! easy.  A `LogMagnitude` keeps exact rational bounds `lo ≤ log2(v) ≤ hi`
//! and propagates them:
//!
//! * product / quotient / integer power — exact interval arithmetic on logs;
//! * sum — `log2(x+y) ≤ max + log2(1+t)` with `log2(1+t) ≤ (3/2)·t` for
//!   `t ≤ 1`, so a certified gap of `d` between the summands costs only a
//!   `(3/2)·2^{-d}` widening;
//! * difference (lower bound) — needs a certified factor-2 gap, then
//!   `−log2(1−t) ≤ 3t` for `t ≤ 1/2`.
//!
//! Comparisons are decided only when the intervals are disjoint (or both are
//! the same point); anything else is reported as undecidable, never guessed.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::dyadic::{Dyadic, Rounding};
use super::{floor_log2, is_pow2, pow2, rat, rint, Rational};

/// How far a certified gap is allowed to sharpen a slack term. Beyond this
/// the slack `2^{-64}` is already far below every tolerance in the crate and
/// tighter exponents would only bloat denominators.
const GAP_CAP: i64 = 64;

/// Exponent window inside which `2^k` is considered materializable.
const MATERIALIZE_CAP: i64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogMagnitude {
    lo: Rational,
    hi: Rational,
}

impl LogMagnitude {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "log-magnitude interval reversed");
        LogMagnitude { lo, hi }
    }

    /// The exact value `2^l`.
    pub fn point(l: Rational) -> Self {
        LogMagnitude { lo: l.clone(), hi: l }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Certified bounds on `log2(x)` for a positive rational `x`, tightened
    /// to roughly `2^{-bits}` width by mantissa squaring with directed
    /// rounding.  Exact powers of two come back as points.
    pub fn from_rational(x: &Rational, bits: u32) -> Self {
        assert!(x.is_positive(), "log-magnitude of a non-positive value");
        if let Some(e) = is_pow2(x) {
            return LogMagnitude::point(rint(e));
        }
        let l = floor_log2(x);
        let y = x * pow2(-l); // ∈ (1, 2)
        // Working precision: rounding errors in the squaring chain amplify by
        // at most 2^bits, so keep twice the requested bits plus guard digits.
        let p = 2 * bits + 8;

        // Down pass: a chain y_{i+1} = round_down(y_i²)/2^{b_i} with y_i ≥ 1
        // maintains log2(x) ≥ l + Σ b_i 2^{-i} throughout.
        let mut frac_lo = Rational::zero();
        let mut yd = Dyadic::round_from_rational(&y, p, Rounding::Down).to_rational();
        if yd < rint(1) {
            yd = rint(1);
        }
        for i in 1..=bits {
            let sq = &yd * &yd;
            yd = Dyadic::round_from_rational(&sq, p, Rounding::Down).to_rational();
            if yd >= rint(2) {
                frac_lo += pow2(-(i as i64));
                yd /= rint(2);
            }
            if yd < rint(1) {
                yd = rint(1);
            }
        }

        // Up pass: same chain rounded up, clamped at the a-priori bound 4,
        // maintains log2(x) ≤ l + Σ b_i 2^{-i} + 2^{-i}·log2(y_i) ≤ … + 2^{-bits}.
        let mut frac_hi = Rational::zero();
        let mut yu = Dyadic::round_from_rational(&y, p, Rounding::Up).to_rational();
        for i in 1..=bits {
            let sq = &yu * &yu;
            yu = Dyadic::round_from_rational(&sq, p, Rounding::Up).to_rational();
            if yu > rint(4) {
                yu = rint(4);
            }
            if yu >= rint(2) {
                frac_hi += pow2(-(i as i64));
                yu /= rint(2);
            }
        }
        frac_hi += pow2(-(bits as i64));

        LogMagnitude::new(rint(l) + frac_lo, rint(l) + frac_hi)
    }

    pub fn mul(&self, other: &Self) -> Self {
        LogMagnitude::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn div(&self, other: &Self) -> Self {
        LogMagnitude::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    /// `v^k` for integer `k` (log scales by `k`).
    pub fn pow(&self, k: i64) -> Self {
        let f = rint(k);
        if k >= 0 {
            LogMagnitude::new(&self.lo * &f, &self.hi * &f)
        } else {
            LogMagnitude::new(&self.hi * &f, &self.lo * &f)
        }
    }

    /// Bounds for `x + y` given bounds for both summands.
    pub fn add_value(&self, other: &Self) -> Self {
        // Order so that `big` has the larger upper bound.
        let (big, small) = if self.hi >= other.hi { (self, other) } else { (other, self) };
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        // t = small/big ≤ 2^(small.hi − big.lo); if that certifies t ≤ 1,
        // log2(1+t) ≤ (3/2)·t, otherwise fall back to the generic +1.
        let gap = &big.lo - &small.hi; // t ≤ 2^{-gap}
        let slack = if gap >= Rational::zero() {
            let g = gap.floor().to_integer();
            let g = if g > GAP_CAP.into() { GAP_CAP } else { i64::try_from(g).unwrap_or(GAP_CAP) };
            let s = rat(3, 2) * pow2(-g);
            if s > rint(1) {
                rint(1)
            } else {
                s
            }
        } else {
            rint(1)
        };
        LogMagnitude::new(lo, &big.hi + slack)
    }

    /// Certified lower-bounded log of `x − y`, available only when
    /// `y ≤ x/2` is certified (`y.hi ≤ x.lo − 1`). Upper bound is `x.hi`.
    pub fn sub_value_lower(&self, other: &Self) -> Option<Self> {
        let gap = &self.lo - &other.hi;
        if gap < rint(1) {
            return None;
        }
        let g = gap.floor().to_integer();
        let g = if g > GAP_CAP.into() { GAP_CAP } else { i64::try_from(g).unwrap_or(GAP_CAP) };
        // x − y = x(1−t), t ≤ 2^{-g} ≤ 1/2, and −log2(1−t) ≤ 3t.
        let lo = &self.lo - rint(3) * pow2(-g);
        Some(LogMagnitude::new(lo, self.hi.clone()))
    }

    /// Bounds for the factor `(1 − 2^{-a})^{-1}` given a certified lower
    /// bound `a_lo ≥ 1` on the exponent: its log lies in `[0, 3·2^{-a}]`.
    pub fn factor_inv_one_minus(a_lo: &Rational) -> Self {
        assert!(*a_lo >= rint(1), "factor needs exponent ≥ 1");
        let g = a_lo.floor().to_integer();
        let g = if g > GAP_CAP.into() { GAP_CAP } else { i64::try_from(g).unwrap_or(GAP_CAP) };
        LogMagnitude::new(Rational::zero(), rint(3) * pow2(-g))
    }

    /// Decide an order when the intervals allow it. Point-equal intervals
    /// compare `Equal`; overlapping ones return `None` (undecidable).
    pub fn cmp_value(&self, other: &Self) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// If the value is exactly a materializable power of two, produce it.
    pub fn materialize_pow2(&self) -> Option<Rational> {
        if !self.is_point() || !self.lo.is_integer() {
            return None;
        }
        let k = self.lo.to_integer();
        if k.abs() > MATERIALIZE_CAP.into() {
            return None;
        }
        Some(pow2(i64::try_from(k).ok()?))
    }

    /// Conservative rational bounds on the value itself: a lower bound that
    /// degrades to 0 and an upper bound that degrades to `None` when the
    /// exponents leave the materializable window.  Exponents beyond the
    /// window in the *harmless* direction are clamped to it (a value bigger
    /// than 2^(2^170) is still bigger than 2^65536).
    pub fn to_rational_bounds(&self) -> (Rational, Option<Rational>) {
        let lo_e = self.lo.floor().to_integer();
        let lower = if lo_e < (-MATERIALIZE_CAP).into() {
            Rational::zero()
        } else {
            let e = i64::try_from(lo_e).unwrap_or(MATERIALIZE_CAP).min(MATERIALIZE_CAP);
            pow2(e)
        };
        let hi_e = self.hi.ceil().to_integer();
        let upper = if hi_e > MATERIALIZE_CAP.into() {
            None
        } else {
            let e = i64::try_from(hi_e).unwrap_or(-MATERIALIZE_CAP).max(-MATERIALIZE_CAP);
            Some(pow2(e))
        };
        (lower, upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm(x: &Rational) -> LogMagnitude {
        LogMagnitude::from_rational(x, 32)
    }

    #[test]
    fn powers_of_two_are_points() {
        let m = lm(&pow2(-13));
        assert!(m.is_point());
        assert_eq!(*m.lo(), rint(-13));
        assert_eq!(lm(&pow2(40)).materialize_pow2(), Some(pow2(40)));
    }

    #[test]
    fn refinement_brackets_the_true_log() {
        // 2^lo ≤ x ≤ 2^hi, verified exactly: raise both sides to a power q
        // chosen so the scaled endpoints become integers (endpoints are
        // dyadic), then compare x^q against integer powers of two.
        for x in [rint(3), rat(7, 5), rint(1000), rat(1, 3), rat(355, 113)] {
            let m = lm(&x);
            assert!(m.hi() - m.lo() <= pow2(-30), "width too large for {x}");
            let q: u32 = 1 << 12;
            let lo_scaled = (m.lo() * rint(q as i64)).floor().to_integer();
            let hi_scaled = (m.hi() * rint(q as i64)).ceil().to_integer();
            let xq = num_traits::Pow::pow(x.clone(), q);
            assert!(xq >= pow2(i64::try_from(lo_scaled).unwrap()), "lower bound fails for {x}");
            assert!(xq <= pow2(i64::try_from(hi_scaled).unwrap()), "upper bound fails for {x}");
        }
    }

    #[test]
    fn comparison_never_contradicts_exact_order() {
        let samples = [rat(3, 2), rint(3), rat(17, 16), rint(1024), rat(1, 7), rat(99, 98)];
        for a in &samples {
            for b in &samples {
                if let Some(ord) = lm(a).cmp_value(&lm(b)) {
                    if ord != Ordering::Equal {
                        assert_eq!(ord, a.cmp(b), "log verdict contradicts exact order");
                    }
                }
            }
        }
        // close pair under coarse refinement: must refuse rather than guess
        let coarse_a = LogMagnitude::from_rational(&rat(99, 98), 8);
        let coarse_b = LogMagnitude::from_rational(&rat(100, 99), 8);
        assert_eq!(coarse_a.cmp_value(&coarse_b), None);
        // the same pair is decidable at full refinement, and correctly so
        assert_eq!(lm(&rat(99, 98)).cmp_value(&lm(&rat(100, 99))), Some(Ordering::Greater));
    }

    #[test]
    fn sum_and_difference_bounds_are_conservative() {
        let x = rint(1 << 20);
        let y = rat(3, 1);
        let s = lm(&x).add_value(&lm(&y));
        let exact = &x + &y;
        // 2^lo ≤ exact ≤ 2^hi via the coarse rational bounds
        let (lo_v, hi_v) = s.to_rational_bounds();
        assert!(lo_v <= exact);
        assert!(hi_v.unwrap() >= exact);

        let d = lm(&x).sub_value_lower(&lm(&y)).expect("gap is huge");
        let (lo_v, _) = d.to_rational_bounds();
        assert!(lo_v <= &x - &y);
        // no certified gap → refuse
        assert!(lm(&x).sub_value_lower(&lm(&x)).is_none());
    }

    #[test]
    fn inv_one_minus_factor_brackets() {
        // a = 4: (1−1/16)^{-1} = 16/15; log2 ∈ [0, 3/16].
        let f = LogMagnitude::factor_inv_one_minus(&rint(4));
        let v = rat(16, 15);
        let (lo_v, hi_v) = f.to_rational_bounds();
        assert!(lo_v <= v && v <= hi_v.unwrap());
        assert!(*f.hi() <= rat(3, 16));
    }
}
