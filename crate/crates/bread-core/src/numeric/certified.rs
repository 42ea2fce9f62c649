//! Scalars that carry their own error certificates.
//!
//! Every quantity the library reports is either an exact rational or a pair
//! of exact rational endpoints enclosing the true value.  Arithmetic keeps
//! that contract: exact ⊗ exact stays exact, anything touching an enclosure
//! produces an enclosure whose endpoints are again exact rationals.
//! Comparisons return a verdict only when the enclosures force one.

use num_traits::{Signed, Zero};

use super::dyadic::{Dyadic, Rounding};
use super::sqrt::sqrt_enclosure_raw;
use super::{rat, Rational};
use crate::error::{Error, Result};

/// Exact value or certified enclosure `[lo, hi]` of a real scalar.
#[derive(Debug, Clone, PartialEq)]
pub enum CertifiedScalar {
    Exact(Rational),
    Enclosure { lo: Rational, hi: Rational },
}

/// Outcome of comparing two certified scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertOrd {
    /// Every point of the left enclosure is below every point of the right.
    Less,
    /// Every point of the left enclosure is above every point of the right.
    Greater,
    /// The enclosures overlap; no strict verdict is certified.
    Overlapping,
}

impl CertifiedScalar {
    pub fn exact(x: Rational) -> Self {
        CertifiedScalar::Exact(x)
    }

    pub fn zero() -> Self {
        CertifiedScalar::Exact(Rational::zero())
    }

    pub fn enclosure(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "enclosure endpoints reversed");
        if lo == hi {
            CertifiedScalar::Exact(lo)
        } else {
            CertifiedScalar::Enclosure { lo, hi }
        }
    }

    pub fn lo(&self) -> &Rational {
        match self {
            CertifiedScalar::Exact(x) => x,
            CertifiedScalar::Enclosure { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            CertifiedScalar::Exact(x) => x,
            CertifiedScalar::Enclosure { hi, .. } => hi,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CertifiedScalar::Exact(_))
    }

    pub fn width(&self) -> Rational {
        self.hi() - self.lo()
    }

    /// True value known to be ≥ 0 at every point of the enclosure.
    pub fn is_nonnegative(&self) -> bool {
        !self.lo().is_negative()
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (CertifiedScalar::Exact(a), CertifiedScalar::Exact(b)) => {
                CertifiedScalar::Exact(a + b)
            }
            _ => CertifiedScalar::enclosure(self.lo() + other.lo(), self.hi() + other.hi()),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            CertifiedScalar::Exact(a) => CertifiedScalar::Exact(-a),
            CertifiedScalar::Enclosure { lo, hi } => {
                CertifiedScalar::Enclosure { lo: -hi, hi: -lo }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (CertifiedScalar::Exact(a), CertifiedScalar::Exact(b)) => {
                CertifiedScalar::Exact(a * b)
            }
            _ => {
                // interval product: extremes are among the four corner products
                let corners = [
                    self.lo() * other.lo(),
                    self.lo() * other.hi(),
                    self.hi() * other.lo(),
                    self.hi() * other.hi(),
                ];
                let lo = corners.iter().min().unwrap().clone();
                let hi = corners.iter().max().unwrap().clone();
                CertifiedScalar::enclosure(lo, hi)
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.mul(&CertifiedScalar::Exact(c.clone()))
    }

    /// Square root with enclosure width at most `2^{-bits}` relative to the
    /// result scale.  Exact when the input is an exact rational square.
    pub fn sqrt(&self, bits: u32) -> Result<Self> {
        if self.lo().is_negative() {
            return Err(Error::NegativeSqrt(self.lo().clone()));
        }
        match self {
            CertifiedScalar::Exact(x) => sqrt_enclosure_raw(x, bits),
            CertifiedScalar::Enclosure { lo, hi } => {
                let l = sqrt_enclosure_raw(lo, bits)?;
                let h = sqrt_enclosure_raw(hi, bits)?;
                Ok(CertifiedScalar::enclosure(l.lo().clone(), h.hi().clone()))
            }
        }
    }

    /// Compare two certified scalars; strict verdicts are never wrong.
    pub fn cmp_certified(&self, other: &Self) -> CertOrd {
        if self.hi() < other.lo() {
            CertOrd::Less
        } else if self.lo() > other.hi() {
            CertOrd::Greater
        } else {
            CertOrd::Overlapping
        }
    }

    /// Certified `self ≤ x`: the whole enclosure sits at or below `x`.
    pub fn definitely_le(&self, x: &Rational) -> bool {
        self.hi() <= x
    }

    /// Certified `self < x`.
    pub fn definitely_lt(&self, x: &Rational) -> bool {
        self.hi() < x
    }

    /// Certified `self ≥ x`.
    pub fn definitely_ge(&self, x: &Rational) -> bool {
        self.lo() >= x
    }

    /// Midpoint of the enclosure (exact value for exact scalars).
    pub fn midpoint(&self) -> Rational {
        (self.lo() + self.hi()) * rat(1, 2)
    }

    /// Outward rounding onto the dyadic grid with `bits` significant bits:
    /// the result encloses `self`, and its endpoints have denominators
    /// bounded by `2^bits`-scale dyadics regardless of how unwieldy the
    /// exact endpoints were.  This is what keeps long accumulations from
    /// drowning in coprime denominators: round after every addition and the
    /// cost per step stays proportional to `bits`, at the price of a
    /// relative `2^(1−bits)` widening per step.
    pub fn rounded(&self, bits: u32) -> Self {
        let lo = Dyadic::round_from_rational(self.lo(), bits, Rounding::Down).to_rational();
        let hi = Dyadic::round_from_rational(self.hi(), bits, Rounding::Up).to_rational();
        CertifiedScalar::enclosure(lo, hi)
    }

    /// Certified reciprocal, defined only when the enclosure is strictly
    /// positive: `[lo, hi] ↦ [1/hi, 1/lo]`.
    pub fn recip_positive(&self) -> Option<Self> {
        if !self.lo().is_positive() {
            return None;
        }
        match self {
            CertifiedScalar::Exact(x) => Some(CertifiedScalar::Exact(x.recip())),
            CertifiedScalar::Enclosure { lo, hi } => {
                Some(CertifiedScalar::enclosure(hi.recip(), lo.recip()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{pow2, rint};

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = CertifiedScalar::exact(rat(2, 3));
        let b = CertifiedScalar::exact(rat(-1, 4));
        assert_eq!(a.add(&b), CertifiedScalar::exact(rat(5, 12)));
        assert_eq!(a.mul(&b), CertifiedScalar::exact(rat(-1, 6)));
        assert!(a.sub(&b).is_exact());
    }

    #[test]
    fn interval_product_covers_all_sign_patterns() {
        let cases = [
            (rat(-2, 1), rat(3, 1), rat(-1, 1), rat(5, 1)),
            (rat(-4, 1), rat(-2, 1), rat(-3, 1), rat(-1, 1)),
            (rat(1, 2), rat(2, 1), rat(-5, 1), rat(-1, 1)),
        ];
        for (alo, ahi, blo, bhi) in cases {
            let a = CertifiedScalar::enclosure(alo.clone(), ahi.clone());
            let b = CertifiedScalar::enclosure(blo.clone(), bhi.clone());
            let p = a.mul(&b);
            // sample the boxes on a grid; every product must be enclosed
            for i in 0..=4 {
                for j in 0..=4 {
                    let x = &alo + (&ahi - &alo) * rat(i, 4);
                    let y = &blo + (&bhi - &blo) * rat(j, 4);
                    let v = x * y;
                    assert!(p.lo() <= &v && &v <= p.hi());
                }
            }
        }
    }

    #[test]
    fn comparison_is_strictly_certified() {
        let a = CertifiedScalar::enclosure(rint(1), rint(2));
        let b = CertifiedScalar::enclosure(rint(3), rint(4));
        assert_eq!(a.cmp_certified(&b), CertOrd::Less);
        assert_eq!(b.cmp_certified(&a), CertOrd::Greater);
        let c = CertifiedScalar::enclosure(rat(3, 2), rat(7, 2));
        assert_eq!(a.cmp_certified(&c), CertOrd::Overlapping);
        // touching endpoints are not a strict verdict
        let d = CertifiedScalar::enclosure(rint(2), rint(3));
        assert_eq!(a.cmp_certified(&d), CertOrd::Overlapping);
    }

    #[test]
    fn sqrt_respects_exactness_and_width() {
        let four = CertifiedScalar::exact(rint(4));
        assert_eq!(four.sqrt(8).unwrap(), CertifiedScalar::exact(rint(2)));
        let quarter = CertifiedScalar::exact(rat(9, 16));
        assert_eq!(quarter.sqrt(8).unwrap(), CertifiedScalar::exact(rat(3, 4)));
        let two = CertifiedScalar::exact(rint(2));
        let s = two.sqrt(53).unwrap();
        assert!(!s.is_exact());
        assert!(s.width() <= pow2(-53));
        let sq = s.mul(&s);
        assert!(sq.lo() <= &rint(2) && &rint(2) <= sq.hi());
        let neg = CertifiedScalar::exact(rint(-1));
        assert!(neg.sqrt(8).is_err());
    }

    #[test]
    fn degenerate_enclosure_collapses_to_exact() {
        let e = CertifiedScalar::enclosure(rat(1, 3), rat(1, 3));
        assert!(e.is_exact());
    }

    #[test]
    fn rounding_encloses_and_caps_denominators() {
        let x = CertifiedScalar::exact(rat(1, 3));
        let r = x.rounded(16);
        assert!(r.lo() <= x.lo() && x.hi() <= r.hi());
        assert!(r.width() <= pow2(-16));
        // dyadic endpoints: denominators are powers of two
        for end in [r.lo(), r.hi()] {
            let d = end.denom();
            assert!((d & (d - 1u32)) == num_bigint::BigInt::from(0));
        }
        // a dyadic input representable in the budget stays exact
        let y = CertifiedScalar::exact(rat(5, 8));
        assert!(y.rounded(16).is_exact());
        // rounding an enclosure widens both ends outward
        let e = CertifiedScalar::enclosure(rat(1, 3), rat(2, 3));
        let re = e.rounded(10);
        assert!(re.lo() <= e.lo() && e.hi() <= re.hi());
    }

    #[test]
    fn reciprocal_requires_strict_positivity() {
        let x = CertifiedScalar::enclosure(rat(1, 2), rint(2));
        let r = x.recip_positive().unwrap();
        assert_eq!(r.lo(), &rat(1, 2));
        assert_eq!(r.hi(), &rint(2));
        assert!(CertifiedScalar::zero().recip_positive().is_none());
        assert!(CertifiedScalar::enclosure(rint(-1), rint(1)).recip_positive().is_none());
        assert_eq!(
            CertifiedScalar::exact(rat(4, 7)).recip_positive().unwrap(),
            CertifiedScalar::exact(rat(7, 4))
        );
    }
}
