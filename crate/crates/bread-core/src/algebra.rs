//! Finitely presented elements of the ambient null-sequence algebra.
//!
//! Every element this library manipulates lives in the commutative algebra
//! of real sequences vanishing at infinity, with pointwise product.  The
//! working representation is
//!
//! * a polynomial (without constant term) in the diagonal generator
//!   `g = (2^(−i))_i`, stored as a sparse power → coefficient map, plus
//! * a finite map of per-coordinate corrections.
//!
//! The split is closed under the ring operations: corrections multiply
//! against the exactly evaluable polynomial part, and the polynomial parts
//! convolve.  Coordinates, sums, products and the supremum norm are all
//! exact rationals.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::numeric::{pow2, Rational};

/// A sequence of the form `p(g) + Σ_i c_i e_i` with `p(0) = 0` and finitely
/// many corrections `c_i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    /// Power `m ≥ 1` ↦ coefficient of `g^m`.
    poly: BTreeMap<u64, Rational>,
    /// Coordinate index `i ≥ 1` ↦ additive correction at that coordinate.
    corr: BTreeMap<u64, Rational>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    /// The diagonal generator `g`, coordinates `2^(−i)`.
    pub fn g() -> Self {
        Element::monomial(1, Rational::one())
    }

    /// `c · g^m` for `m ≥ 1`.
    pub fn monomial(m: u64, c: Rational) -> Self {
        assert!(m >= 1, "constant terms do not vanish at infinity");
        let mut poly = BTreeMap::new();
        if !c.is_zero() {
            poly.insert(m, c);
        }
        Element { poly, corr: BTreeMap::new() }
    }

    /// The coordinate idempotent `e_i` (1-based).
    pub fn e(i: u64) -> Self {
        assert!(i >= 1, "coordinates are 1-based");
        let mut corr = BTreeMap::new();
        corr.insert(i, Rational::one());
        Element { poly: BTreeMap::new(), corr }
    }

    /// The finite partial-identity `P_k = e_1 + … + e_k`.
    pub fn pn(k: u64) -> Self {
        let mut corr = BTreeMap::new();
        for i in 1..=k {
            corr.insert(i, Rational::one());
        }
        Element { poly: BTreeMap::new(), corr }
    }

    /// `g_k = 2^k g ∧ 1`, coordinates `min(2^(k−i), 1)`: the scaled copy of
    /// `g` truncated at height one.
    pub fn gn(k: u64) -> Self {
        assert!(k <= i64::MAX as u64 / 4, "scale exponent too large");
        let mut out = Element::monomial(1, pow2(k as i64));
        for i in 1..=k {
            // coordinate wants 1, the polynomial part contributes 2^(k−i)
            let fix = Rational::one() - pow2(k as i64 - i as i64);
            if !fix.is_zero() {
                out.corr.insert(i, fix);
            }
        }
        out
    }

    /// Build a finitely supported sequence from explicit coordinates.
    pub fn from_coords<I: IntoIterator<Item = (u64, Rational)>>(coords: I) -> Self {
        let mut corr = BTreeMap::new();
        for (i, c) in coords {
            assert!(i >= 1, "coordinates are 1-based");
            if !c.is_zero() {
                corr.insert(i, c);
            }
        }
        Element { poly: BTreeMap::new(), corr }
    }

    pub fn poly(&self) -> &BTreeMap<u64, Rational> {
        &self.poly
    }

    pub fn corrections(&self) -> &BTreeMap<u64, Rational> {
        &self.corr
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty() && self.corr.is_empty()
    }

    /// Exact value of coordinate `i ≥ 1`.
    pub fn coord(&self, i: u64) -> Rational {
        assert!(i >= 1, "coordinates are 1-based");
        let mut v = self.poly_value_at(i);
        if let Some(c) = self.corr.get(&i) {
            v += c;
        }
        v
    }

    /// `p(2^(−i))`, the polynomial part evaluated at coordinate `i`.
    fn poly_value_at(&self, i: u64) -> Rational {
        let mut v = Rational::zero();
        for (m, c) in &self.poly {
            let e = (i as i128) * (*m as i128);
            assert!(e <= i64::MAX as i128, "coordinate exponent overflow");
            v += c * pow2(-(e as i64));
        }
        v
    }

    fn normalized(mut self) -> Self {
        self.poly.retain(|_, c| !c.is_zero());
        self.corr.retain(|_, c| !c.is_zero());
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.poly {
            *out.poly.entry(*m).or_insert_with(Rational::zero) += c;
        }
        for (i, c) in &other.corr {
            *out.corr.entry(*i).or_insert_with(Rational::zero) += c;
        }
        out.normalized()
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.poly.values_mut() {
            *c = -c.clone();
        }
        for c in out.corr.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Element::zero();
        }
        let mut out = self.clone();
        for v in out.poly.values_mut() {
            *v *= c;
        }
        for v in out.corr.values_mut() {
            *v *= c;
        }
        out
    }

    /// Pointwise product.  Polynomial parts convolve; a correction meets the
    /// other factor through that factor's exact coordinate value.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Element::default();
        for (m1, c1) in &self.poly {
            for (m2, c2) in &other.poly {
                *out.poly.entry(m1 + m2).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        for (i, d) in &other.corr {
            let v = self.poly_value_at(*i) * d;
            if !v.is_zero() {
                *out.corr.entry(*i).or_insert_with(Rational::zero) += v;
            }
        }
        for (i, c) in &self.corr {
            let mut v = other.poly_value_at(*i) * c;
            if let Some(d) = other.corr.get(i) {
                v += c * d;
            }
            if !v.is_zero() {
                *out.corr.entry(*i).or_insert_with(Rational::zero) += v;
            }
        }
        out.normalized()
    }

    /// `k`-fold pointwise power, `k ≥ 1`.
    pub fn pow(&self, k: u64) -> Self {
        assert!(k >= 1, "the algebra has no identity for an empty product");
        let mut out = self.clone();
        for _ in 1..k {
            out = out.mul(self);
        }
        out
    }

    /// Largest corrected coordinate index (0 when there are none).
    pub fn max_correction_index(&self) -> u64 {
        self.corr.keys().next_back().copied().unwrap_or(0)
    }

    /// Exact supremum norm `sup_i |x_i|`.
    ///
    /// Coordinates are scanned left to right; past the last correction the
    /// tail is pure polynomial and `|p(2^(−i))| ≤ (Σ_m |c_m|)·2^(−i·m₀)`
    /// with `m₀` the least power, so the scan stops as soon as that decaying
    /// bound falls to the best value already seen.
    pub fn c0_norm(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let abs_sum: Rational = self.poly.values().map(|c| c.abs()).sum();
        let m0 = self.poly.keys().next().copied();
        let last_corr = self.max_correction_index();
        let mut best = Rational::zero();
        let mut i: u64 = 1;
        loop {
            if i > last_corr {
                let Some(m0) = m0 else { break };
                let e = (i as i128) * (m0 as i128);
                assert!(e <= i64::MAX as i128, "norm scan exponent overflow");
                if abs_sum.clone() * pow2(-(e as i64)) <= best {
                    break;
                }
            }
            let v = self.coord(i).abs();
            if v > best {
                best = v;
            }
            i += 1;
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, rint};

    #[test]
    fn generators_have_expected_coordinates() {
        let g = Element::g();
        assert_eq!(g.coord(1), rat(1, 2));
        assert_eq!(g.coord(2), rat(1, 4));

        let e3 = Element::e(3);
        assert_eq!(e3.coord(3), rint(1));
        assert_eq!(e3.coord(2), rint(0));

        let p2 = Element::pn(2);
        assert_eq!((p2.coord(1), p2.coord(2), p2.coord(3)), (rint(1), rint(1), rint(0)));

        // g_2 has coordinates min(2^(2−i), 1): 1, 1, 1/2, 1/4, …
        let g2 = Element::gn(2);
        assert_eq!(g2.coord(1), rint(1));
        assert_eq!(g2.coord(2), rint(1));
        assert_eq!(g2.coord(3), rat(1, 2));
        assert_eq!(g2.coord(4), rat(1, 4));
        // and its stored correction is the single entry {1 ↦ −1}
        assert_eq!(g2.corrections().len(), 1);
        assert_eq!(g2.corrections().get(&1), Some(&rint(-1)));
    }

    #[test]
    fn product_matches_pointwise_coordinates() {
        let samples = [
            Element::g(),
            Element::gn(3),
            Element::e(2).add(&Element::g().scale(&rat(3, 5))),
            Element::pn(4).sub(&Element::monomial(2, rat(7, 2))),
            Element::from_coords([(1, rat(1, 3)), (5, rat(-2, 7))]),
        ];
        for x in &samples {
            for y in &samples {
                let p = x.mul(y);
                for i in 1..=40u64 {
                    assert_eq!(p.coord(i), x.coord(i) * y.coord(i), "coordinate {i}");
                }
            }
        }
    }

    #[test]
    fn powers_agree_with_repeated_products() {
        let x = Element::gn(2).add(&Element::e(3).scale(&rat(-1, 2)));
        let mut acc = x.clone();
        for k in 2..=5u64 {
            acc = acc.mul(&x);
            assert_eq!(x.pow(k), acc);
        }
    }

    #[test]
    fn supremum_norms_are_exact() {
        assert_eq!(Element::g().c0_norm(), rat(1, 2));
        assert_eq!(Element::e(5).c0_norm(), rint(1));
        assert_eq!(Element::gn(7).c0_norm(), rint(1));
        assert_eq!(Element::pn(3).c0_norm(), rint(1));
        assert_eq!(Element::zero().c0_norm(), rint(0));
        assert_eq!(Element::g().scale(&rint(-4)).c0_norm(), rint(2));

        // cancel the first coordinate; the supremum moves past the support
        let x = Element::g().add(&Element::e(1).scale(&rat(-1, 2)));
        assert_eq!(x.coord(1), rint(0));
        assert_eq!(x.c0_norm(), rat(1, 4));

        // a correction that nearly cancels: the tail scan must still find 1/4
        let y = Element::g().add(&Element::e(1).scale(&rat(-49, 100)));
        assert_eq!(y.c0_norm(), rat(1, 4));
    }

    #[test]
    #[should_panic(expected = "no identity")]
    fn zeroth_power_is_rejected() {
        let _ = Element::g().pow(0);
    }

    #[test]
    fn linear_operations_normalize() {
        let x = Element::g().sub(&Element::g());
        assert!(x.is_zero());
        let y = Element::e(4).add(&Element::e(4).neg());
        assert!(y.is_zero());
        assert_eq!(Element::g().scale(&rint(0)), Element::zero());
    }
}
