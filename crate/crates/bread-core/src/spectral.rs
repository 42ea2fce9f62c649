//! Truncated diagonal models and their spectral idempotents, plus a weighted
//! pointwise comparison algebra.
//!
//! Multiplication by the diagonal generator on the span of the first `m`
//! unit vectors is the diagonal matrix with entries `2^(−j)`; its spectrum
//! is exactly those `m` points.  The spectral idempotent at `2^(−j)` is
//! recovered along two independent routes:
//!
//! * **Partial fractions.**  The resolvent of a diagonal matrix splits as
//!   `(z − D)⁻¹ = Σ_i e_i/(z − μ_i)`, so the contour integral around an
//!   eigenvalue is decided *exactly*: entry `i` of the idempotent is `1`
//!   precisely when `μ_i` lies strictly inside the circle, and the geometry
//!   (no eigenvalue on the contour) is checked in rational arithmetic.
//! * **Contour quadrature.**  The same integral by the trapezoid rule on
//!   the circle in complex floating point; the quadrature error is
//!   *reported* by comparison with a doubled node count, never asserted
//!   from an a-priori formula.
//!
//! The unit vectors also come out of a plain polynomial in the generator
//! (no constant term), which is the finite-stage form of the statement that
//! the generator and the idempotents generate the algebra.
//!
//! The weighted comparison algebra multiplies pointwise with weight
//! `2^(−n)` at coordinate `n`.  There the rescaled unit vectors `2ⁿeₙ` are
//! idempotents, the coordinate functionals `x ↦ 2^(−n)xₙ` are multiplicative,
//! and the powers of the all-ones generator decay geometrically — the small
//! worked example contrasting with the main construction.

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{pow2, rat, rint, Rational};

// === the truncated diagonal model ===

/// Multiplication by the diagonal generator on the first `m` coordinates:
/// the diagonal matrix `diag(2^(−1), …, 2^(−m))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedModel {
    m: usize,
}

impl TruncatedModel {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "the model needs at least one coordinate");
        assert!(m <= 1 << 16, "truncation too large to materialize");
        TruncatedModel { m }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The eigenvalue at coordinate `j` (1-based): `2^(−j)`.
    pub fn eigenvalue(&self, j: usize) -> Rational {
        assert!(j >= 1 && j <= self.m, "coordinate out of range");
        pow2(-(j as i64))
    }

    /// The full spectrum, in coordinate order.
    pub fn spectrum(&self) -> Vec<Rational> {
        (1..=self.m).map(|j| self.eigenvalue(j)).collect()
    }

    /// The contour radius `2^(−j)/radius_den` used around eigenvalue `j`.
    pub fn contour_radius(&self, j: usize, radius_den: u64) -> Rational {
        assert!(radius_den >= 1);
        self.eigenvalue(j) / rint(radius_den as i64)
    }

    /// Validate the circle `|z − 2^(−j)| = r` against the spectrum: no
    /// eigenvalue may lie on it.  Returns, for each coordinate, whether its
    /// eigenvalue lies strictly inside.
    fn enclosed(&self, j: usize, radius_den: u64) -> Result<Vec<bool>> {
        let c = self.eigenvalue(j);
        let r = self.contour_radius(j, radius_den);
        let mut inside = Vec::with_capacity(self.m);
        for i in 1..=self.m {
            let dist = (self.eigenvalue(i) - &c).abs();
            if dist == r {
                return Err(Error::ContourOnSpectrum(self.eigenvalue(i)));
            }
            inside.push(dist < r);
        }
        Ok(inside)
    }

    /// Spectral idempotent at eigenvalue `2^(−j)` by exact partial
    /// fractions: the residue of the diagonal resolvent at coordinate `i`
    /// contributes `1` exactly when its eigenvalue lies inside the contour.
    ///
    /// With the default geometry (`radius_den = 3`; any `radius_den ≥ 3`
    /// works, since the nearest eigenvalues sit at distance `2^(−j−1)`)
    /// only `2^(−j)` itself is enclosed and the result is the unit vector
    /// `e_j` exactly.
    pub fn spectral_idempotent(&self, j: usize, radius_den: u64) -> Result<Vec<Rational>> {
        let inside = self.enclosed(j, radius_den)?;
        Ok(inside
            .into_iter()
            .map(|b| if b { Rational::one() } else { Rational::zero() })
            .collect())
    }

    /// The same contour integral by the `k`-point trapezoid rule:
    /// `(1/2πi) ∮ (z − D)⁻¹ dz ≈ (r/k) Σ_t e^(iθ_t) (z_t − D)⁻¹`
    /// on the circle of radius `r = 2^(−j)/radius_den` about `2^(−j)`.
    ///
    /// The geometry is validated exactly first, so the quadrature never
    /// divides by zero.  The reported error bound is empirical: the
    /// supremum-norm distance to the doubled-node answer.
    pub fn contour_idempotent(
        &self,
        j: usize,
        radius_den: u64,
        k: usize,
    ) -> Result<(Vec<Complex64>, f64)> {
        assert!(k >= 4, "too few quadrature nodes to mean anything");
        self.enclosed(j, radius_den)?;
        let coarse = self.trapezoid(j, radius_den, k);
        let fine = self.trapezoid(j, radius_den, 2 * k);
        let err = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        Ok((coarse, err))
    }

    fn trapezoid(&self, j: usize, radius_den: u64, k: usize) -> Vec<Complex64> {
        let c = self.eigenvalue(j).to_f64().expect("eigenvalues are tame");
        let r = self
            .contour_radius(j, radius_den)
            .to_f64()
            .expect("radii are tame");
        let mut out = vec![Complex64::new(0.0, 0.0); self.m];
        for t in 0..k {
            let theta = 2.0 * std::f64::consts::PI * (t as f64) / (k as f64);
            let w = Complex64::from_polar(1.0, theta);
            let z = Complex64::new(c, 0.0) + w * r;
            for (i, entry) in out.iter_mut().enumerate() {
                let mu = pow2(-(i as i64 + 1)).to_f64().expect("tame");
                *entry += w * r / (z - mu) / (k as f64);
            }
        }
        out
    }

    /// Exact coefficients `c_1, …, c_m` of a polynomial `p(y) = Σ_t c_t y^t`
    /// (no constant term) with `p(D) = e_j` on the model — the finite-stage
    /// witness that the generator and its powers reach every unit vector.
    pub fn generating_polynomial(&self, j: usize) -> Vec<Rational> {
        assert!(j >= 1 && j <= self.m);
        // p(y) = y·q(y) with q interpolating δ_ij/μ_i at the m nodes
        let nodes = self.spectrum();
        let values: Vec<Rational> = (1..=self.m)
            .map(|i| {
                if i == j {
                    Rational::one() / self.eigenvalue(j)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        // Lagrange coefficients of q (degree m−1), then shift by one power
        let mut q = vec![Rational::zero(); self.m];
        for i in 0..self.m {
            if values[i].is_zero() {
                continue;
            }
            // basis polynomial Π_{l≠i} (y − x_l)/(x_i − x_l)
            let mut basis = vec![Rational::zero(); self.m];
            basis[0] = Rational::one();
            let mut deg = 0;
            let mut denom = Rational::one();
            for l in 0..self.m {
                if l == i {
                    continue;
                }
                basis[deg + 1] = basis[deg].clone();
                for t in (1..=deg).rev() {
                    let shifted = basis[t - 1].clone();
                    basis[t] = shifted - &nodes[l] * &basis[t];
                }
                basis[0] = -(&nodes[l] * &basis[0]);
                deg += 1;
                denom *= &nodes[i] - &nodes[l];
            }
            let scale = &values[i] / denom;
            for t in 0..self.m {
                q[t] = &q[t] + &basis[t] * &scale;
            }
        }
        q // coefficient of y^t in q = coefficient of y^(t+1) in p
    }

    /// Evaluate a constant-term-free polynomial (coefficients of
    /// `y¹, y², …`) at a point.
    pub fn eval_generating_polynomial(coeffs: &[Rational], y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in coeffs.iter().rev() {
            acc = (acc + c) * y;
        }
        acc
    }

    /// Exact lower bound `min_j |2^(−j) − λ|` on `‖(D − λ)x‖/‖x‖`: the
    /// distance from `λ` to the spectrum of the truncated model.  Errors if
    /// `λ` *is* an eigenvalue, where the probe is vacuous.
    pub fn approximate_point_spectrum_probe(&self, lambda: &Rational) -> Result<Rational> {
        let mut best: Option<Rational> = None;
        for i in 1..=self.m {
            let d = (self.eigenvalue(i) - lambda).abs();
            if d.is_zero() {
                return Err(Error::ProbeAtEigenvalue(lambda.clone()));
            }
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        }
        Ok(best.expect("m >= 1"))
    }
}

// === the weighted pointwise comparison algebra ===

/// Finite truncation of the weighted algebra with product
/// `(x·y)_n = 2^(−n) x_n y_n` and generator `T = (1, 1, …, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MirkilAlgebra {
    n: usize,
}

impl MirkilAlgebra {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        MirkilAlgebra { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The weighted pointwise product.
    pub fn product(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        (0..self.n)
            .map(|i| pow2(-(i as i64 + 1)) * &x[i] * &y[i])
            .collect()
    }

    /// The all-ones generator.
    pub fn generator(&self) -> Vec<Rational> {
        vec![Rational::one(); self.n]
    }

    /// The rescaled unit vector `2^j e_j`, idempotent under the product.
    pub fn idempotent(&self, j: usize) -> Vec<Rational> {
        assert!(j >= 1 && j <= self.n);
        let mut v = vec![Rational::zero(); self.n];
        v[j - 1] = pow2(j as i64);
        v
    }

    /// The multiplicative coordinate functional `x ↦ 2^(−j) x_j`.
    pub fn character(&self, j: usize, x: &[Rational]) -> Rational {
        assert!(j >= 1 && j <= self.n);
        pow2(-(j as i64)) * &x[j - 1]
    }

    /// `k`-fold product power, `k ≥ 1`.
    pub fn power(&self, x: &[Rational], k: u64) -> Vec<Rational> {
        assert!(k >= 1);
        let mut out = x.to_vec();
        for _ in 1..k {
            out = self.product(&out, x);
        }
        out
    }

    /// Exact supremum norm on the truncation.
    pub fn sup_norm(&self, x: &[Rational]) -> Rational {
        x.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
    }
}

/// What the verification of the weighted algebra found.
#[derive(Debug, Clone)]
pub struct MirkilReport {
    pub n: usize,
    /// Associativity and commutativity on random triples, exact.
    pub product_laws_hold: bool,
    /// `(2^j e_j)·(2^j e_j) = 2^j e_j` for all `j ≤ n`, exact.
    pub idempotents_hold: bool,
    /// `T·e_j = 2^(−j) e_j` — the coordinate functional evaluates the
    /// generator to `2^(−j)` — for all `j ≤ n`, exact.
    pub characters_hold: bool,
    /// `(k, ‖T^k‖_∞)` for small `k`: the norms `2^(−(k−1))`, decaying
    /// geometrically — reported, not asserted.
    pub power_norms: Vec<(u64, Rational)>,
    /// `(k, max_{i > n/2} |T^k_i|)`: how far the powers stick out of the
    /// first half of the coordinates — reported, not asserted.
    pub tail_residuals: Vec<(u64, Rational)>,
}

impl MirkilReport {
    pub fn all_hold(&self) -> bool {
        self.product_laws_hold && self.idempotents_hold && self.characters_hold
    }
}

/// Verify the weighted algebra's exact structure on the size-`n` truncation.
pub fn mirkil_verify(n: usize) -> MirkilReport {
    let alg = MirkilAlgebra::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d69726b);
    let mut rand_vec = || -> Vec<Rational> {
        (0..n).map(|_| rat(rng.gen_range(-20..=20), 1 + rng.gen_range(0..7))).collect()
    };

    let mut product_laws_hold = true;
    for _ in 0..25 {
        let (x, y, z) = (rand_vec(), rand_vec(), rand_vec());
        let assoc = alg.product(&alg.product(&x, &y), &z) == alg.product(&x, &alg.product(&y, &z));
        let comm = alg.product(&x, &y) == alg.product(&y, &x);
        product_laws_hold &= assoc && comm;
    }

    let mut idempotents_hold = true;
    let mut characters_hold = true;
    let t = alg.generator();
    for j in 1..=n {
        let e = alg.idempotent(j);
        idempotents_hold &= alg.product(&e, &e) == e;
        // T acts on the idempotent by the scalar 2^(−j)
        let te = alg.product(&t, &e);
        let scaled: Vec<Rational> = e.iter().map(|v| v * pow2(-(j as i64))).collect();
        characters_hold &= te == scaled;
        characters_hold &= alg.character(j, &t) == pow2(-(j as i64));
    }

    let mut power_norms = Vec::new();
    let mut tail_residuals = Vec::new();
    let cut = n / 2;
    for k in 1..=6u64 {
        let p = alg.power(&t, k);
        power_norms.push((k, alg.sup_norm(&p)));
        let tail = p[cut..]
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero);
        tail_residuals.push((k, tail));
    }

    MirkilReport {
        n,
        product_laws_hold,
        idempotents_hold,
        characters_hold,
        power_norms,
        tail_residuals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_fractions_recover_every_unit_vector() {
        let model = TruncatedModel::new(10);
        let mut sum = vec![Rational::zero(); 10];
        for j in 1..=10 {
            let p = model.spectral_idempotent(j, 3).unwrap();
            for (i, v) in p.iter().enumerate() {
                assert_eq!(*v, if i + 1 == j { rint(1) } else { rint(0) }, "j={j}, i={}", i + 1);
            }
            for (s, v) in sum.iter_mut().zip(&p) {
                *s = &*s + v;
            }
        }
        // functional-calculus consistency: the idempotents sum to the identity
        assert!(sum.iter().all(|v| *v == rint(1)));
    }

    #[test]
    fn contour_through_an_eigenvalue_is_rejected() {
        // radius 2^(−j)/2 passes exactly through the next eigenvalue
        let model = TruncatedModel::new(10);
        match model.spectral_idempotent(3, 2) {
            Err(Error::ContourOnSpectrum(mu)) => assert_eq!(mu, rat(1, 16)),
            other => panic!("expected a geometry error, got {other:?}"),
        }
        // a huge circle swallows neighbours: still exact, no longer a unit
        // vector — the projection of the whole enclosed cluster
        let p = model.spectral_idempotent(1, 1_000_000).unwrap();
        assert_eq!(p.iter().filter(|v| **v == rint(1)).count(), 1);
    }

    #[test]
    fn quadrature_error_shrinks_geometrically() {
        let model = TruncatedModel::new(10);
        let exact = model.spectral_idempotent(3, 3).unwrap();
        let sup_err = |v: &[Complex64]| -> f64 {
            v.iter()
                .zip(&exact)
                .map(|(a, b)| (a - Complex64::new(b.to_f64().unwrap(), 0.0)).norm())
                .fold(0.0f64, f64::max)
        };
        let mut errs = Vec::new();
        for k in [16usize, 32, 64] {
            let (v, reported) = model.contour_idempotent(3, 3, k).unwrap();
            errs.push(sup_err(&v));
            assert!(reported >= 0.0);
        }
        assert!(errs[1] < errs[0] / 4.0, "{errs:?}");
        assert!(errs[2] < errs[1] / 4.0, "{errs:?}");
    }

    #[test]
    fn tighter_contour_reaches_twelve_digits_at_sixty_four_nodes() {
        let model = TruncatedModel::new(10);
        let exact = model.spectral_idempotent(3, 4).unwrap();
        let (v, reported) = model.contour_idempotent(3, 4, 64).unwrap();
        let err = v
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - Complex64::new(b.to_f64().unwrap(), 0.0)).norm())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-12, "sup error {err}");
        // the reported doubled-node estimate is in the same regime
        assert!(reported < 1e-11, "reported {reported}");
    }

    #[test]
    fn unit_vectors_are_polynomials_in_the_generator() {
        let model = TruncatedModel::new(6);
        for j in 1..=6 {
            let coeffs = model.generating_polynomial(j);
            for i in 1..=6 {
                let v = TruncatedModel::eval_generating_polynomial(&coeffs, &model.eigenvalue(i));
                assert_eq!(v, if i == j { rint(1) } else { rint(0) });
            }
            // no constant term by construction: p(0) = 0
            let z = TruncatedModel::eval_generating_polynomial(&coeffs, &rint(0));
            assert_eq!(z, rint(0));
        }
    }

    #[test]
    fn model_membership_and_orthogonality() {
        // e_j = 2^j · (g·e_j): multiplication by the generator rescales by
        // the eigenvalue, exactly
        let model = TruncatedModel::new(8);
        for j in 1..=8usize {
            let scaled = model.eigenvalue(j) * pow2(j as i64);
            assert_eq!(scaled, rint(1));
        }
        // pointwise products of distinct unit vectors vanish
        for i in 1..=8usize {
            for j in 1..=8usize {
                let prod: Vec<Rational> = (1..=8)
                    .map(|t| {
                        let a = if t == i { rint(1) } else { rint(0) };
                        let b = if t == j { rint(1) } else { rint(0) };
                        a * b
                    })
                    .collect();
                let expect_nonzero = i == j;
                assert_eq!(prod.iter().any(|v| !v.is_zero()), expect_nonzero);
            }
        }
    }

    #[test]
    fn spectrum_distance_probe_is_exact() {
        let model = TruncatedModel::new(4);
        assert_eq!(model.approximate_point_spectrum_probe(&rat(1, 3)).unwrap(), rat(1, 12));
        assert_eq!(model.approximate_point_spectrum_probe(&rint(0)).unwrap(), rat(1, 16));
        assert_eq!(
            model.approximate_point_spectrum_probe(&pow2(-10)).unwrap(),
            rat(63, 1024)
        );
        match model.approximate_point_spectrum_probe(&rat(1, 2)) {
            Err(Error::ProbeAtEigenvalue(l)) => assert_eq!(l, rat(1, 2)),
            other => panic!("expected the vacuous-probe error, got {other:?}"),
        }
    }

    #[test]
    fn weighted_algebra_structure_is_exact() {
        let report = mirkil_verify(20);
        assert!(report.all_hold());
        // ‖T^k‖∞ = 2^(−(k−1)), peaking at the first coordinate
        for (k, norm) in &report.power_norms {
            assert_eq!(*norm, pow2(-(*k as i64 - 1)));
        }
        // tail residual beyond n/2: the first surviving coordinate is 11
        for (k, tail) in &report.tail_residuals {
            assert_eq!(*tail, pow2(-11 * (*k as i64 - 1)));
        }
        // an explicitly pinned idempotent: (8e₃)·(8e₃) = 8e₃
        let alg = MirkilAlgebra::new(4);
        let e = alg.idempotent(3);
        assert_eq!(e[2], rint(8));
        assert_eq!(alg.product(&e, &e), e);
    }
}
