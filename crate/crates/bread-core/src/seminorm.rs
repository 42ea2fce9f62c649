//! The stage seminorm: closed form, enumeration oracle, and the split of
//! `‖γ₀‖²` into its quantitative parts.
//!
//! The seminorm is `‖x‖² = Σ_𝐢 |φ(s^𝐢 x)|²`, summed over *all* finitely
//! supported index functions 𝐢 on the generator family.  Two independent
//! routes compute it:
//!
//! * **Closed form.**  Because a scaled coordinate annihilates every other
//!   coordinate, the coordinate-generator powers collapse into a diagonal
//!   correction, and the remaining geometric series factor per generator:
//!
//!   `G_{jk} = λ_j λ_k · Π_s (1 − s_j s_k)^(−1) · (1 + δ_{jk}/(a_j² − 1))`
//!
//!   over the non-coordinate generators `s`, giving `‖x‖² = xᵀGx` exactly.
//!   Convergence needs every generator's window radius below one, which is
//!   checked, not assumed.
//!
//! * **Enumeration.**  A DFS over non-coordinate index tuples of bounded
//!   total degree, with the coordinate-power tail summed in closed form per
//!   tuple.  Truncating the closed form at the same degree must agree with
//!   the enumeration *exactly*, coefficient for coefficient.
//!
//! The decomposition of `‖γ₀‖²` follows the index-shift identity: tuples
//! using the window shift at least once contribute exactly `‖γ₁‖²`, and the
//! rest splits into low-degree (`I₁`), high-degree (`I₂`) and
//! coordinate-power (`I₃`) parts with `‖γ₀‖² = ‖γ₁‖² + I₁ + I₂ + I₃` as an
//! identity of rationals.

use num_traits::{One, Signed, Zero};

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::functional::StageFunctional;
use crate::linalg::{self, Matrix, PsdOutcome};
use crate::numeric::{isqrt, pow2, rat, rint, CertifiedScalar, Rational};
use crate::sequence::conditions::Verdict;
use crate::stage::Generator;

/// Budget on the number of enumerated index tuples.
pub const ENUM_BUDGET: u64 = 2_000_000;

/// Largest window dimension at which the decomposition sums run in exact
/// rational arithmetic.  Beyond it, the cross-pair sums would accumulate
/// hundreds of pairwise-coprime odd denominators (the exact values reach
/// ~10⁵-bit denominators at dimension 37), so the sums switch to certified
/// dyadic enclosures instead.
pub const EXACT_DECOMP_DIM: usize = 24;

/// Working precision for a stage's certified sums: enough bits to resolve
/// the `2^(−2·a_{n+1}²/3)` comparison with a wide margin, capped so that a
/// huge window degrades to honest `Inconclusive`-style width rather than
/// an unpayable bit budget.
pub fn stage_bits(window_end: u64) -> u32 {
    let wanted = window_end.saturating_mul(window_end).saturating_mul(4);
    wanted.clamp(1024, 65_536) as u32
}

/// A stage with its Gram matrix materialized.
#[derive(Debug, Clone)]
pub struct StageSeminorm {
    sf: StageFunctional,
    gram: Matrix,
}

impl StageSeminorm {
    /// Build the Gram matrix of the stage.  Errors with `Divergent` if any
    /// non-coordinate generator has window radius ≥ 1 (the defining series
    /// would not converge).
    pub fn new(sf: StageFunctional) -> Result<Self> {
        let stage = sf.stage();
        for gen in stage.non_coordinate_generators() {
            let r = stage.generator_radius(gen);
            if r >= rint(1) {
                return Err(Error::Divergent { name: gen.describe(), n: stage.n() as usize });
            }
        }
        let d = stage.dimension();
        let lambda = sf.lambda();
        let non_e: Vec<Vec<Rational>> = stage
            .non_coordinate_generators()
            .into_iter()
            .map(|g| stage.generator_coords(g))
            .collect();
        let mut gram = vec![vec![Rational::zero(); d]; d];
        for j in 0..d {
            for k in j..d {
                let mut factor = Rational::one();
                for s in &non_e {
                    let q = &s[j] * &s[k];
                    debug_assert!(q.abs() < rint(1));
                    factor /= rint(1) - q;
                }
                let mut v = &lambda[j] * &lambda[k] * factor;
                if j == k {
                    let a = stage.scale_at(j);
                    assert!(a >= 2, "window scalings are at least 2");
                    let a2 = rint(a as i64) * rint(a as i64);
                    v = &v * (rint(1) + rint(1) / (a2 - rint(1)));
                }
                gram[j][k] = v.clone();
                gram[k][j] = v;
            }
        }
        Ok(StageSeminorm { sf, gram })
    }

    pub fn functional(&self) -> &StageFunctional {
        &self.sf
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// `‖x‖²` for window coordinates `x`, exact.
    pub fn seminorm_sq(&self, coords: &[Rational]) -> Rational {
        linalg::quadratic_form(&self.gram, coords)
    }

    /// `‖x‖²` as a certified enclosure with outward rounding at `bits` —
    /// the only affordable route once the window dimension makes the exact
    /// cross-pair sums explode.
    pub fn seminorm_sq_certified(&self, coords: &[Rational], bits: u32) -> CertifiedScalar {
        linalg::quadratic_form_certified(&self.gram, coords, bits)
    }

    /// `‖x‖²` of an ambient element, through its window compression.
    pub fn seminorm_sq_element(&self, x: &Element) -> Rational {
        self.seminorm_sq(&self.sf.stage().window_coords(x))
    }

    /// `‖x‖` as a certified enclosure of width `2^(−bits)`.
    pub fn seminorm(&self, coords: &[Rational], bits: u32) -> Result<CertifiedScalar> {
        CertifiedScalar::exact(self.seminorm_sq(coords)).sqrt(bits)
    }

    /// The closed form truncated at non-coordinate total degree ≤ `degree`:
    /// per pair, the degree-capped convolution of the generators' geometric
    /// series, with the full coordinate-power tail on the diagonal.
    pub fn gram_truncated(&self, degree: u64) -> Matrix {
        let stage = self.sf.stage();
        let d = stage.dimension();
        let lambda = self.sf.lambda();
        let non_e: Vec<Vec<Rational>> = stage
            .non_coordinate_generators()
            .into_iter()
            .map(|g| stage.generator_coords(g))
            .collect();
        let dd = degree as usize;
        let mut out = vec![vec![Rational::zero(); d]; d];
        for j in 0..d {
            for k in j..d {
                // T_D(j,k): degree-indexed coefficients of Π_s Σ_i (s_j s_k)^i
                let mut t = vec![Rational::zero(); dd + 1];
                t[0] = Rational::one();
                for s in &non_e {
                    let q = &s[j] * &s[k];
                    // convolve with (1, q, q², …) capped at degree dd
                    for idx in 1..=dd {
                        let carry = &t[idx - 1] * &q;
                        t[idx] = &t[idx] + carry;
                    }
                }
                let t_sum: Rational = t.iter().sum();
                let mut v = &lambda[j] * &lambda[k] * &t_sum;
                if j == k {
                    let a = stage.scale_at(j) as i64;
                    let diag = &lambda[j] * &lambda[j] * &t_sum;
                    v = v + diag / (rint(a) * rint(a) - rint(1));
                }
                out[j][k] = v.clone();
                out[k][j] = v;
            }
        }
        out
    }

    /// Enumeration oracle: cumulative sums of `Σ_𝐢 |φ(s^𝐢 x)|²` by total
    /// non-coordinate degree `0, 1, …, degree`.  Entry `D` of the result is
    /// the exact sum over all tuples of non-coordinate degree ≤ `D` with
    /// the coordinate tail in closed form — term for term what the
    /// truncated Gram form must reproduce.
    pub fn enumeration_partials(&self, coords: &[Rational], degree: u64) -> Result<Vec<Rational>> {
        let stage = self.sf.stage();
        assert_eq!(coords.len(), stage.dimension());
        let non_e: Vec<Vec<Rational>> = stage
            .non_coordinate_generators()
            .into_iter()
            .map(|g| stage.generator_coords(g))
            .collect();
        check_tuple_budget(degree, non_e.len() as u64)?;
        let scales: Vec<Rational> = (0..stage.dimension())
            .map(|o| {
                let a = rint(stage.scale_at(o) as i64);
                rint(1) / (&a * &a - rint(1))
            })
            .collect();
        let w0: Vec<Rational> =
            self.sf.lambda().iter().zip(coords).map(|(l, x)| l * x).collect();
        let mut buckets = vec![Rational::zero(); degree as usize + 1];
        enumerate(&non_e, 0, degree, &w0, &scales, degree, &mut buckets);
        // cumulative
        for i in 1..buckets.len() {
            let prev = buckets[i - 1].clone();
            buckets[i] += prev;
        }
        Ok(buckets)
    }

    /// The full enumeration sum at one degree cap.
    pub fn enumeration_partial(&self, coords: &[Rational], degree: u64) -> Result<Rational> {
        Ok(self.enumeration_partials(coords, degree)?.pop().expect("nonempty"))
    }

    /// PSD certificate that multiplication by a generator contracts the
    /// seminorm: `G − D_s G D_s ⪰ 0` with `D_s` the generator's diagonal.
    pub fn contraction_certificate(&self, gen: Generator) -> PsdOutcome {
        let s = self.sf.stage().generator_coords(gen);
        let d = s.len();
        let mut m = self.gram.clone();
        for j in 0..d {
            for k in 0..d {
                let scaled = &self.gram[j][k] * &s[j] * &s[k];
                m[j][k] = &m[j][k] - &scaled;
            }
        }
        linalg::psd_check(&m)
    }

    /// Split `‖γ₀‖²` along the index-shift identity.  `budget` caps the
    /// number of enumerated low-degree tuples; past it, `I₁` and `I₂`
    /// degrade to the honest enclosure `[0, I₁+I₂]`.
    ///
    /// Small windows (dimension ≤ [`EXACT_DECOMP_DIM`]) run entirely in
    /// exact rationals and the partition identity is an equality of
    /// rationals.  Larger windows accumulate with outward rounding at
    /// [`stage_bits`] bits; every reported quantity is then an enclosure
    /// and the identity is checked as enclosure consistency.
    pub fn gamma_decomposition(&self, budget: u64) -> GammaDecomposition {
        let stage = self.sf.stage();
        let d = stage.dimension();
        let exact = d <= EXACT_DECOMP_DIM;
        let bits = stage_bits(stage.window_end());
        let round = |x: CertifiedScalar| if exact { x } else { x.rounded(bits) };

        let lambda = self.sf.lambda();
        let g0_sq = if exact {
            CertifiedScalar::exact(self.seminorm_sq(&stage.gamma(0)))
        } else {
            self.seminorm_sq_certified(&stage.gamma(0), bits)
        };
        let g1_sq = if exact {
            CertifiedScalar::exact(self.seminorm_sq(&stage.gamma(1)))
        } else {
            self.seminorm_sq_certified(&stage.gamma(1), bits)
        };
        // generators without the window shift and without coordinates
        let idem: Vec<Vec<Rational>> = stage
            .non_coordinate_generators()
            .into_iter()
            .filter(|g| *g != Generator::WindowShift)
            .map(|g| stage.generator_coords(g))
            .collect();
        // NE = Σ_{jk} λ_j λ_k Π_idem (1 − s_j s_k)^(−1): every pair's term
        // is exact (entry-local arithmetic); only the accumulation rounds
        let mut no_e_total = CertifiedScalar::zero();
        for j in 0..d {
            for k in 0..d {
                let mut f = &lambda[j] * &lambda[k];
                for s in &idem {
                    f /= rint(1) - &s[j] * &s[k];
                }
                no_e_total = round(no_e_total.add(&round(CertifiedScalar::exact(f))));
            }
        }
        // I₃ = Σ_j λ_j²/(a_j²−1) · Π_idem (1 − s_j²)^(−1)
        let mut i3 = CertifiedScalar::zero();
        for j in 0..d {
            let a = rint(stage.scale_at(j) as i64);
            let mut f = &lambda[j] * &lambda[j] / (&a * &a - rint(1));
            for s in &idem {
                f /= rint(1) - &s[j] * &s[j];
            }
            i3 = round(i3.add(&round(CertifiedScalar::exact(f))));
        }
        // I₁: idempotent tuples of degree < √a_{n+1}, i.e. ≤ M
        let threshold = u64::try_from(isqrt(&(stage.window_end() - 1).into()))
            .expect("square root of a u64 fits");
        let k = idem.len() as u64;
        let (i1, i2, i1_exact) = if check_tuple_budget_with(threshold, k, budget).is_ok() {
            let mut acc = CertifiedScalar::zero();
            enumerate_square_sums(&idem, 0, threshold, lambda, &mut |w| {
                let s: Rational = w.iter().sum();
                acc = round(acc.add(&round(CertifiedScalar::exact(&s * &s))));
            });
            let i2 = round(no_e_total.sub(&acc));
            (acc, i2, true)
        } else {
            let enc = CertifiedScalar::enclosure(Rational::zero(), no_e_total.hi().clone());
            (enc.clone(), enc, false)
        };
        // partition identity: exact equality in exact mode, enclosure
        // consistency otherwise
        let rhs = g1_sq.add(&no_e_total).add(&i3);
        let identity_holds = if exact {
            g0_sq.lo() == rhs.lo()
        } else {
            g0_sq.lo() <= rhs.hi() && rhs.lo() <= g0_sq.hi()
        };
        GammaDecomposition {
            g0_sq,
            g1_sq,
            no_e_total,
            i1,
            i2,
            i3,
            threshold,
            identity_holds,
            i1_exact,
            exact,
        }
    }
}

/// The split of `‖γ₀‖²`.  In exact mode every field is an exact rational
/// wrapped as a `CertifiedScalar`; in certified mode the fields are
/// enclosures at the stage's working precision.
#[derive(Debug, Clone)]
pub struct GammaDecomposition {
    pub g0_sq: CertifiedScalar,
    pub g1_sq: CertifiedScalar,
    /// `I₁ + I₂`: all shift-free, coordinate-free tuples, in closed form.
    pub no_e_total: CertifiedScalar,
    /// Low-degree part (degree ≤ threshold), exact when enumerated.
    pub i1: CertifiedScalar,
    /// High-degree remainder `no_e_total − I₁`.
    pub i2: CertifiedScalar,
    /// Coordinate-power part.
    pub i3: CertifiedScalar,
    /// `M = ⌊√(a_{n+1} − 1)⌋`: tuples of degree ≤ M count as low.
    pub threshold: u64,
    /// `‖γ₀‖² = ‖γ₁‖² + (I₁+I₂) + I₃`: exact equality in exact mode,
    /// enclosure consistency in certified mode.
    pub identity_holds: bool,
    /// Whether `I₁` was enumerated (vs. the `[0, I₁+I₂]` budget fallback).
    pub i1_exact: bool,
    /// Whether the sums ran in exact rational arithmetic.
    pub exact: bool,
}

/// `Π_{j=1..n} (j+1)²/(2j+1)`: the stage-indexed comparison constant.
pub fn product_bound(n: u64) -> Rational {
    let mut p = Rational::one();
    for j in 1..=n as i64 {
        p *= rat((j + 1) * (j + 1), 2 * j + 1);
    }
    p
}

/// One stage-level verdict derived from the decomposition: a named
/// inequality, decided or honestly undecidable.
#[derive(Debug, Clone)]
pub struct StageVerdict {
    /// Stable identifier, e.g. `"partition-identity"`.
    pub id: &'static str,
    pub verdict: Verdict,
    /// The decisive comparison, spelled out.
    pub detail: String,
}

/// Decide `x ≤ bound` (or `<` when `strict`) from an enclosure.
fn compare_upper(x: &CertifiedScalar, bound: &Rational, strict: bool) -> Verdict {
    let holds = if strict { x.hi() < bound } else { x.hi() <= bound };
    let fails = if strict { x.lo() >= bound } else { x.lo() > bound };
    match (holds, fails) {
        (true, _) => Verdict::Holds,
        (_, true) => Verdict::Fails,
        _ => Verdict::Undecidable,
    }
}

/// The endpoint verdicts on a stage decomposition:
///
/// * `partition-identity` — `‖γ₀‖² = ‖γ₁‖² + (I₁+I₂) + I₃` (exact equality
///   in exact mode, enclosure consistency otherwise);
/// * `low-degree-sum` — `I₁ < 2·Π_{j≤n}(j+1)²/(2j+1)`;
/// * `high-degree-tail` — `I₂ ≤ 2^(−2·a_{n+1}²/3)`, decided by cubing both
///   sides so the fractional exponent never needs rounding;
/// * `coordinate-sum` — `I₃ ≤ 1`;
/// * `norm-comparison` — `‖γ₀‖² ≤ 9·‖γ₁‖²`.
///
/// Every verdict is decided from certified endpoints; an enclosure that
/// straddles its threshold reports `Undecidable`, never a guess.
pub fn decomposition_verdicts(
    norm: &StageSeminorm,
    dec: &GammaDecomposition,
) -> Vec<StageVerdict> {
    let stage = norm.functional().stage();
    let n = stage.n();
    let w = stage.window_end();
    let mut out = Vec::new();

    out.push(StageVerdict {
        id: "partition-identity",
        verdict: if dec.identity_holds { Verdict::Holds } else { Verdict::Fails },
        detail: if dec.exact {
            "exact equality of both sides".to_string()
        } else {
            "enclosure consistency of both sides".to_string()
        },
    });

    let i1_bound = rint(2) * product_bound(n);
    out.push(StageVerdict {
        id: "low-degree-sum",
        verdict: compare_upper(&dec.i1, &i1_bound, true),
        detail: format!(
            "I1 in [{}, {}] vs strict bound {}",
            dec.i1.lo(),
            dec.i1.hi(),
            i1_bound
        ),
    });

    // I₂ ≤ 2^(−2w²/3)  ⟺  I₂³ ≤ 2^(−2w²)   (both sides nonnegative)
    let exponent = 2i64
        .checked_mul(w as i64)
        .and_then(|t| t.checked_mul(w as i64))
        .expect("window end is capped well below overflow");
    // cubing is strictly increasing on all of ℝ, so the comparison stays
    // sound even when rounding lets the enclosure dip below zero
    let i2_cube = dec.i2.mul(&dec.i2).mul(&dec.i2);
    let i2_bound = pow2(-exponent);
    out.push(StageVerdict {
        id: "high-degree-tail",
        verdict: compare_upper(&i2_cube, &i2_bound, false),
        detail: format!(
            "I2^3 in [{}, {}] vs 2^(-2*{w}^2) (cube of the fractional-exponent bound)",
            i2_cube.lo(),
            i2_cube.hi()
        ),
    });

    out.push(StageVerdict {
        id: "coordinate-sum",
        verdict: compare_upper(&dec.i3, &Rational::one(), false),
        detail: format!("I3 in [{}, {}] vs 1", dec.i3.lo(), dec.i3.hi()),
    });

    let nine_g1 = dec.g1_sq.scale(&rint(9));
    let comparison = if dec.g0_sq.hi() <= nine_g1.lo() {
        Verdict::Holds
    } else if dec.g0_sq.lo() > nine_g1.hi() {
        Verdict::Fails
    } else {
        Verdict::Undecidable
    };
    out.push(StageVerdict {
        id: "norm-comparison",
        verdict: comparison,
        detail: format!(
            "|gamma0|^2 in [{}, {}] vs 9*|gamma1|^2 in [{}, {}]",
            dec.g0_sq.lo(),
            dec.g0_sq.hi(),
            nine_g1.lo(),
            nine_g1.hi()
        ),
    });

    out
}

fn check_tuple_budget(degree: u64, k: u64) -> Result<()> {
    check_tuple_budget_with(degree, k, ENUM_BUDGET)
}

fn check_tuple_budget_with(degree: u64, k: u64, budget: u64) -> Result<()> {
    // C(degree + k, k) tuples of k generators with total degree ≤ degree
    let mut count: u128 = 1;
    for i in 1..=k as u128 {
        count = count.saturating_mul(degree as u128 + i) / i;
        if count > budget as u128 {
            return Err(Error::ResourceExceeded(format!(
                "enumeration needs more than {budget} index tuples"
            )));
        }
    }
    Ok(())
}

/// DFS over non-coordinate index tuples; at each complete tuple add
/// `(Σ_j w_j)² + Σ_j w_j²·scale_j` into the bucket of its total degree.
fn enumerate(
    gens: &[Vec<Rational>],
    level: usize,
    remaining: u64,
    w: &[Rational],
    scales: &[Rational],
    total: u64,
    buckets: &mut [Rational],
) {
    if level == gens.len() {
        let s: Rational = w.iter().sum();
        let mut term = &s * &s;
        for (wj, cj) in w.iter().zip(scales) {
            term += wj * wj * cj;
        }
        buckets[(total - remaining) as usize] += term;
        return;
    }
    let mut wp = w.to_vec();
    for p in 0..=remaining {
        if p > 0 {
            for (wj, sj) in wp.iter_mut().zip(&gens[level]) {
                *wj *= sj;
            }
        }
        enumerate(gens, level + 1, remaining - p, &wp, scales, total, buckets);
    }
}

/// Same DFS shape, but yielding the weight vector of every complete tuple
/// to a callback — the shift-free, coordinate-free branch of the
/// decomposition, where each tuple contributes `(Σ_j w_j)²`.
fn enumerate_square_sums(
    gens: &[Vec<Rational>],
    level: usize,
    remaining: u64,
    w: &[Rational],
    sink: &mut dyn FnMut(&[Rational]),
) {
    if level == gens.len() {
        sink(w);
        return;
    }
    let mut wp = w.to_vec();
    for p in 0..=remaining {
        if p > 0 {
            for (wj, sj) in wp.iter_mut().zip(&gens[level]) {
                *wj *= sj;
            }
        }
        enumerate_square_sums(gens, level + 1, remaining - p, &wp, sink);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::quadratic_form;
    use crate::sequence::GrowthSequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn desk_small_norm() -> StageSeminorm {
        let seq =
            GrowthSequence::from_integers("desk-small", &[2, 9, 10, 11, 12, 13, 14, 15, 16])
                .unwrap();
        StageSeminorm::new(StageFunctional::new(&seq, 1, 512).unwrap()).unwrap()
    }

    fn desk_medium_norm() -> StageSeminorm {
        let vals: Vec<u64> = std::iter::once(3).chain(40..=78).collect();
        let seq = GrowthSequence::from_integers("desk-medium", &vals).unwrap();
        StageSeminorm::new(StageFunctional::new(&seq, 1, 512).unwrap()).unwrap()
    }

    fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Rational> {
        (0..d).map(|_| rat(rng.gen_range(-40..=40), rng.gen_range(1..=12))).collect()
    }

    #[test]
    fn truncated_closed_form_equals_enumeration_exactly() {
        let sn = desk_small_norm();
        let d = sn.functional().stage().dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for degree in 0..=6u64 {
            let gd = sn.gram_truncated(degree);
            for _ in 0..8 {
                let x = random_vector(&mut rng, d);
                let via_enum = sn.enumeration_partial(&x, degree).unwrap();
                let via_form = quadratic_form(&gd, &x);
                assert_eq!(via_enum, via_form, "degree {degree}");
            }
        }
    }

    #[test]
    fn enumeration_is_monotone_and_dominated_by_the_closed_form() {
        let sn = desk_small_norm();
        let d = sn.functional().stage().dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let x = random_vector(&mut rng, d);
            let full = sn.seminorm_sq(&x);
            let partials = sn.enumeration_partials(&x, 9).unwrap();
            for win in partials.windows(2) {
                assert!(win[0] <= win[1], "partials must be nondecreasing");
            }
            for p in &partials {
                assert!(p <= &full, "every partial is below the closed form");
            }
            // the gap shrinks as the degree grows
            let gaps: Vec<Rational> = partials.iter().map(|p| &full - p).collect();
            for win in gaps.windows(2) {
                assert!(win[1] <= win[0]);
            }
        }
    }

    #[test]
    fn shifted_square_norm_is_bounded_by_the_factorized_identity() {
        // Over tuples of pure compressed-idempotent powers i < a₁ applied
        // to γ₁, the squared values factorize:
        // Σ = Π_j Σ_{i<a_j} (j/(j+1))^(2i) (1 − i/a_j)², = 17/16 at stage 1
        // of the small model.  This lower-bounds ‖γ₁‖² independently of
        // the Gram computation.
        let sn = desk_small_norm();
        let dec = sn.gamma_decomposition(ENUM_BUDGET);
        let factorized = rat(17, 16);
        assert!(dec.exact && dec.g1_sq.is_exact());
        assert!(dec.g1_sq.lo() >= &factorized);
        // cross-check the factorized value by direct summation
        let mut direct = Rational::zero();
        let sf = sn.functional();
        let stage = sf.stage();
        let g = stage.generator_coords(crate::stage::Generator::CompressedIdempotent { j: 1 });
        let gamma1 = stage.gamma(1);
        for i in 0..2u64 {
            // window coords of G₁^i · γ₁
            let mut v = gamma1.clone();
            for _ in 0..i {
                for (vj, gj) in v.iter_mut().zip(&g) {
                    *vj *= gj;
                }
            }
            let val = sf.phi_apply(&v);
            direct += &val * &val;
        }
        assert_eq!(direct, factorized);
    }

    #[test]
    fn gamma_decomposition_identity_is_exact_on_small_windows() {
        let sn = desk_small_norm();
        let dec = sn.gamma_decomposition(ENUM_BUDGET);
        assert!(dec.exact);
        assert!(dec.identity_holds);
        assert!(dec.i1_exact);
        // I₁ + I₂ = NE as exact rationals
        assert_eq!(dec.i1.lo() + dec.i2.lo(), *dec.no_e_total.lo());
        assert!(dec.g0_sq.lo() > &Rational::zero());
        assert!(!dec.i3.lo().is_negative());
        // budget collapse: the honest fallback
        let capped = sn.gamma_decomposition(0);
        assert!(!capped.i1_exact);
        assert_eq!(capped.i1.lo(), &Rational::zero());
        assert_eq!(capped.i1.hi(), capped.no_e_total.hi());
        assert!(capped.identity_holds);
    }

    #[test]
    fn gamma_decomposition_is_certified_on_large_windows() {
        // dimension 37 > EXACT_DECOMP_DIM: sums become enclosures whose
        // width is far below anything the verdicts compare against
        let sn = desk_medium_norm();
        let dec = sn.gamma_decomposition(ENUM_BUDGET);
        assert!(!dec.exact);
        assert!(dec.identity_holds, "enclosures must stay consistent");
        assert!(dec.i1_exact);
        assert!(dec.g0_sq.lo() > &Rational::zero());
        assert_eq!(stage_bits(sn.functional().stage().window_end()), 4 * 40 * 40);
        // width budget: the summands reach λ²-scale before cancelling, so
        // the width is far above 2^(−bits) — but it must still be far
        // below the 2^(−2·40²/3) ≈ 2^(−1066) comparison the verdicts need
        assert!(dec.g0_sq.width() <= pow2(-1500));
        assert!(dec.i2.width() <= pow2(-1500));
        // the interval identity really constrains: lhs and rhs agree to
        // within the combined widths
        let rhs = dec.g1_sq.add(&dec.no_e_total).add(&dec.i3);
        let gap = (dec.g0_sq.midpoint() - rhs.midpoint()).abs();
        assert!(gap <= dec.g0_sq.width() + rhs.width());
    }

    #[test]
    #[ignore = "exact cross-check of the certified route; ~1 min of bigint sums"]
    fn gamma_decomposition_identity_holds_exactly_on_desk_medium() {
        // the certified route above encloses these exact values; this knits
        // the two together on the large window where exact sums are slow
        let sn = desk_medium_norm();
        let stage_gamma0 = sn.functional().stage().gamma(0);
        let stage_gamma1 = sn.functional().stage().gamma(1);
        let g0 = sn.seminorm_sq(&stage_gamma0);
        let g1 = sn.seminorm_sq(&stage_gamma1);
        let dec = sn.gamma_decomposition(ENUM_BUDGET);
        assert!(dec.g0_sq.lo() <= &g0 && &g0 <= dec.g0_sq.hi());
        assert!(dec.g1_sq.lo() <= &g1 && &g1 <= dec.g1_sq.hi());
    }

    #[test]
    fn decomposition_thresholds_match_the_window() {
        assert_eq!(desk_small_norm().gamma_decomposition(ENUM_BUDGET).threshold, 2);
        assert_eq!(desk_medium_norm().gamma_decomposition(ENUM_BUDGET).threshold, 6);
    }

    #[test]
    fn generators_contract_the_seminorm() {
        let sn = desk_small_norm();
        for gen in sn.functional().stage().generators() {
            assert!(
                sn.contraction_certificate(gen).is_psd(),
                "generator {} must contract",
                gen.describe()
            );
        }
    }

    #[test]
    fn gram_matrix_is_positive_semidefinite() {
        // small window: exact elimination with witness-grade certainty
        let sn = desk_small_norm();
        assert!(linalg::psd_check(sn.gram()).is_psd());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = sn.functional().stage().dimension();
        for _ in 0..20 {
            let x = random_vector(&mut rng, d);
            assert!(!sn.seminorm_sq(&x).is_negative());
        }
        // large window: exact elimination is computationally hopeless, but
        // the interval factorization certifies definiteness — and the
        // pivots separate from zero already at a few hundred bits, far
        // below the precision the *sums* need
        let sm = desk_medium_norm();
        assert!(linalg::psd_check_certified(sm.gram(), 256).is_psd());
    }

    #[test]
    fn seminorm_of_elements_matches_window_compression() {
        let sn = desk_small_norm();
        let g = Element::g();
        let via_elem = sn.seminorm_sq_element(&g);
        let via_coords = sn.seminorm_sq(&sn.functional().stage().gamma(1));
        assert_eq!(via_elem, via_coords);
        assert_eq!(&via_coords, sn.gamma_decomposition(ENUM_BUDGET).g1_sq.lo());
    }

    #[test]
    fn certified_quadratic_form_encloses_the_exact_one() {
        let sn = desk_small_norm();
        let d = sn.functional().stage().dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10 {
            let x = random_vector(&mut rng, d);
            let exact = sn.seminorm_sq(&x);
            let mut last_width: Option<Rational> = None;
            for bits in [64u32, 256, 1024] {
                let enc = sn.seminorm_sq_certified(&x, bits);
                assert!(enc.lo() <= &exact && &exact <= enc.hi());
                if let Some(w) = last_width {
                    assert!(enc.width() <= w, "width must shrink with precision");
                }
                last_width = Some(enc.width());
            }
            // at kilobit precision the width is negligible even after the
            // λ²-scale cancellations inside the form
            assert!(last_width.unwrap() <= pow2(-800));
        }
    }

    #[test]
    fn product_bound_values() {
        assert_eq!(product_bound(1), rat(4, 3));
        assert_eq!(product_bound(2), rat(4, 3) * rat(9, 5));
        assert_eq!(product_bound(0), rint(1));
    }

    #[test]
    fn certified_square_roots_bracket_the_seminorm() {
        let sn = desk_small_norm();
        let enc = sn.seminorm(&sn.functional().stage().gamma(1), 53).unwrap();
        let sq = sn.seminorm_sq(&sn.functional().stage().gamma(1));
        assert!(enc.lo() * enc.lo() <= sq);
        assert!(enc.hi() * enc.hi() >= sq);
        assert!(enc.width() <= pow2(-53));
    }
}
