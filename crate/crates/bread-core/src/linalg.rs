//! Exact linear algebra over the rationals.
//!
//! Everything here is fraction-free in spirit but simple in form: Gaussian
//! elimination with exact rational arithmetic, and a positive-semidefinite
//! check by symmetric elimination that produces a *certified witness* on
//! failure — a vector `v` with `vᵀMv < 0`, verified exactly before it is
//! returned.  No floating point is involved except in the separate `f64`
//! helper used only to propose (never to certify) candidate vectors.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{rint, CertifiedScalar, Dyadic, Rational, Rounding};

pub type Vector = Vec<Rational>;
pub type Matrix = Vec<Vector>;

// === basic operations ===

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn mat_vec(m: &Matrix, v: &[Rational]) -> Vector {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `vᵀ M v` for a square matrix.
pub fn quadratic_form(m: &Matrix, v: &[Rational]) -> Rational {
    dot(v, &mat_vec(m, v))
}

/// Rayleigh quotient `vᵀMv / vᵀv`; `None` for the zero vector.
pub fn rayleigh(m: &Matrix, v: &[Rational]) -> Option<Rational> {
    let denom = dot(v, v);
    if denom.is_zero() {
        return None;
    }
    Some(quadratic_form(m, v) / denom)
}

// === exact linear solves ===

/// Solve `A x = b` by Gaussian elimination with exact arithmetic.
/// Pivot choice: first nonzero entry in the column (any nonzero pivot is
/// exact, so no magnitude heuristics are needed).
pub fn solve(a: &Matrix, b: &[Rational]) -> Result<Vector> {
    let cols = solve_columns(a, &[b.to_vec()])?;
    Ok(cols.into_iter().next().unwrap())
}

/// Solve `A X = B` for several right-hand sides given as columns;
/// returns the solution columns.
pub fn solve_columns(a: &Matrix, columns: &[Vector]) -> Result<Vec<Vector>> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n), "matrix must be square");
    for c in columns {
        assert_eq!(c.len(), n, "right-hand side length mismatch");
    }
    // augmented working copy
    let mut w: Vec<Vector> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            for c in columns {
                row.push(c[i].clone());
            }
            row
        })
        .collect();
    let total = n + columns.len();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !w[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
        w.swap(col, pivot);
        let p = w[col][col].clone();
        for j in col..total {
            w[col][j] = &w[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !w[r][col].is_zero() {
                let f = w[r][col].clone();
                for j in col..total {
                    let delta = &f * &w[col][j];
                    w[r][j] = &w[r][j] - delta;
                }
            }
        }
    }
    Ok((0..columns.len()).map(|k| (0..n).map(|i| w[i][n + k].clone()).collect()).collect())
}

/// `trace(B⁻¹A)` and the maximum absolute row sum of `B⁻¹A`, both exact.
/// Either quantity bounds the largest generalized eigenvalue of `(A, B)`
/// from above when `A, B` are symmetric, `B` is positive definite and the
/// eigenvalues are non-negative.
pub fn generalized_bounds(a: &Matrix, b: &Matrix) -> Result<(Rational, Rational)> {
    let n = a.len();
    let cols: Vec<Vector> = (0..n).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect();
    let x = solve_columns(b, &cols)?; // columns of B⁻¹A
    let trace: Rational = (0..n).map(|i| x[i][i].clone()).sum();
    let mut row_max = Rational::zero();
    for i in 0..n {
        let s: Rational = (0..n).map(|j| x[j][i].abs()).sum();
        if s > row_max {
            row_max = s;
        }
    }
    Ok((trace, row_max))
}

// === certified positive-semidefiniteness ===

/// Outcome of the PSD check.  A `NotPsd` witness has been verified exactly
/// against the *original* matrix before being returned.
#[derive(Debug, Clone, PartialEq)]
pub enum PsdOutcome {
    Psd,
    NotPsd { witness: Vector },
}

impl PsdOutcome {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdOutcome::Psd)
    }
}

/// Decide whether the symmetric matrix `m` is positive semidefinite.
///
/// Symmetric elimination: repeatedly pick the largest positive diagonal
/// entry as pivot and form the Schur complement, tracking for every active
/// row a combination vector `z_i` with the invariant `C[i][j] = z_iᵀ M z_j`.
/// The process ends in one of three states:
///
/// * some active diagonal is negative → that `z` is a witness;
/// * all active diagonals are zero but an off-diagonal entry survives →
///   `z_i − sign(C[i][j])·z_j` is a witness;
/// * the active block is identically zero → `m` is congruent to a
///   non-negative diagonal matrix, hence PSD.
pub fn psd_check(m: &Matrix) -> PsdOutcome {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    debug_assert!(
        (0..n).all(|i| (0..n).all(|j| m[i][j] == m[j][i])),
        "matrix must be symmetric"
    );

    let mut c: Matrix = m.clone();
    let mut z: Vec<Vector> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { rint(1) } else { Rational::zero() }).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();

    loop {
        // largest positive diagonal among active rows, first index on ties
        let mut pivot: Option<usize> = None;
        for &i in &active {
            if c[i][i].is_positive() && pivot.map_or(true, |p| c[i][i] > c[p][p]) {
                pivot = Some(i);
            }
        }
        let Some(p) = pivot else {
            // no positive diagonal left
            for &i in &active {
                if c[i][i].is_negative() {
                    return certify_witness(m, z[i].clone());
                }
            }
            // all active diagonals zero; any surviving off-diagonal entry
            // exposes an indefinite 2×2 block
            for (ai, &i) in active.iter().enumerate() {
                for &j in &active[ai + 1..] {
                    if !c[i][j].is_zero() {
                        let sign = if c[i][j].is_positive() { 1 } else { -1 };
                        let v: Vector = z[i]
                            .iter()
                            .zip(&z[j])
                            .map(|(a, b)| a - rint(sign) * b)
                            .collect();
                        return certify_witness(m, v);
                    }
                }
            }
            return PsdOutcome::Psd;
        };

        active.retain(|&i| i != p);
        let d = c[p][p].clone();
        let row_p: Vector = c[p].clone();
        let factors: Vec<(usize, Rational)> = active
            .iter()
            .filter(|&&i| !c[i][p].is_zero())
            .map(|&i| (i, &c[i][p] / &d))
            .collect();
        for (i, f) in &factors {
            // z_i ← z_i − f·z_p keeps C[i][j] = z_iᵀ M z_j in sync with the
            // Schur-complement update below (the cross terms of the two-sided
            // substitution cancel against f_i·f_j·d exactly)
            for k in 0..n {
                let delta = f * &z[p][k];
                z[*i][k] = &z[*i][k] - delta;
            }
            for &j in &active {
                let delta = f * &row_p[j];
                c[*i][j] = &c[*i][j] - &delta;
            }
        }
        // entries in the pivot row/column are dead from here on: every later
        // read goes through `active`, which no longer contains p
    }
}

/// Verify `vᵀMv < 0` exactly; a failed check here would mean the elimination
/// invariant was broken, which is a bug, so it panics rather than returning
/// a wrong certificate.
fn certify_witness(m: &Matrix, v: Vector) -> PsdOutcome {
    let q = quadratic_form(m, &v);
    assert!(q.is_negative(), "witness certification failed: vᵀMv = {q} is not negative");
    PsdOutcome::NotPsd { witness: v }
}

// === certified (outward-rounded) variants for large matrices ===
//
// Exact elimination is quadratic-time in the *bit size* of the minors, and
// on matrices whose entries carry hundreds of pairwise-coprime odd factors
// the minors reach megabit size — hours per check.  The certified variants
// trade exactness for an enclosure: every intermediate is rounded outward
// onto a dyadic grid, so denominators never exceed the grid resolution and
// the result is a sound interval statement at a chosen precision.

/// `vᵀMv` with outward rounding at `bits` significant bits per accumulation
/// step.  Each term `m_ij·v_i·v_j` is computed exactly (cheap: no cross-term
/// denominators), then absorbed into a dyadic-endpoint enclosure.
pub fn quadratic_form_certified(m: &Matrix, v: &[Rational], bits: u32) -> CertifiedScalar {
    let n = m.len();
    assert_eq!(v.len(), n);
    let mut acc = CertifiedScalar::zero();
    for i in 0..n {
        for j in i..n {
            let mut term = &m[i][j] * &v[i] * &v[j];
            if j > i {
                term = &term + &term; // symmetric pair
            }
            acc = acc.add(&CertifiedScalar::exact(term).rounded(bits)).rounded(bits);
        }
    }
    acc
}

/// Outcome of the interval PSD check.  `Psd` and the `NotPsd` witness are
/// sound at any precision; `Inconclusive` means the chosen precision could
/// not separate the spectrum from zero — retry with more bits or fall back
/// to the exact check.
#[derive(Debug, Clone, PartialEq)]
pub enum CertPsdOutcome {
    Psd,
    NotPsd { witness: Vector },
    Inconclusive,
}

impl CertPsdOutcome {
    pub fn is_psd(&self) -> bool {
        matches!(self, CertPsdOutcome::Psd)
    }
}

/// Interval LDLᵀ: symmetric elimination in enclosure arithmetic with
/// outward rounding at `bits` significant bits.
///
/// * every pivot's enclosure strictly positive → the exact elimination has
///   positive pivots too, so `m` is positive definite (hence PSD);
/// * a diagonal enclosure strictly negative → a witness vector is proposed
///   from the (approximate) elimination history and then *re-verified* by a
///   certified quadratic form, so a returned witness is always sound;
/// * anything else → `Inconclusive`.
pub fn psd_check_certified(m: &Matrix, bits: u32) -> CertPsdOutcome {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    let mut c: Vec<Vec<CertifiedScalar>> = (0..n)
        .map(|i| (0..n).map(|j| CertifiedScalar::exact(m[i][j].clone()).rounded(bits)).collect())
        .collect();
    // combination vectors in low-precision midpoint arithmetic: these only
    // *propose* witnesses, so approximation here cannot break soundness
    let mut z: Vec<Vector> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { rint(1) } else { Rational::zero() }).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();

    loop {
        let mut pivot: Option<usize> = None;
        for &i in &active {
            if c[i][i].lo().is_positive()
                && pivot.map_or(true, |p| c[i][i].lo() > c[p][p].lo())
            {
                pivot = Some(i);
            }
        }
        let Some(p) = pivot else {
            // no certifiably positive diagonal remains
            for &i in &active {
                if c[i][i].hi().is_negative() {
                    let probe = quadratic_form_certified(m, &z[i], bits);
                    if probe.hi().is_negative() {
                        return CertPsdOutcome::NotPsd { witness: z[i].clone() };
                    }
                    return CertPsdOutcome::Inconclusive;
                }
            }
            // a semidefinite limit is only certifiable if the whole active
            // block is exactly zero (as after eliminating a degenerate stage)
            let all_zero = active.iter().all(|&i| {
                active.iter().all(|&j| {
                    c[i][j].is_exact() && c[i][j].lo().is_zero()
                })
            });
            return if all_zero { CertPsdOutcome::Psd } else { CertPsdOutcome::Inconclusive };
        };

        active.retain(|&i| i != p);
        let Some(dinv) = c[p][p].recip_positive() else {
            return CertPsdOutcome::Inconclusive;
        };
        let row_p: Vec<CertifiedScalar> = c[p].clone();
        let f_mid = dinv.midpoint();
        for idx in 0..active.len() {
            let i = active[idx];
            let cip = c[i][p].clone();
            if cip.is_exact() && cip.lo().is_zero() {
                continue;
            }
            // witness proposal update, deliberately low precision
            let f = Dyadic::round_from_rational(&(cip.midpoint() * &f_mid), 64, Rounding::Down)
                .to_rational();
            for k in 0..n {
                let delta = &f * &z[p][k];
                z[i][k] = &z[i][k] - delta;
            }
            for &j in &active {
                let upd = cip.mul(&row_p[j]).mul(&dinv);
                c[i][j] = c[i][j].sub(&upd).rounded(bits);
            }
        }
    }
}

// === floating-point helper (proposals only, never certificates) ===

/// Solve `A x = b` in `f64` with partial pivoting.  Returns `None` when a
/// pivot is vanishing or anything becomes non-finite.  Results are only ever
/// used as *candidate* vectors that are re-checked exactly.
pub fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut w: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| {
            w[x][col].abs().partial_cmp(&w[y][col].abs()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !w[pivot][col].is_finite() || w[pivot][col].abs() < 1e-300 {
            return None;
        }
        w.swap(col, pivot);
        let p = w[col][col];
        for j in col..=n {
            w[col][j] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = w[r][col];
                for j in col..=n {
                    w[r][j] -= f * w[col][j];
                }
            }
        }
    }
    let x: Vec<f64> = (0..n).map(|i| w[i][n]).collect();
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, rint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| rint(x)).collect()).collect()
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = mat(&[&[2, 1, -1], &[-3, -1, 2], &[-2, 1, 2]]);
        let b = vec![rint(8), rint(-11), rint(-3)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, vec![rint(2), rint(3), rint(-1)]);
        // residual must vanish exactly
        let r = mat_vec(&a, &x);
        assert_eq!(r, b);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = mat(&[&[1, 2], &[2, 4]]);
        assert!(matches!(solve(&a, &[rint(1), rint(2)]), Err(Error::SingularMatrix)));
    }

    #[test]
    fn solve_handles_zero_leading_pivot() {
        let a = mat(&[&[0, 1], &[1, 0]]);
        let x = solve(&a, &[rint(3), rint(7)]).unwrap();
        assert_eq!(x, vec![rint(7), rint(3)]);
    }

    #[test]
    fn psd_accepts_gram_matrices() {
        // A = RᵀR is PSD by construction, including rank-deficient R
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let n = 2 + trial % 4;
            let k = 1 + trial % 3; // rank ≤ k < n possible
            let r: Matrix =
                (0..k).map(|_| (0..n).map(|_| rint(rng.gen_range(-5..=5))).collect()).collect();
            let mut g = vec![vec![Rational::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    g[i][j] = (0..k).map(|t| &r[t][i] * &r[t][j]).sum();
                }
            }
            assert!(psd_check(&g).is_psd(), "Gram matrix rejected (trial {trial})");
        }
    }

    #[test]
    fn psd_rejects_with_verified_witness() {
        let cases = [
            mat(&[&[1, 0], &[0, -1]]),
            mat(&[&[0, 1], &[1, 0]]),
            mat(&[&[1, 2], &[2, 1]]),
            mat(&[&[-1]]),
            mat(&[&[2, 3, 0], &[3, 2, 0], &[0, 0, 5]]),
        ];
        for m in cases {
            match psd_check(&m) {
                PsdOutcome::NotPsd { witness } => {
                    assert!(quadratic_form(&m, &witness).is_negative());
                }
                PsdOutcome::Psd => panic!("indefinite matrix accepted: {m:?}"),
            }
        }
    }

    #[test]
    fn psd_accepts_singular_but_semidefinite() {
        assert!(psd_check(&mat(&[&[1, 1], &[1, 1]])).is_psd());
        assert!(psd_check(&mat(&[&[0, 0], &[0, 0]])).is_psd());
        assert!(psd_check(&mat(&[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]])).is_psd());
    }

    #[test]
    fn psd_verdicts_match_random_probes() {
        // Differential check: when PSD is claimed, random rational probes
        // must never find a negative value; when refused, the witness
        // already certifies the refusal.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let n = 2 + rng.gen_range(0..4usize);
            let mut m = vec![vec![Rational::zero(); n]; n];
            for i in 0..n {
                for j in 0..=i {
                    let v = rat(rng.gen_range(-4..=4), 1 + rng.gen_range(0..3));
                    m[i][j] = v.clone();
                    m[j][i] = v;
                }
            }
            match psd_check(&m) {
                PsdOutcome::Psd => {
                    for _ in 0..50 {
                        let v: Vector =
                            (0..n).map(|_| rint(rng.gen_range(-6..=6))).collect();
                        assert!(
                            !quadratic_form(&m, &v).is_negative(),
                            "probe contradicts PSD verdict for {m:?}"
                        );
                    }
                }
                PsdOutcome::NotPsd { witness } => {
                    assert!(quadratic_form(&m, &witness).is_negative());
                }
            }
        }
    }

    #[test]
    fn generalized_bounds_dominate_eigenvalues() {
        // B = I: bounds are trace(A) and max row sum, both ≥ λ_max for PSD A
        let a = mat(&[&[2, 1], &[1, 2]]); // eigenvalues 1 and 3
        let b = mat(&[&[1, 0], &[0, 1]]);
        let (tr, rs) = generalized_bounds(&a, &b).unwrap();
        assert_eq!(tr, rint(4));
        assert_eq!(rs, rint(3));
    }

    #[test]
    fn certified_quadratic_form_encloses_exact_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = 2 + rng.gen_range(0..4usize);
            let mut m = vec![vec![Rational::zero(); n]; n];
            for i in 0..n {
                for j in 0..=i {
                    let v = rat(rng.gen_range(-9..=9), 1 + rng.gen_range(0..5));
                    m[i][j] = v.clone();
                    m[j][i] = v;
                }
            }
            let x: Vector =
                (0..n).map(|_| rat(rng.gen_range(-9..=9), 1 + rng.gen_range(0..5))).collect();
            let exact = quadratic_form(&m, &x);
            for bits in [16u32, 64, 256] {
                let enc = quadratic_form_certified(&m, &x, bits);
                assert!(enc.lo() <= &exact && &exact <= enc.hi());
            }
        }
    }

    #[test]
    fn certified_psd_agrees_with_exact_when_conclusive() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut conclusive = 0usize;
        for _ in 0..60 {
            let n = 2 + rng.gen_range(0..4usize);
            let mut m = vec![vec![Rational::zero(); n]; n];
            for i in 0..n {
                for j in 0..=i {
                    let v = rat(rng.gen_range(-4..=4), 1 + rng.gen_range(0..3));
                    m[i][j] = v.clone();
                    m[j][i] = v;
                }
            }
            let exact = psd_check(&m);
            match psd_check_certified(&m, 128) {
                CertPsdOutcome::Psd => {
                    assert!(exact.is_psd(), "certified Psd contradicts exact for {m:?}");
                    conclusive += 1;
                }
                CertPsdOutcome::NotPsd { witness } => {
                    // witness is self-certifying regardless of the exact path
                    assert!(quadratic_form(&m, &witness).is_negative());
                    assert!(!exact.is_psd());
                    conclusive += 1;
                }
                CertPsdOutcome::Inconclusive => {
                    // only near-singular matrices may stay undecided
                }
            }
        }
        assert!(conclusive >= 50, "only {conclusive}/60 conclusive at 128 bits");
    }

    #[test]
    fn certified_psd_never_rejects_gram_matrices() {
        // soundness: enclosures contain the exact Schur data, so a true PSD
        // matrix can come back Psd or Inconclusive but never NotPsd
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..20 {
            let n = 2 + trial % 4;
            let k = 1 + trial % 3;
            let r: Matrix =
                (0..k).map(|_| (0..n).map(|_| rint(rng.gen_range(-5..=5))).collect()).collect();
            let mut g = vec![vec![Rational::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    g[i][j] = (0..k).map(|t| &r[t][i] * &r[t][j]).sum();
                }
            }
            assert!(!matches!(
                psd_check_certified(&g, 96),
                CertPsdOutcome::NotPsd { .. }
            ));
        }
    }

    #[test]
    fn f64_solver_agrees_with_exact() {
        let a = mat(&[&[4, 1], &[1, 3]]);
        let af: Vec<Vec<f64>> = vec![vec![4.0, 1.0], vec![1.0, 3.0]];
        let b = vec![rint(1), rint(2)];
        let exact = solve(&a, &b).unwrap();
        let approx = solve_f64(&af, &[1.0, 2.0]).unwrap();
        for (e, ap) in exact.iter().zip(&approx) {
            let ef = e.numer().to_string().parse::<f64>().unwrap()
                / e.denom().to_string().parse::<f64>().unwrap();
            assert!((ef - ap).abs() < 1e-12);
        }
    }
}
