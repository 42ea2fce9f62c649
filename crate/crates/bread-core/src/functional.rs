//! The distinguished stage functional and its interpolation weights.
//!
//! On stage `n` the functional is pinned on the `γ`-basis: `φ(γ_k)` is
//! nonzero exactly when `k − 1` decomposes as `Σ tᵢaᵢ` with `0 ≤ tᵢ ≤ aᵢ`,
//! in which case
//!
//! `φ(γ_k) = Π_i 2^(−tᵢ·aᵢ²) · (1 − tᵢ/aᵢ)`.
//!
//! Materially the functional is carried by weights `λ_j` on the window
//! coordinates, determined by the interpolation system
//!
//! `Σ_{j∈W} λ_j · 2^(−jk) = φ(γ_k)`,  `k = 0, …, d−1`,
//!
//! a transposed Vandermonde system at the nodes `2^(−j)`.  The weights are
//! computed in O(d²) through the master polynomial `Π(y − 2^(−j))` and
//! synthetic deflation; an exact Gaussian solve of the same system serves
//! as an independent oracle in the tests.
//!
//! `extension(l) = Σ_j λ_j 2^(−jl)` evaluates the same weights against
//! `γ_l` for any `l ≥ 0` — beyond the basis range it is *not* given by the
//! decomposition formula, and the quantitative tail scan reports exactly
//! how fast it decays.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{pow2, rat, rint, Rational};
use crate::sequence::lambda::{lambda_set, LambdaSet};
use crate::sequence::GrowthSequence;
use crate::stage::Stage;

/// Cap on the exponent `Σ tᵢaᵢ²` of a single functional value; beyond this
/// the exact rational is too large to materialize.
const VALUE_EXPONENT_CAP: i64 = 1 << 20;

/// The functional data of one stage.
#[derive(Debug, Clone)]
pub struct StageFunctional {
    stage: Stage,
    lambda_set: LambdaSet,
    /// `f_k = φ(γ_k)` for `k = 0, …, d−1`.
    f: Vec<Rational>,
    /// Window weights `λ_j`, in window order.
    lambda: Vec<Rational>,
}

/// One line of the quantitative tail scan.
#[derive(Debug, Clone)]
pub struct TailRecord {
    pub l: u64,
    /// `|extension(l)|`, exact.
    pub magnitude: Rational,
    /// Whether `|extension(l)| ≤ 2^(−l(1+aₙ) − a_{n+1}²/3)`, decided by
    /// cubing both sides.
    pub holds: bool,
}

impl StageFunctional {
    /// Build stage `n` of the sequence together with its functional.
    pub fn new(seq: &GrowthSequence, n: u64, dimension_cap: u64) -> Result<Self> {
        let stage = Stage::new(seq, n, dimension_cap)?;
        Self::for_stage(seq, stage)
    }

    pub fn for_stage(seq: &GrowthSequence, stage: Stage) -> Result<Self> {
        let n = stage.n();
        let ls = lambda_set(seq, n)?;
        let mut prefix_squares = Vec::with_capacity(n as usize);
        for j in 1..=n {
            let aj = seq.a(j)? as i64;
            prefix_squares.push(aj * aj);
        }
        let d = stage.dimension();
        let mut f = Vec::with_capacity(d);
        f.push(Rational::zero()); // φ(γ₀) = 0: no decomposition of −1
        for k in 1..d as u64 {
            f.push(phi_value(seq, &ls, &prefix_squares, k - 1)?);
        }
        let lambda = interpolation_weights(&stage, &f);
        Ok(StageFunctional { stage, lambda_set: ls, f, lambda })
    }

    pub fn stage(&self) -> &Stage {
        &self.stage
    }

    pub fn lambda_set(&self) -> &LambdaSet {
        &self.lambda_set
    }

    /// `ξₙ = Σ_{i≤n} aᵢ²`, the largest exponent sum.
    pub fn xi(&self) -> u64 {
        self.lambda_set.xi()
    }

    pub fn f(&self) -> &[Rational] {
        &self.f
    }

    pub fn lambda(&self) -> &[Rational] {
        &self.lambda
    }

    /// `φ(γ_k)` on the basis range `0 ≤ k < d`.
    pub fn phi_gamma(&self, k: u64) -> Result<Rational> {
        let d = self.stage.dimension() as u64;
        if k >= d {
            return Err(Error::GammaIndexOutOfRange { k, d });
        }
        Ok(self.f[k as usize].clone())
    }

    /// Apply the functional to window coordinates: `Σ_j λ_j v_j`.
    pub fn phi_apply(&self, coords: &[Rational]) -> Rational {
        assert_eq!(coords.len(), self.lambda.len(), "coordinate dimension mismatch");
        self.lambda.iter().zip(coords).map(|(l, v)| l * v).sum()
    }

    /// Weight route: `Σ_j λ_j 2^(−jl)` for any `l ≥ 0`.
    pub fn extension(&self, l: u64) -> Rational {
        let mut s = Rational::zero();
        for (o, j) in self.stage.window_indices().enumerate() {
            let e = (j as i128) * (l as i128);
            assert!(e <= i64::MAX as i128, "extension exponent overflow");
            s += &self.lambda[o] * pow2(-(e as i64));
        }
        s
    }

    /// Interpolation route: `Σ_k f_k (2^k t)^(1+aₙ) L_k(t)` at `t = 2^(−l)`,
    /// where `L_k` is the Lagrange basis over the offset nodes `2^(−k)`,
    /// `k = 0, …, d−1`.  Algebraically identical to `extension`, computed
    /// along an entirely different path.
    pub fn extension_interpolated(&self, l: u64) -> Rational {
        let d = self.stage.dimension() as u64;
        let an = self.stage.window_start() as i64;
        let t = |e: i64| pow2(-e); // 2^(−e)
        let mut s = Rational::zero();
        for k in 0..d {
            if self.f[k as usize].is_zero() {
                continue;
            }
            // (2^k · 2^(−l))^(1+aₙ)
            let lead_e = (k as i64 - l as i64) * (1 + an);
            let mut term = &self.f[k as usize] * pow2(lead_e);
            for j in 0..d {
                if j == k {
                    continue;
                }
                let num = t(l as i64) - t(j as i64);
                let den = t(k as i64) - t(j as i64);
                term *= num / den;
            }
            s += term;
        }
        s
    }

    /// Exact partial sum `Σ_{k<d} |φ(γ_k)|`.
    pub fn abs_f_sum(&self) -> Rational {
        self.f.iter().map(|v| v.abs()).sum()
    }

    /// Window offsets where the weight vanishes.
    pub fn kernel(&self) -> Vec<usize> {
        self.lambda
            .iter()
            .enumerate()
            .filter_map(|(o, l)| l.is_zero().then_some(o))
            .collect()
    }

    /// Scan `|extension(l)|` against the decay bound
    /// `2^(−l(1+aₙ) − a_{n+1}²/3)` for `l` in the inclusive range.  Each
    /// line is decided exactly by comparing cubes; verdicts are reported,
    /// never assumed.
    pub fn tail_scan(&self, l_from: u64, l_to: u64) -> Vec<TailRecord> {
        let an = self.stage.window_start() as i64;
        let an1 = self.stage.window_end() as i64;
        let mut out = Vec::new();
        for l in l_from..=l_to.max(l_from) {
            let v = self.extension(l).abs();
            // |v| ≤ 2^(−l(1+aₙ) − a_{n+1}²/3)  ⟺  |v|³ ≤ 2^(−3l(1+aₙ) − a_{n+1}²)
            let e3 = -3 * (l as i64) * (1 + an) - an1 * an1;
            let holds = &v * &v * &v <= pow2(e3);
            out.push(TailRecord { l, magnitude: v, holds });
        }
        out
    }

    /// First scan index of the tail regime, `1 + ξₙ`.
    pub fn tail_start(&self) -> u64 {
        1 + self.xi()
    }
}

/// `φ(γ_(v+1))` from the decomposition of `v = Σ tᵢaᵢ`.
fn phi_value(
    seq: &GrowthSequence,
    ls: &LambdaSet,
    prefix_squares: &[i64],
    v: u64,
) -> Result<Rational> {
    let Some(t) = ls.decomposition_of(v)? else {
        return Ok(Rational::zero());
    };
    let mut value = Rational::one();
    let mut exponent: i64 = 0;
    for (i, &ti) in t.iter().enumerate() {
        if ti == 0 {
            continue;
        }
        let ai = seq.a(i as u64 + 1)?;
        if ti == ai {
            return Ok(Rational::zero()); // the (1 − tᵢ/aᵢ) factor vanishes
        }
        exponent = exponent.saturating_add(ti as i64 * prefix_squares[i]);
        value *= rint(1) - rat(ti as i64, ai as i64);
    }
    if exponent > VALUE_EXPONENT_CAP {
        return Err(Error::ResourceExceeded(format!(
            "functional value exponent {exponent} exceeds the materialization cap"
        )));
    }
    Ok(value * pow2(-exponent))
}

/// Solve the transposed Vandermonde system `Σ_j λ_j x_j^k = f_k` at the
/// nodes `x_j = 2^(−j)`, `j ∈ W`, via the master polynomial and synthetic
/// deflation: `λ_j = q_j(applied to f) / Π_{i≠j}(x_j − x_i)` where
/// `q_j = master/(y − x_j)`.
fn interpolation_weights(stage: &Stage, f: &[Rational]) -> Vec<Rational> {
    let nodes: Vec<Rational> = stage.window_indices().map(|j| pow2(-(j as i64))).collect();
    let d = nodes.len();
    assert_eq!(f.len(), d);
    // master polynomial coefficients, constant term first, degree d
    let mut master = vec![Rational::zero(); d + 1];
    master[0] = Rational::one();
    let mut deg = 0;
    for x in &nodes {
        // multiply by (y − x)
        master[deg + 1] = master[deg].clone();
        for i in (1..=deg).rev() {
            let shifted = master[i - 1].clone();
            master[i] = shifted - x * &master[i];
        }
        master[0] = -(x * &master[0]);
        deg += 1;
    }
    let mut lambda = Vec::with_capacity(d);
    for (j, x) in nodes.iter().enumerate() {
        // synthetic deflation: master = (y − x)·q + r with r = 0
        let mut q = vec![Rational::zero(); d];
        q[d - 1] = master[d].clone();
        for i in (1..d).rev() {
            q[i - 1] = &master[i] + x * &q[i];
        }
        debug_assert!((&master[0] + x * &q[0]).is_zero(), "node is an exact root");
        // normalizer Π_{i≠j}(x_j − x_i)
        let mut den = Rational::one();
        for (i, xi) in nodes.iter().enumerate() {
            if i != j {
                den *= x - xi;
            }
        }
        let num: Rational = q.iter().zip(f).map(|(c, fk)| c * fk).sum();
        lambda.push(num / den);
    }
    lambda
}
