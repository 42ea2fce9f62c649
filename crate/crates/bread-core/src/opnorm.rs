//! Certified operator-norm enclosures for the diagonal stage representations.
//!
//! An element acts on a stage by pointwise multiplication of its window
//! coordinates, so in the seminorm's inner product the action of `T` is the
//! diagonal matrix `D = diag(d_j)` and its operator norm squared is
//!
//! `‖T‖² = sup { (Dx)ᵀG(Dx) / xᵀGx : xᵀGx > 0 }`,
//!
//! the largest generalized eigenvalue of the pencil `(DGD, G)`.  The Gram
//! matrix has identically zero rows wherever the weight `λ_j` vanishes, so
//! the problem restricts losslessly to the support `J = {j : λ_j ≠ 0}`,
//! where `G` is positive *definite* (a Gram matrix plus a strictly positive
//! diagonal).
//!
//! The enclosure comes from PSD bisection — `‖T‖² ≤ μ` iff `μG − DGD ⪰ 0` —
//! decided by exact symmetric elimination on small windows and by interval
//! elimination with escalating precision on large ones.  Lower bounds only
//! ever come from explicit Rayleigh witnesses: the all-ones vector (the
//! compression of the identity) is always tried, and every failed PSD probe
//! hands back a certified witness that becomes the new lower bound.
//! Floating point appears solely to *propose* probe values and candidate
//! vectors; every reported digit is backed by exact or outward-rounded
//! interval arithmetic.
//!
//! On top of the stagewise norm sit the truncated global norm (the maximum
//! of the ambient supremum norm and the stage norms up to a cut-off, with
//! an a-priori coefficient cap where one exists) and the approximate-
//! identity defect norms.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::linalg::{self, CertPsdOutcome, Matrix, PsdOutcome, Vector};
use crate::numeric::{pow2, rint, sqrt_enclosure, Dyadic, Rational, Rounding};
use crate::seminorm::{stage_bits, StageSeminorm, EXACT_DECOMP_DIM};
use crate::sequence::GrowthSequence;
use crate::stage::Stage;

/// First precision tried by the interval PSD decision.
const PSD_BITS_START: u32 = 256;

/// Precision ceiling for the interval PSD decision.  The elimination cost is
/// roughly quadratic in the bit count, so past this the bisection stops
/// refining and returns the honest wider enclosure instead.
const PSD_BITS_CAP: u32 = 1024;

/// Window-dimension cap used when materializing stages for global norms.
const GLOBAL_DIMENSION_CAP: u64 = 512;

/// Cap on the exponent `a_j²` (and on powers like `a_k`-fold products)
/// materialized inside ambient generators and defect elements.
const AMBIENT_EXPONENT_CAP: u64 = 1 << 20;

// === the diagonal representation ===

/// Multiplication by an element, compressed to one window: a diagonal
/// operator with exact rational entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StageOperator {
    n: u64,
    diag: Vector,
}

impl StageOperator {
    /// The compression of an ambient element: `d_j = χ_j(T)` over the window.
    pub fn from_element(stage: &Stage, x: &Element) -> Self {
        StageOperator { n: stage.n(), diag: stage.window_coords(x) }
    }

    pub fn from_diagonal(n: u64, diag: Vector) -> Self {
        StageOperator { n, diag }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn diag(&self) -> &[Rational] {
        &self.diag
    }

    /// Composition = entrywise product of diagonals, exact.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "operators live on different stages");
        assert_eq!(self.diag.len(), other.diag.len());
        let diag = self.diag.iter().zip(&other.diag).map(|(a, b)| a * b).collect();
        StageOperator { n: self.n, diag }
    }

    /// Apply to window coordinates (pointwise).
    pub fn apply(&self, x: &[Rational]) -> Vector {
        assert_eq!(x.len(), self.diag.len());
        self.diag.iter().zip(x).map(|(d, v)| d * v).collect()
    }
}

// === norm enclosures ===

/// A certified two-sided bound on an operator norm.
///
/// Invariants: `lo ≤ ‖T‖ ≤ hi`; `lo² ≤ lo_sq` and `hi_sq ≤ hi²`; the stored
/// witness `w` reproduces the lower bound exactly:
/// `lo_sq ≤ (Dw)ᵀG(Dw) / wᵀGw`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormEnclosure {
    pub lo: Rational,
    pub hi: Rational,
    /// Certified lower bound on `‖T‖²` (the quantity the bisection tracks).
    pub lo_sq: Rational,
    /// Certified upper bound on `‖T‖²`.
    pub hi_sq: Rational,
    /// Rayleigh witness for `lo_sq`, in full window coordinates.
    pub witness: Vector,
    /// How the bound was obtained (deterministic; counts and precisions
    /// only, never timing).
    pub method: String,
}

impl NormEnclosure {
    /// Exact point value (used for constant diagonals and the ambient norm).
    fn exact(value: Rational, value_sq: Rational, witness: Vector, method: &str) -> Self {
        NormEnclosure {
            lo: value.clone(),
            hi: value,
            lo_sq: value_sq.clone(),
            hi_sq: value_sq,
            witness,
            method: method.to_string(),
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Which arithmetic the PSD decisions run in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    /// Exact on small supports, interval arithmetic on large ones.
    Auto,
    /// Force exact symmetric elimination (only sensible for small windows).
    Exact,
    /// Force interval elimination with precision escalation.
    Certified,
}

/// `‖ρₙ(T)‖` for an ambient element.
pub fn op_norm_element(
    norm: &StageSeminorm,
    t: &Element,
    precision_bits: u32,
) -> Result<NormEnclosure> {
    let op = StageOperator::from_element(norm.functional().stage(), t);
    op_norm(norm, &op, precision_bits)
}

/// `‖ρₙ(T)‖` for a stage operator.
pub fn op_norm(
    norm: &StageSeminorm,
    op: &StageOperator,
    precision_bits: u32,
) -> Result<NormEnclosure> {
    assert_eq!(op.n(), norm.functional().stage().n(), "operator from a different stage");
    op_norm_diag_with(norm, op.diag(), precision_bits, NormMode::Auto)
}

/// Norm of the diagonal action `diag` in the stage seminorm, with an
/// explicit choice of arithmetic.
pub fn op_norm_diag_with(
    norm: &StageSeminorm,
    diag: &[Rational],
    precision_bits: u32,
    mode: NormMode,
) -> Result<NormEnclosure> {
    let stage = norm.functional().stage();
    let dim = stage.dimension();
    assert_eq!(diag.len(), dim, "diagonal length does not match the window");

    // restrict to the support of the weights: zero rows of G carry nothing
    let lambda = norm.functional().lambda();
    let jidx: Vec<usize> = (0..dim).filter(|&j| !lambda[j].is_zero()).collect();
    if jidx.is_empty() {
        return Err(Error::DegenerateStage { n: stage.n() as usize, d: dim as u64 });
    }
    let m = jidx.len();
    let embed = |v: &[Rational]| -> Vector {
        let mut full = vec![Rational::zero(); dim];
        for (pos, &j) in jidx.iter().enumerate() {
            full[j] = v[pos].clone();
        }
        full
    };

    let d: Vector = jidx.iter().map(|&j| diag[j].clone()).collect();

    // constant diagonal acts as the scalar c: the norm is |c| exactly
    if d.iter().all(|v| *v == d[0]) {
        let c = d[0].abs();
        let c_sq = &c * &c;
        return Ok(NormEnclosure::exact(c, c_sq, embed(&vec![rint(1); m]), "constant-diagonal"));
    }

    let b: Matrix =
        jidx.iter().map(|&r| jidx.iter().map(|&c| norm.gram()[r][c].clone()).collect()).collect();
    let a: Matrix = (0..m)
        .map(|r| (0..m).map(|c| &d[r] * &b[r][c] * &d[c]).collect())
        .collect();

    let exact = match mode {
        NormMode::Auto => m <= EXACT_DECOMP_DIM,
        NormMode::Exact => true,
        NormMode::Certified => false,
    };
    let ray_bits = stage_bits(stage.window_end());

    // --- lower bound: Rayleigh candidates, the identity compression first ---
    let mut lo_sq = Rational::zero();
    let mut witness: Vector = vec![rint(1); m];
    let consider = |cand: &[Rational], lo_sq: &mut Rational, witness: &mut Vector| {
        if cand.iter().all(|v| v.is_zero()) {
            return;
        }
        if let Some(r) = rayleigh_lower(&a, &b, cand, exact, ray_bits) {
            if r > *lo_sq {
                *lo_sq = r;
                *witness = cand.to_vec();
            }
        }
    };
    consider(&vec![rint(1); m], &mut lo_sq, &mut witness);
    consider(&d.clone(), &mut lo_sq, &mut witness);
    for r in 0..m {
        let mut unit = vec![Rational::zero(); m];
        unit[r] = rint(1);
        consider(&unit, &mut lo_sq, &mut witness);
    }
    let proposal = power_iteration_proposal(&a, &b);
    if let Some((cand, _)) = &proposal {
        consider(cand, &mut lo_sq, &mut witness);
    }

    // --- upper bound: PSD probes, then bisection ---
    let mut max_bits_used: u32 = 0;
    let mut precision_exhausted = false;
    let mut steps = 0usize;

    let probe = |mu: &Rational,
                     lo_sq: &mut Rational,
                     witness: &mut Vector,
                     max_bits_used: &mut u32|
     -> Option<bool> {
        // decide μB − A ⪰ 0; None = undecided at the precision ceiling
        let mut probe_m: Matrix = (0..m)
            .map(|r| (0..m).map(|c| mu * &b[r][c] - &a[r][c]).collect())
            .collect();
        for r in 0..m {
            for c in 0..r {
                probe_m[r][c] = probe_m[c][r].clone();
            }
        }
        let (decision, bits) = decide_psd(&probe_m, exact);
        *max_bits_used = (*max_bits_used).max(bits);
        match decision {
            PsdDecision::Psd => Some(true),
            PsdDecision::NotPsd(w) => {
                // certified: wᵀ(μB−A)w < 0 and B ≻ 0 on the support, so the
                // exact Rayleigh quotient of w exceeds μ
                if *mu > *lo_sq {
                    *lo_sq = mu.clone();
                    *witness = w.clone();
                }
                if let Some(r) = rayleigh_lower(&a, &b, &w, exact, ray_bits) {
                    if r > *lo_sq {
                        *lo_sq = r;
                        *witness = w;
                    }
                }
                Some(false)
            }
            PsdDecision::Undecided => None,
        }
    };

    let max_d_sq =
        d.iter().map(|v| v * v).max().expect("support is nonempty");
    let mut start_probes: Vec<Rational> = Vec::new();
    if let Some((_, mu_est)) = &proposal {
        // slightly above the float estimate of the top eigenvalue
        if let Some(r) = Rational::from_float(mu_est * 1.01) {
            if r.is_positive() {
                start_probes.push(r);
            }
        }
    }
    if max_d_sq <= rint(1) {
        // candidate contraction: μ = 1 doubles as the contraction certificate
        start_probes.push(rint(1));
    }
    start_probes.sort();
    start_probes.dedup();

    let mut hi_sq: Option<Rational> = None;
    for mu in &start_probes {
        if *mu <= lo_sq {
            continue;
        }
        if probe(mu, &mut lo_sq, &mut witness, &mut max_bits_used) == Some(true) {
            hi_sq = Some(mu.clone());
            break;
        }
    }
    if hi_sq.is_none() {
        // geometric search upward; terminates because the norm is finite
        let mut mu = std::cmp::max(rint(1), &lo_sq + &lo_sq);
        for _ in 0..128 {
            match probe(&mu, &mut lo_sq, &mut witness, &mut max_bits_used) {
                Some(true) => {
                    hi_sq = Some(mu);
                    break;
                }
                _ => mu = &mu * rint(4),
            }
        }
    }
    let Some(mut hi_sq) = hi_sq else {
        return Err(Error::ResourceExceeded(
            "no certified upper bound found for the operator norm".to_string(),
        ));
    };

    let step_cap = precision_bits as usize + 160;
    loop {
        let width = &hi_sq - &lo_sq;
        let tol = pow2(-(precision_bits as i64) - 2)
            * std::cmp::max(rint(1), hi_sq.clone());
        if width <= tol || steps >= step_cap || precision_exhausted {
            break;
        }
        let mid = (&lo_sq + &hi_sq) / rint(2);
        let mut mu = Dyadic::round_from_rational(&mid, precision_bits + 32, Rounding::Down)
            .to_rational();
        if mu <= lo_sq || mu >= hi_sq {
            mu = mid;
        }
        match probe(&mu, &mut lo_sq, &mut witness, &mut max_bits_used) {
            Some(true) => hi_sq = mu,
            Some(false) => {} // the probe already advanced lo_sq past μ
            None => precision_exhausted = true,
        }
        steps += 1;
    }

    let sqrt_bits = precision_bits + 8;
    let lo = sqrt_enclosure(&lo_sq, sqrt_bits)?.lo().clone();
    let hi = sqrt_enclosure(&hi_sq, sqrt_bits)?.hi().clone();
    let mut method = if exact {
        format!("psd-bisection-exact(steps={steps})")
    } else {
        format!("psd-bisection-certified(steps={steps}, bits<={max_bits_used})")
    };
    if precision_exhausted {
        method.push_str(", precision-exhausted");
    }
    Ok(NormEnclosure { lo, hi, lo_sq, hi_sq, witness: embed(&witness), method })
}

// === PSD decision and Rayleigh helpers ===

enum PsdDecision {
    Psd,
    NotPsd(Vector),
    Undecided,
}

/// Decide PSD-ness; returns the decision and the interval precision used
/// (0 for the exact path).
fn decide_psd(m: &Matrix, exact: bool) -> (PsdDecision, u32) {
    if exact {
        let d = match linalg::psd_check(m) {
            PsdOutcome::Psd => PsdDecision::Psd,
            PsdOutcome::NotPsd { witness } => PsdDecision::NotPsd(witness),
        };
        return (d, 0);
    }
    let mut bits = PSD_BITS_START;
    loop {
        match linalg::psd_check_certified(m, bits) {
            CertPsdOutcome::Psd => return (PsdDecision::Psd, bits),
            CertPsdOutcome::NotPsd { witness } => return (PsdDecision::NotPsd(witness), bits),
            CertPsdOutcome::Inconclusive => {
                if bits >= PSD_BITS_CAP {
                    return (PsdDecision::Undecided, bits);
                }
                bits *= 2;
            }
        }
    }
}

/// A sound lower bound on the generalized Rayleigh quotient
/// `xᵀAx / xᵀBx` (exact in exact mode), or `None` when the denominator is
/// not certifiably positive.
fn rayleigh_lower(
    a: &Matrix,
    b: &Matrix,
    x: &[Rational],
    exact: bool,
    bits: u32,
) -> Option<Rational> {
    if exact {
        let den = linalg::quadratic_form(b, x);
        if !den.is_positive() {
            return None;
        }
        Some(linalg::quadratic_form(a, x) / den)
    } else {
        let den = linalg::quadratic_form_certified(b, x, bits);
        if !den.lo().is_positive() {
            return None;
        }
        let lo = linalg::quadratic_form_certified(a, x, bits).lo() / den.hi();
        Some(if lo.is_negative() { Rational::zero() } else { lo })
    }
}

/// Floating-point power iteration on the congruence-scaled pencil, returning
/// a rational candidate vector (in original coordinates) and a float
/// estimate of the top generalized eigenvalue.  Never certifies anything.
fn power_iteration_proposal(a: &Matrix, b: &Matrix) -> Option<(Vector, f64)> {
    let n = b.len();
    // scale by s_j = 2^(−⌊log₂ B_jj⌋/2) so the diagonal of SBS is Θ(1);
    // Cauchy–Schwarz then keeps every entry of SBS in f64 range
    let half_exp: Vec<i64> = (0..n)
        .map(|j| {
            debug_assert!(b[j][j].is_positive());
            crate::numeric::floor_log2(&b[j][j]).div_euclid(2)
        })
        .collect();
    let to_f64 = |x: &Rational, j: usize, k: usize| -> Option<f64> {
        let scaled = x * pow2(-half_exp[j]) * pow2(-half_exp[k]);
        scaled.to_f64().filter(|v| v.is_finite())
    };
    let mut bf = vec![vec![0.0f64; n]; n];
    let mut af = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        for k in 0..n {
            bf[j][k] = to_f64(&b[j][k], j, k)?;
            af[j][k] = to_f64(&a[j][k], j, k)?;
        }
    }
    let matvec = |m: &[Vec<f64>], v: &[f64]| -> Vec<f64> {
        m.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
    };
    let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };

    let mut y = vec![1.0f64; n];
    for _ in 0..40 {
        let z = matvec(&af, &y);
        let w = linalg::solve_f64(&bf, &z)?;
        let scale = w.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if !(scale.is_finite() && scale > 0.0) {
            return None;
        }
        y = w.iter().map(|v| v / scale).collect();
    }
    let num = dot(&y, &matvec(&af, &y));
    let den = dot(&y, &matvec(&bf, &y));
    if !(num.is_finite() && den.is_finite() && den > 0.0) {
        return None;
    }
    let mu_est = num / den;
    if !(mu_est.is_finite() && mu_est >= 0.0) {
        return None;
    }
    // rationalize at 40 bits and undo the congruence scaling
    let mut cand = Vec::with_capacity(n);
    let grid = (1u64 << 40) as f64;
    for (v, e) in y.iter().zip(&half_exp) {
        let q = Rational::from_float((v * grid).round())? / Rational::from_float(grid)?;
        cand.push(q * pow2(-e));
    }
    if cand.iter().all(|v| v.is_zero()) {
        return None;
    }
    Some((cand, mu_est))
}

// === global (all-stage) norms ===

/// One line of the stagewise norm table; stage `0` is the ambient supremum
/// norm, reported as an exact point enclosure.
#[derive(Debug, Clone)]
pub struct StageNormRow {
    pub n: u64,
    pub enclosure: NormEnclosure,
    /// Set when the stage contributed trivially (e.g. a degenerate window
    /// whose seminorm vanishes identically).
    pub note: Option<String>,
}

/// The truncated global norm: stagewise certified data plus an a-priori
/// coefficient cap where one exists.
///
/// `lo` is a sound lower bound for the full supremum over *all* stages.
/// `truncated_hi` only bounds the stages actually computed — the supremum
/// past `n_max` is out of reach pointwise — while `ambient_cap`, when
/// present, bounds the full norm through the generating family:
/// multiplication by `g` and by `a_i⁻¹e_i` never expands any stage norm or
/// the supremum norm, so `‖Σ c_m g^m + Σ c_i e_i‖ ≤ Σ|c_m| + Σ|c_i|·a_i`.
#[derive(Debug, Clone)]
pub struct GlobalNorm {
    pub n_max: u64,
    pub rows: Vec<StageNormRow>,
    pub lo: Rational,
    pub truncated_hi: Rational,
    pub ambient_cap: Option<Rational>,
}

impl GlobalNorm {
    /// A certified upper bound on the *full* norm, when one exists.
    pub fn sound_hi(&self) -> Option<Rational> {
        self.ambient_cap.clone()
    }
}

/// The coefficient cap `Σ|c_m| + Σ|c_i|·a_i`, or `None` when a correction
/// index has no materialized scaling.
pub fn ambient_cap(seq: &GrowthSequence, t: &Element) -> Option<Rational> {
    let mut cap: Rational = t.poly().values().map(|c| c.abs()).sum();
    for (i, c) in t.corrections() {
        let ai = seq.a(*i).ok()?;
        cap += c.abs() * crate::numeric::rbig(ai.into());
    }
    Some(cap)
}

/// Truncated global norm of `t`: the maximum of the ambient supremum norm
/// and the stage norms `1 ..= n_max`.  Monotone in `n_max`.  Degenerate
/// stages (identically zero seminorm) contribute a zero row with a note;
/// stages that cannot be materialized at all are an error.
pub fn global_norm(
    seq: &GrowthSequence,
    t: &Element,
    n_max: u64,
    precision_bits: u32,
) -> Result<GlobalNorm> {
    let c0 = t.c0_norm();
    let c0_sq = &c0 * &c0;
    let mut rows = vec![StageNormRow {
        n: 0,
        enclosure: NormEnclosure::exact(c0, c0_sq, vec![], "sup-norm"),
        note: None,
    }];
    for n in 1..=n_max {
        let sf = crate::functional::StageFunctional::new(seq, n, GLOBAL_DIMENSION_CAP)?;
        let norm = StageSeminorm::new(sf)?;
        match op_norm_element(&norm, t, precision_bits) {
            Ok(enclosure) => rows.push(StageNormRow { n, enclosure, note: None }),
            Err(Error::DegenerateStage { .. }) => rows.push(StageNormRow {
                n,
                enclosure: NormEnclosure::exact(
                    Rational::zero(),
                    Rational::zero(),
                    vec![],
                    "degenerate-stage",
                ),
                note: Some("seminorm vanishes identically; zero quotient".to_string()),
            }),
            Err(e) => return Err(e),
        }
    }
    let lo = rows.iter().map(|r| r.enclosure.lo.clone()).max().expect("stage 0 present");
    let truncated_hi =
        rows.iter().map(|r| r.enclosure.hi.clone()).max().expect("stage 0 present");
    Ok(GlobalNorm { n_max, rows, lo, truncated_hi, ambient_cap: ambient_cap(seq, t) })
}

// === approximate-identity defects ===

/// Verdict on a truncated-norm comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncatedVerdict {
    /// The a-priori cap already sits below the threshold: holds globally.
    Holds,
    /// Every computed stage complies but the uncomputed tail is unverified.
    HoldsTruncated,
    /// The certified lower bound exceeds the threshold: fails globally.
    Fails,
    /// The enclosure straddles the threshold.
    Undecided,
}

impl TruncatedVerdict {
    pub fn describe(&self) -> &'static str {
        match self {
            TruncatedVerdict::Holds => "holds",
            TruncatedVerdict::HoldsTruncated => "holds-up-to-truncation",
            TruncatedVerdict::Fails => "fails",
            TruncatedVerdict::Undecided => "undecided",
        }
    }
}

fn truncated_verdict(norm: &GlobalNorm, threshold: &Rational) -> TruncatedVerdict {
    if let Some(cap) = &norm.ambient_cap {
        if cap <= threshold {
            return TruncatedVerdict::Holds;
        }
    }
    if norm.lo > *threshold {
        return TruncatedVerdict::Fails;
    }
    if norm.truncated_hi <= *threshold {
        return TruncatedVerdict::HoldsTruncated;
    }
    TruncatedVerdict::Undecided
}

/// The three defect norms of the `k`-th approximate-identity vector
/// `y_k = g_{a_k}^{a_k}` (the normalization `x_k = (k/(k+1))·y_k` only
/// rescales the supremum norm, reported separately):
///
/// * `norm_yk  = ‖y_k‖`            against `1 + 1/k`,
/// * `defect   = ‖y_k·g − g‖`      against `1/k`,
/// * `tail     = ‖g^{a_k}(I−P_{a_k})‖` against `k^{−a_k}`.
#[derive(Debug, Clone)]
pub struct CaiDefects {
    pub k: u64,
    pub a_k: u64,
    /// `‖x_k‖_∞ = (k/(k+1))·‖y_k‖_∞`, exact.
    pub sup_norm_xk: Rational,
    pub norm_yk: GlobalNorm,
    pub defect: GlobalNorm,
    pub tail: GlobalNorm,
    /// `[1 + 1/k, 1/k, k^{−a_k}]`.
    pub thresholds: [Rational; 3],
    pub verdicts: [TruncatedVerdict; 3],
}

/// Evaluate the approximate-identity hypotheses at level `k`, truncating the
/// global norms at stage `n_max`.
pub fn cai_defects(
    seq: &GrowthSequence,
    k: u64,
    n_max: u64,
    precision_bits: u32,
) -> Result<CaiDefects> {
    assert!(k >= 1, "approximate-identity levels are 1-based");
    let a_k = seq.a(k)?;
    if a_k > AMBIENT_EXPONENT_CAP.min(1 << 9) {
        return Err(Error::ResourceExceeded(format!(
            "defect element with scaling a_{k} = {a_k} is too large to expand"
        )));
    }
    let y = Element::gn(a_k).pow(a_k);
    let g = Element::g();
    let defect_el = y.mul(&g).sub(&g);
    let gp = g.pow(a_k);
    let tail_el = gp.sub(&gp.mul(&Element::pn(a_k)));

    let norm_yk = global_norm(seq, &y, n_max, precision_bits)?;
    let defect = global_norm(seq, &defect_el, n_max, precision_bits)?;
    let tail = global_norm(seq, &tail_el, n_max, precision_bits)?;

    let kq = rint(k as i64);
    let inv_k = Rational::one() / &kq;
    let mut k_pow = Rational::one();
    for _ in 0..a_k {
        k_pow *= &inv_k;
    }
    let thresholds = [Rational::one() + &inv_k, inv_k, k_pow];
    let verdicts = [
        truncated_verdict(&norm_yk, &thresholds[0]),
        truncated_verdict(&defect, &thresholds[1]),
        truncated_verdict(&tail, &thresholds[2]),
    ];
    let sup_norm_xk = y.c0_norm() * rint(k as i64) / rint(k as i64 + 1);
    Ok(CaiDefects { k, a_k, sup_norm_xk, norm_yk, defect, tail, thresholds, verdicts })
}

// === coefficient-sum certificates ===

/// A member of the ambient generating family, each of norm at most one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientGenerator {
    /// `g`, the diagonal generator.
    Diagonal,
    /// `a_i⁻¹ e_i`.
    ScaledCoordinate { i: u64 },
    /// `(j/(j+1)) · 2^(a_j²) · g^(a_j)`.
    CompressedIdempotent { j: u64 },
    /// `j · (2^(a_j²) · g^(1+a_j) − g)`.
    ShiftedIdempotent { j: u64 },
}

/// Materialize a generator as an ambient element.
pub fn ambient_generator(seq: &GrowthSequence, gen: AmbientGenerator) -> Result<Element> {
    let idem_exponent = |j: u64| -> Result<(u64, i64)> {
        let aj = seq.a(j)?;
        let sq = aj.checked_mul(aj).filter(|&s| s <= AMBIENT_EXPONENT_CAP).ok_or_else(|| {
            Error::ResourceExceeded(format!(
                "idempotent exponent a_{j}² exceeds the materialization cap"
            ))
        })?;
        Ok((aj, sq as i64))
    };
    Ok(match gen {
        AmbientGenerator::Diagonal => Element::g(),
        AmbientGenerator::ScaledCoordinate { i } => {
            let ai = seq.a(i)?;
            Element::e(i).scale(&(Rational::one() / crate::numeric::rbig(ai.into())))
        }
        AmbientGenerator::CompressedIdempotent { j } => {
            let (aj, sq) = idem_exponent(j)?;
            Element::monomial(aj, crate::numeric::rat(j as i64, j as i64 + 1) * pow2(sq))
        }
        AmbientGenerator::ShiftedIdempotent { j } => {
            let (aj, sq) = idem_exponent(j)?;
            Element::monomial(1 + aj, rint(j as i64) * pow2(sq))
                .sub(&Element::monomial(1, rint(j as i64)))
        }
    })
}

/// Validate that `t = Σ cᵢ · Πᵢ (generators)` exactly and return the
/// coefficient sum `Σ|cᵢ|` — an upper bound for any norm in which the
/// generating family is contractive and products stay contractive.
pub fn max_norm_certificate(
    seq: &GrowthSequence,
    t: &Element,
    decomposition: &[(Rational, Vec<AmbientGenerator>)],
) -> Result<Rational> {
    let mut sum = Element::zero();
    let mut cap = Rational::zero();
    for (coeff, gens) in decomposition {
        assert!(!gens.is_empty(), "empty products have no meaning in a non-unital algebra");
        let mut prod = ambient_generator(seq, gens[0])?;
        for gen in &gens[1..] {
            prod = prod.mul(&ambient_generator(seq, *gen)?);
        }
        sum = sum.add(&prod.scale(coeff));
        cap += coeff.abs();
    }
    if sum != *t {
        return Err(Error::CertificateMismatch);
    }
    Ok(cap)
}
