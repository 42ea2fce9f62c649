//! The bundled growth sequences used by the test suite and the CLI.
//!
//! Two regimes matter in practice:
//!
//! * **Desk regime** — small entries, every stage materializable and exactly
//!   computable, but some growth conditions deliberately fail.  These are the
//!   sequences the oracles and golden reports run on.
//! * **Steep regime** — entries satisfying the quadratic-gap condition
//!   `a_k² > 1 + 2^(2+a_{k-1}²)`, which forces `a₂ ≈ 2^85` and pushes `a₃`
//!   beyond any physical representation.  Entries past the representable
//!   range are carried as certified log-magnitude intervals; condition
//!   checking still *decides* every clause that involves them.

use num_bigint::BigInt;
use num_traits::One;

use crate::numeric::{rbig, rint, LogMagnitude};
use crate::sequence::{GrowthSequence, SeqEntry};

/// Names accepted by [`by_name`], in the order they are documented.
pub const PRESET_NAMES: [&str; 3] = ["desk-small", "desk-medium", "paper-13"];

/// Look a bundled sequence up by its CLI name.
pub fn by_name(name: &str) -> Option<GrowthSequence> {
    match name {
        "desk-small" => Some(desk_small()),
        "desk-medium" => Some(desk_medium()),
        "paper-13" => Some(paper_13()),
        _ => None,
    }
}

/// The small desk sequence `(2, 9, 10, …, 16)`.
///
/// Stage 1 has window `(2, 9]` (dimension 7) and is the sequence every
/// pinned-value test is written against; the continuation `10, …, 16` keeps
/// cumulative conditions evaluable a few indices further.  Exactly one stage
/// is buildable at the default dimension cap: stage 2 would need the window
/// end `a₁₀`, which is past the materialized prefix.
pub fn desk_small() -> GrowthSequence {
    GrowthSequence::from_integers(
        "desk-small",
        &[2, 9, 10, 11, 12, 13, 14, 15, 16],
    )
    .expect("bundled sequence is valid")
}

/// The medium desk sequence `(3, 40, 41, …, 78)`.
///
/// Stage 1 has window `(3, 40]` (dimension 37) — big enough that seminorm
/// and norm computations must go through the certified-interval route rather
/// than fully exact factorizations, which is exactly what it is bundled to
/// exercise.
pub fn desk_medium() -> GrowthSequence {
    let mut v = vec![3u64];
    v.extend(40..=78);
    GrowthSequence::from_integers("desk-medium", &v).expect("bundled sequence is valid")
}

/// The steep three-entry sequence: `a₁ = 13`, `a₂` the smallest integer with
/// `a₂² > 1 + 2^(2+a₁²) = 1 + 2^171`, and `a₃` as a certified log-magnitude
/// point just above the same condition's forcing bound for the next step.
///
/// `a₂` is an exact 86-bit integer (too large for `u64`, available via
/// big-integer access); `a₃` could never be materialized — `log₂ a₃` is
/// itself astronomically large — so it is carried as the exact rational
/// `log₂ a₃ = (3 + a₂²)/2`, which certifies `a₃² = 2^(3+a₂²) > 1 + 2^(2+a₂²)`.
pub fn paper_13() -> GrowthSequence {
    let a1: u64 = 13;
    let a2 = steep_successor(&BigInt::from(a1));
    let log_a3 = (rint(3) + rbig(&a2 * &a2)) / rint(2);
    GrowthSequence::new(
        "paper-13",
        vec![
            SeqEntry::exact_u64(a1),
            SeqEntry::Exact(a2),
            SeqEntry::Magnitude(LogMagnitude::point(log_a3)),
        ],
    )
    .expect("bundled sequence is valid")
}

/// The smallest integer `b` with `b² > 1 + 2^(2+a²)`.
pub fn steep_successor(a: &BigInt) -> BigInt {
    let exp =
        2usize + usize::try_from(a * a).expect("exponent fits usize for bundled sequences");
    let bound: BigInt = BigInt::one() + (BigInt::one() << exp);
    bound.sqrt() + 1
}

/// The short test sequence `(2, 5, 8, 9, …, 13)` used by randomized
/// property tests: two buildable stages, each with a width-3 window —
/// `(2, 5]` and `(5, 8]` — small enough for brute-force cross-checks.
pub fn property_sequence() -> GrowthSequence {
    GrowthSequence::from_integers("property", &[2, 5, 8, 9, 10, 11, 12, 13])
        .expect("bundled sequence is valid")
}

/// The medium equivalence-test sequence `(3, 20, 21, …, 38)`: stage 1 window
/// `(3, 20]` of dimension 17 — the largest size where the fully exact
/// factorization route still answers in seconds.
pub fn exact_medium() -> GrowthSequence {
    let mut v = vec![3u64];
    v.extend(20..=38);
    GrowthSequence::from_integers("exact-medium", &v).expect("bundled sequence is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stage::max_buildable_stage;

    #[test]
    fn bundled_sequences_validate_and_resolve_by_name() {
        for name in PRESET_NAMES {
            let seq = by_name(name).expect("listed preset resolves");
            assert_eq!(seq.name(), name);
        }
        assert!(by_name("no-such-preset").is_none());
    }

    #[test]
    fn desk_sequences_have_the_documented_shape() {
        let small = desk_small();
        assert_eq!(small.a(1).unwrap(), 2);
        assert_eq!(small.a(2).unwrap(), 9);
        assert_eq!(small.a(9).unwrap(), 16);
        assert_eq!(max_buildable_stage(&small, 512), 1);

        let medium = desk_medium();
        assert_eq!(medium.a(2).unwrap(), 40);
        assert_eq!(medium.a(2).unwrap() - medium.a(1).unwrap(), 37);
        assert!(max_buildable_stage(&medium, 512) >= 1);

        let exact = exact_medium();
        assert_eq!(exact.a(2).unwrap() - exact.a(1).unwrap(), 17);

        let prop = property_sequence();
        assert_eq!(max_buildable_stage(&prop, 512), 2);
    }

    #[test]
    fn steep_second_entry_is_the_smallest_root_above_the_gap() {
        let seq = paper_13();
        let a2 = seq.a_big(2).unwrap();
        let bound: BigInt = BigInt::one() + (BigInt::one() << 171usize);
        assert!(&a2 * &a2 > bound, "a₂² exceeds the gap bound");
        let below = &a2 - 1;
        assert!(&below * &below <= bound, "a₂ is minimal");
        // too large for plain u64 access, by design
        assert!(seq.a(2).is_err());
        assert!(seq.a_big(2).is_ok());
    }

    #[test]
    fn steep_third_entry_is_certified_above_the_next_gap() {
        let seq = paper_13();
        let a2 = seq.a_big(2).unwrap();
        // 2·log₂ a₃ = 3 + a₂² > 2 + a₂², so a₃² > 2^(2+a₂²) ≥ 1 + 2^(2+a₂²) − 1
        let log_a3 = seq.entry(3).unwrap().log_mag(64);
        let lo = log_a3.lo().clone();
        let needed = (rint(2) + rbig(&a2 * &a2)) / rint(2);
        assert!(lo > needed);
    }
}
