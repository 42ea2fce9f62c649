//! The index sets Λₙ of achievable exponent sums.
//!
//! Λₙ = { Σᵢ tᵢ·aᵢ : 0 ≤ tᵢ ≤ aᵢ, i = 1..n } with maximum ξₙ = Σ aᵢ².
//! The set is enumerated exhaustively (with an explicit budget) and every
//! value keeps its exponent tuple; values reachable by two distinct tuples
//! are flagged, because downstream evaluation is only well defined when the
//! decomposition is unique.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::sequence::GrowthSequence;

/// Hard cap on Π(aᵢ+1), the number of exponent tuples enumerated.
pub const LAMBDA_BUDGET: u128 = 1_000_000;

/// The achievable-sum set at one stage, with decompositions.
#[derive(Debug, Clone)]
pub struct LambdaSet {
    n: u64,
    /// Sorted, deduplicated achievable sums.
    elements: Vec<u64>,
    /// ξₙ = Σ aᵢ² = max of `elements`.
    xi: u64,
    /// value → the exponent tuple (t₁, …, tₙ) that reaches it (first found).
    decomposition: BTreeMap<u64, Vec<u64>>,
    /// values reached by at least two distinct tuples.
    ambiguous: BTreeSet<u64>,
}

impl LambdaSet {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn xi(&self) -> u64 {
        self.xi
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, v: u64) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    /// Values reachable by more than one exponent tuple.
    pub fn ambiguous_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.ambiguous.iter().copied()
    }

    pub fn has_ambiguity(&self) -> bool {
        !self.ambiguous.is_empty()
    }

    /// The unique exponent tuple reaching `v`.
    ///
    /// * `Ok(None)` — `v` is not an achievable sum;
    /// * `Err(AmbiguousIndex)` — `v` is achievable in two different ways, so
    ///   no caller may rely on *the* decomposition.
    pub fn decomposition_of(&self, v: u64) -> Result<Option<&[u64]>> {
        if self.ambiguous.contains(&v) {
            return Err(Error::AmbiguousIndex { n: self.n as usize, k: v.to_string() });
        }
        Ok(self.decomposition.get(&v).map(|t| t.as_slice()))
    }
}

/// Enumerate Λₙ for a sequence materialized through index `n`.
///
/// # Errors
/// * entries missing or oversized → the sequence accessor's error;
/// * Π(aᵢ+1) beyond `LAMBDA_BUDGET` → resource error (callers with a
///   verified gap condition can fall back to greedy decomposition instead).
pub fn lambda_set(seq: &GrowthSequence, n: u64) -> Result<LambdaSet> {
    let a: Vec<u64> = (1..=n).map(|i| seq.a(i)).collect::<Result<_>>()?;
    let tuples: u128 = a.iter().map(|&ai| ai as u128 + 1).product();
    if tuples > LAMBDA_BUDGET {
        return Err(Error::ResourceExceeded(format!(
            "Λ enumeration needs {tuples} exponent tuples (budget {LAMBDA_BUDGET})"
        )));
    }

    let mut decomposition: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut ambiguous: BTreeSet<u64> = BTreeSet::new();
    let mut t = vec![0u64; n as usize];
    loop {
        let v: u64 = t.iter().zip(&a).map(|(&ti, &ai)| ti * ai).sum();
        match decomposition.get(&v) {
            None => {
                decomposition.insert(v, t.clone());
            }
            Some(prev) if prev != &t => {
                ambiguous.insert(v);
            }
            Some(_) => {}
        }
        // odometer: increment t₁ fastest
        let mut pos = 0;
        loop {
            if pos == n as usize {
                let elements: Vec<u64> = decomposition.keys().copied().collect();
                let xi: u64 = a.iter().map(|&ai| ai * ai).sum();
                debug_assert_eq!(elements.last().copied(), Some(xi));
                debug_assert_eq!(elements.first().copied(), Some(0));
                return Ok(LambdaSet { n, elements, xi, decomposition, ambiguous });
            }
            if t[pos] < a[pos] {
                t[pos] += 1;
                break;
            }
            t[pos] = 0;
            pos += 1;
        }
    }
}
