//! Growth sequences: the strictly increasing integer parameters that drive
//! every stage of the construction.
//!
//! Entries come in two flavours:
//!
//! * `Exact` — a materialized big integer, usable everywhere;
//! * `Magnitude` — an entry so large that only certified bounds on its
//!   base-2 logarithm are kept (e.g. an entry just above `2^(2^170)` can
//!   never be written down, but its log is a small exact rational).
//!
//! The sequence is 1-indexed (`a_1, a_2, …`) with the fixed convention
//! `a_0 = 1`.  Construction validates a *certified* strict increase: exact
//! entries compare exactly, anything else must be separated by its log
//! bounds or the sequence is rejected outright.

pub mod conditions;
pub mod lambda;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::numeric::{rbig, LogMagnitude};

/// One sequence entry: materialized integer or log-bounded magnitude.
#[derive(Debug, Clone)]
pub enum SeqEntry {
    Exact(BigInt),
    Magnitude(LogMagnitude),
}

impl SeqEntry {
    pub fn exact_u64(n: u64) -> Self {
        SeqEntry::Exact(BigInt::from(n))
    }

    pub fn as_exact(&self) -> Option<&BigInt> {
        match self {
            SeqEntry::Exact(n) => Some(n),
            SeqEntry::Magnitude(_) => None,
        }
    }

    /// Certified bounds on `log2` of the entry.
    pub fn log_mag(&self, bits: u32) -> LogMagnitude {
        match self {
            SeqEntry::Exact(n) => LogMagnitude::from_rational(&rbig(n.clone()), bits),
            SeqEntry::Magnitude(m) => m.clone(),
        }
    }

    /// `Some(true)` when `self < other` is certified, `Some(false)` when
    /// `self ≥ other` is certified, `None` when neither can be told apart.
    pub fn certainly_less(&self, other: &Self) -> Option<bool> {
        if let (SeqEntry::Exact(a), SeqEntry::Exact(b)) = (self, other) {
            return Some(a < b);
        }
        match self.log_mag(64).cmp_value(&other.log_mag(64)) {
            Some(Ordering::Less) => Some(true),
            Some(_) => Some(false),
            None => None,
        }
    }
}

/// A validated growth sequence.
#[derive(Debug, Clone)]
pub struct GrowthSequence {
    name: String,
    entries: Vec<SeqEntry>,
}

impl GrowthSequence {
    /// Validate and wrap a list of entries.  Requirements: positive first
    /// entry, certified strict increase between consecutive entries.
    pub fn new(name: impl Into<String>, entries: Vec<SeqEntry>) -> Result<Self> {
        if let Some(SeqEntry::Exact(first)) = entries.first() {
            if !first.is_positive() {
                return Err(Error::InvalidSequence(format!(
                    "first entry {first} is not a positive integer"
                )));
            }
        }
        for (i, pair) in entries.windows(2).enumerate() {
            match pair[0].certainly_less(&pair[1]) {
                Some(true) => {}
                Some(false) => {
                    return Err(Error::InvalidSequence(format!(
                        "entries a_{} and a_{} are not strictly increasing",
                        i + 1,
                        i + 2
                    )));
                }
                None => {
                    return Err(Error::InvalidSequence(format!(
                        "cannot certify a_{} < a_{} from the given bounds",
                        i + 1,
                        i + 2
                    )));
                }
            }
        }
        Ok(GrowthSequence { name: name.into(), entries })
    }

    pub fn from_integers(name: impl Into<String>, values: &[u64]) -> Result<Self> {
        Self::new(name, values.iter().map(|&v| SeqEntry::exact_u64(v)).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The 1-indexed entry `a_r` (`r ≥ 1`).
    pub fn entry(&self, r: u64) -> Result<&SeqEntry> {
        if r == 0 || r as usize > self.entries.len() {
            return Err(Error::SequenceTooShort { needed: r, have: self.entries.len() });
        }
        Ok(&self.entries[r as usize - 1])
    }

    /// `a_r` as a machine word; `a_0 = 1` by convention.
    pub fn a(&self, r: u64) -> Result<u64> {
        if r == 0 {
            return Ok(1);
        }
        match self.entry(r)? {
            SeqEntry::Exact(n) => {
                u64::try_from(n).map_err(|_| Error::EntryTooLarge { index: r })
            }
            SeqEntry::Magnitude(_) => Err(Error::NotMaterialized { index: r }),
        }
    }

    /// `a_r` as a big integer; `a_0 = 1` by convention.
    pub fn a_big(&self, r: u64) -> Result<BigInt> {
        if r == 0 {
            return Ok(BigInt::one());
        }
        match self.entry(r)? {
            SeqEntry::Exact(n) => Ok(n.clone()),
            SeqEntry::Magnitude(_) => Err(Error::NotMaterialized { index: r }),
        }
    }

    /// Certified log bounds for `a_r` (`r ≥ 1`).
    pub fn log2_entry(&self, r: u64, bits: u32) -> Result<LogMagnitude> {
        Ok(self.entry(r)?.log_mag(bits))
    }

    /// Largest `r` such that `a_1 … a_r` are all materialized integers.
    pub fn max_exact_index(&self) -> u64 {
        let mut r = 0;
        for e in &self.entries {
            if e.as_exact().is_none() {
                break;
            }
            r += 1;
        }
        r
    }
}
