//! Exact-arithmetic models of the finite stages of a singly generated
//! sequence algebra inside `c0`.
//!
//! The algebra is generated, under pointwise multiplication, by the geometric
//! vector `g = (2^-i)_i` together with the unit vectors `e_i`.  A strictly
//! increasing "growth sequence" `(a_n)` carves the index line into windows
//! `(a_n, a_{n+1}]`; each window carries a finite-dimensional model (a
//! *stage*) with a distinguished functional, a Euclidean seminorm given by an
//! exact Gram matrix, and a family of contractive generators.  Everything is
//! computed in exact rational arithmetic: seminorms are exact, operator norms
//! come as certified enclosures, and every quantitative growth condition on
//! `(a_n)` is *decided* — holds / fails / undecidable — never guessed from
//! floating point.
//!
//! Module map:
//! * [`numeric`] — big rationals, dyadic rounding, log-magnitude intervals
//!   for doubly-exponential quantities, certified square roots.
//! * [`sequence`] — growth sequences, the exponent sets `Λ_n`, lexicographic
//!   ordering, and the growth-condition registry.
//! * [`algebra`] — elements as (polynomial in `g`) + (finite correction),
//!   exact products, sup norms, window compressions.
//! * [`stage`] — a materialized stage: window, generator family, functional,
//!   all in exact coordinates.
//! * [`functional`] — the stage functional: its basis values, the window
//!   weight vector λ, and the extension beyond the basis range.
//! * [`seminorm`] — Gram closed form, the enumeration oracle that validates
//!   it, and the class-decomposition sums with their endpoint verdicts.
//! * [`opnorm`] — certified operator-norm enclosures by exact PSD bisection,
//!   plus the approximate-identity defect norms.
//! * [`spectral`] — truncated diagonal models: partial-fraction idempotents,
//!   contour quadrature, spectral-distance probes, and a weighted pointwise
//!   comparison algebra.
//! * [`report`] — deterministic JSON/CSV reporting (rationals as `[num,den]`
//!   strings, never floats).
//! * [`presets`] — the bundled growth sequences used by tests and the CLI.

pub mod algebra;
pub mod error;
pub mod functional;
pub mod linalg;
pub mod numeric;
pub mod opnorm;
pub mod presets;
pub mod report;
pub mod seminorm;
pub mod sequence;
pub mod spectral;
pub mod stage;

pub use error::{Error, Result};
pub use numeric::{CertOrd, CertifiedScalar, Dyadic, LogMagnitude, Rational};
pub use sequence::{GrowthSequence, SeqEntry};
