//! Finite stages: the compression of the algebra onto one index window.
//!
//! Stage `n ≥ 1` looks at the coordinate window `W = (aₙ, a_{n+1}]` of
//! absolute indices.  Every element acts on the window by pointwise
//! multiplication of its window coordinates, so a stage is fully described
//! by
//!
//! * the window bounds and its dimension `d = a_{n+1} − aₙ`,
//! * the scaling values `a_i` at the window indices (for the normalized
//!   coordinate generators `a_i⁻¹ e_i`), and
//! * the prefix `a_1, …, a_n` (for the two families of rescaled window
//!   idempotents).
//!
//! The distinguished vectors `γ_k` have window coordinates `2^(−jk)` at
//! absolute index `j`; they satisfy `γ_k ∘ γ_l = γ_{k+l}` and `γ_0` is the
//! identity of the compression.

use num_traits::{Signed, Zero};

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::numeric::{pow2, rat, rint, Rational};
use crate::sequence::GrowthSequence;

/// Hard cap on window endpoints: coordinate exponents grow like
/// `aₙ · a_{n+1}`, so past this the exact rationals become unmanageable.
const WINDOW_END_CAP: u64 = 1 << 13;

/// One generator of the stage algebra, identified structurally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `γ₁`: the window compression of the diagonal generator.
    WindowShift,
    /// `a_i⁻¹ e_i` for an absolute window index `i`.
    Coordinate { index: u64 },
    /// `(j/(j+1)) · 2^(a_j²) · γ_(a_j)`.
    CompressedIdempotent { j: u64 },
    /// `j · (2^(a_j²) · γ_(1+a_j) − γ₁)`.
    ShiftedIdempotent { j: u64 },
}

impl Generator {
    pub fn describe(&self) -> String {
        match self {
            Generator::WindowShift => "window-shift".to_string(),
            Generator::Coordinate { index } => format!("coordinate-{index}"),
            Generator::CompressedIdempotent { j } => format!("compressed-idempotent-{j}"),
            Generator::ShiftedIdempotent { j } => format!("shifted-idempotent-{j}"),
        }
    }
}

/// A materialized stage.
#[derive(Debug, Clone)]
pub struct Stage {
    n: u64,
    window_start: u64,
    window_end: u64,
    /// Scaling values `a_i` for window indices `i`, in window order.
    scales: Vec<u64>,
    /// The prefix `a_1, …, a_n`.
    prefix: Vec<u64>,
}

impl Stage {
    /// Materialize stage `n ≥ 1` of the sequence.  Needs every entry up to
    /// index `a_{n+1}` (the window scalings), and refuses windows larger
    /// than `dimension_cap`.
    pub fn new(seq: &GrowthSequence, n: u64, dimension_cap: u64) -> Result<Self> {
        assert!(n >= 1, "stage 0 is the ambient supremum norm, not a window");
        let window_start = seq.a(n)?;
        let window_end = seq.a(n + 1)?;
        assert!(window_end > window_start, "sequence validation guarantees growth");
        if window_end > WINDOW_END_CAP {
            return Err(Error::ResourceExceeded(format!(
                "window endpoint a_{} = {window_end} exceeds the exact-coordinate cap {WINDOW_END_CAP}",
                n + 1
            )));
        }
        let d = window_end - window_start;
        if d > dimension_cap {
            return Err(Error::ResourceExceeded(format!(
                "stage {n} dimension {d} exceeds the cap {dimension_cap}"
            )));
        }
        let mut scales = Vec::with_capacity(d as usize);
        for i in (window_start + 1)..=window_end {
            scales.push(seq.a(i)?);
        }
        let mut prefix = Vec::with_capacity(n as usize);
        for j in 1..=n {
            prefix.push(seq.a(j)?);
        }
        Ok(Stage { n, window_start, window_end, scales, prefix })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn window_start(&self) -> u64 {
        self.window_start
    }

    pub fn window_end(&self) -> u64 {
        self.window_end
    }

    /// `d = a_{n+1} − aₙ`.
    pub fn dimension(&self) -> usize {
        (self.window_end - self.window_start) as usize
    }

    /// Absolute window indices `aₙ+1, …, a_{n+1}` in coordinate order.
    pub fn window_indices(&self) -> impl Iterator<Item = u64> + '_ {
        (self.window_start + 1)..=self.window_end
    }

    /// The scaling value `a_i` at window offset `o`.
    pub fn scale_at(&self, o: usize) -> u64 {
        self.scales[o]
    }

    /// The full generating family, in the fixed enumeration order used
    /// everywhere: the window shift, the scaled coordinates in index order,
    /// then the idempotent pairs by level.
    pub fn generators(&self) -> Vec<Generator> {
        let mut out = vec![Generator::WindowShift];
        out.extend(self.window_indices().map(|index| Generator::Coordinate { index }));
        for j in 1..=self.n {
            out.push(Generator::CompressedIdempotent { j });
            out.push(Generator::ShiftedIdempotent { j });
        }
        out
    }

    /// The generators that are *not* scaled coordinates (the ones whose
    /// powers must be summed as infinite series).
    pub fn non_coordinate_generators(&self) -> Vec<Generator> {
        let mut out = vec![Generator::WindowShift];
        for j in 1..=self.n {
            out.push(Generator::CompressedIdempotent { j });
            out.push(Generator::ShiftedIdempotent { j });
        }
        out
    }

    /// Window coordinates of `γ_k` (any `k ≥ 0`): `2^(−jk)` at absolute
    /// index `j`.
    pub fn gamma(&self, k: u64) -> Vec<Rational> {
        self.window_indices()
            .map(|j| {
                let e = (j as i128) * (k as i128);
                assert!(e <= i64::MAX as i128, "gamma exponent overflow");
                pow2(-(e as i64))
            })
            .collect()
    }

    /// Window coordinates of a generator, in window order.
    pub fn generator_coords(&self, gen: Generator) -> Vec<Rational> {
        match gen {
            Generator::WindowShift => self.gamma(1),
            Generator::Coordinate { index } => {
                assert!(
                    index > self.window_start && index <= self.window_end,
                    "coordinate generator outside the window"
                );
                let o = (index - self.window_start - 1) as usize;
                let mut v = vec![Rational::zero(); self.dimension()];
                v[o] = rat(1, self.scales[o] as i64);
                v
            }
            Generator::CompressedIdempotent { j } => {
                let aj = self.level_value(j);
                self.window_indices()
                    .map(|w| {
                        let e = aj * aj - (w as i64) * aj;
                        rat(j as i64, j as i64 + 1) * pow2(e)
                    })
                    .collect()
            }
            Generator::ShiftedIdempotent { j } => {
                let aj = self.level_value(j);
                self.window_indices()
                    .map(|w| {
                        let e = aj * aj - (w as i64) * (1 + aj);
                        rint(j as i64) * (pow2(e) - pow2(-(w as i64)))
                    })
                    .collect()
            }
        }
    }

    /// Exact window radius of a generator: `max_w |coords_w|`.
    pub fn generator_radius(&self, gen: Generator) -> Rational {
        self.generator_coords(gen)
            .into_iter()
            .map(|c| c.abs())
            .max()
            .expect("windows are never empty")
    }

    /// Compress an ambient element to its window coordinates.
    pub fn window_coords(&self, x: &Element) -> Vec<Rational> {
        self.window_indices().map(|j| x.coord(j)).collect()
    }

    fn level_value(&self, j: u64) -> i64 {
        assert!(j >= 1 && j <= self.n, "idempotent level out of range");
        let aj = self.prefix[j as usize - 1];
        assert!(aj <= WINDOW_END_CAP, "prefix values are below window endpoints");
        aj as i64
    }
}

/// Largest `n ≥ 1` for which `Stage::new(seq, n, dimension_cap)` succeeds;
/// `0` when even the first stage is out of reach (prefix too short or the
/// window too large).
pub fn max_buildable_stage(seq: &GrowthSequence, dimension_cap: u64) -> u64 {
    let mut n = 0;
    while Stage::new(seq, n + 1, dimension_cap).is_ok() {
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rbig;
    use num_bigint::BigInt;

    fn desk_small() -> GrowthSequence {
        GrowthSequence::from_integers("desk-small", &[2, 9, 10, 11, 12, 13, 14, 15, 16]).unwrap()
    }

    fn stage_one() -> Stage {
        Stage::new(&desk_small(), 1, 512).unwrap()
    }

    #[test]
    fn window_geometry_matches_the_small_model() {
        let s = stage_one();
        assert_eq!(s.window_start(), 2);
        assert_eq!(s.window_end(), 9);
        assert_eq!(s.dimension(), 7);
        assert_eq!(s.window_indices().collect::<Vec<_>>(), vec![3, 4, 5, 6, 7, 8, 9]);
        // scaling values at the window indices
        assert_eq!((0..7).map(|o| s.scale_at(o)).collect::<Vec<_>>(), vec![10, 11, 12, 13, 14, 15, 16]);
        // 1 shift + 7 coordinates + 2·1 idempotents
        assert_eq!(s.generators().len(), 10);
        assert_eq!(s.non_coordinate_generators().len(), 3);
    }

    #[test]
    fn gamma_vectors_multiply_by_index_addition() {
        let s = stage_one();
        let g1 = s.gamma(1);
        let g2 = s.gamma(2);
        let g3 = s.gamma(3);
        for o in 0..s.dimension() {
            assert_eq!(&g1[o] * &g2[o], g3[o]);
        }
        assert!(s.gamma(0).iter().all(|c| *c == rint(1)));
        assert_eq!(g1[0], rat(1, 8));
    }

    #[test]
    fn generator_radii_match_pinned_values() {
        let s = stage_one();
        assert_eq!(s.generator_radius(Generator::WindowShift), rat(1, 8));
        assert_eq!(s.generator_radius(Generator::CompressedIdempotent { j: 1 }), rat(1, 8));
        assert_eq!(s.generator_radius(Generator::ShiftedIdempotent { j: 1 }), rat(3, 32));
        for (o, i) in s.window_indices().enumerate() {
            let r = s.generator_radius(Generator::Coordinate { index: i });
            assert_eq!(r, rat(1, s.scale_at(o) as i64));
        }
    }

    #[test]
    fn shifted_idempotent_coordinates_are_exact() {
        // H₁ at window index w: 1·(2^(4−3w) − 2^(−w))
        let s = stage_one();
        let h = s.generator_coords(Generator::ShiftedIdempotent { j: 1 });
        for (o, w) in s.window_indices().enumerate() {
            let expect = pow2(4 - 3 * w as i64) - pow2(-(w as i64));
            assert_eq!(h[o], expect);
        }
        // all strictly negative on this window (the shift dominates)
        assert!(h.iter().all(|c| c < &rint(0)));
    }

    #[test]
    fn compression_of_ambient_elements() {
        let s = stage_one();
        // the diagonal generator compresses to γ₁
        assert_eq!(s.window_coords(&Element::g()), s.gamma(1));
        // a wide partial identity compresses to γ₀
        assert_eq!(s.window_coords(&Element::pn(20)), s.gamma(0));
        // a single coordinate idempotent lands at its offset
        let coords = s.window_coords(&Element::e(5));
        for (o, c) in coords.iter().enumerate() {
            assert_eq!(*c, if o == 2 { rint(1) } else { rint(0) });
        }
    }

    #[test]
    fn buildable_stage_count_matches_the_prefix() {
        // stage 2 would need the scaling a_10, which desk-small lacks …
        assert_eq!(max_buildable_stage(&desk_small(), 512), 1);
        // … and gains with one more entry
        let longer = GrowthSequence::from_integers(
            "desk-small-plus",
            &[2, 9, 10, 11, 12, 13, 14, 15, 16, 17],
        )
        .unwrap();
        assert_eq!(max_buildable_stage(&longer, 512), 2);
        let short = GrowthSequence::from_integers("short", &[2, 9]).unwrap();
        assert_eq!(max_buildable_stage(&short, 512), 0);
        // the cap can rule out stage 1 entirely
        assert_eq!(max_buildable_stage(&desk_small(), 3), 0);
    }

    #[test]
    fn stage_construction_errors() {
        // dimension cap
        match Stage::new(&desk_small(), 1, 3) {
            Err(Error::ResourceExceeded(msg)) => assert!(msg.contains("dimension")),
            other => panic!("expected a resource error, got {other:?}"),
        }
        // missing window scalings (the window needs entries up to a_{n+1})
        let seq = GrowthSequence::from_integers("short", &[2, 9]).unwrap();
        assert!(Stage::new(&seq, 1, 512).is_err());
        // magnitude-only endpoint
        let a2 = rbig(BigInt::from(1) << 100);
        let seq = GrowthSequence::new(
            "wide",
            vec![
                crate::sequence::SeqEntry::exact_u64(13),
                crate::sequence::SeqEntry::Magnitude(crate::numeric::LogMagnitude::point(a2)),
            ],
        )
        .unwrap();
        assert!(Stage::new(&seq, 1, 512).is_err());
    }
}
