//! Square detection: full scans, incremental checks for prefix search, the
//! zigzag phase characterisation, and squares created by single-element
//! extensions.
//!
//! A square is a pair of adjacent factors of equal length `h >= 2` with the
//! same order type. Witnesses are reported minimal by total length first,
//! then by start position.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{same_pattern, Permutation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SquaresError {
    #[error("permutation is not square-free: square at start {0}, half length {1}")]
    NotSquareFree(usize, usize),
    #[error("extension position {pos} out of range 0..={n}")]
    PositionOutOfRange { pos: usize, n: usize },
}

/// Location of a square: `start` is the 1-based index of its first element,
/// `half_len` the length of each half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareWitness {
    pub start: usize,
    pub half_len: usize,
}

impl SquareWitness {
    pub fn total_len(&self) -> usize {
        2 * self.half_len
    }

    /// Checks this witness against a concrete value sequence.
    pub fn holds_in(&self, values: &[u32]) -> bool {
        let (s, h) = (self.start, self.half_len);
        s >= 1 && h >= 2 && s + 2 * h - 1 <= values.len() && {
            let a = &values[s - 1..s - 1 + h];
            let b = &values[s - 1 + h..s - 1 + 2 * h];
            same_pattern(a, b)
        }
    }
}

/// The minimal square in `p`, or `None` iff `p` is square-free.
pub fn find_square(p: &Permutation) -> Option<SquareWitness> {
    find_square_in(p.values())
}

pub(crate) fn find_square_in(values: &[u32]) -> Option<SquareWitness> {
    let n = values.len();
    for h in 2..=n / 2 {
        for s0 in 0..=n - 2 * h {
            if same_pattern(&values[s0..s0 + h], &values[s0 + h..s0 + 2 * h]) {
                return Some(SquareWitness {
                    start: s0 + 1,
                    half_len: h,
                });
            }
        }
    }
    None
}

pub fn is_square_free(p: &Permutation) -> bool {
    find_square(p).is_none()
}

/// A square whose last element sits at 1-based index `end` of the prefix,
/// minimal by half length. A prefix built element by element is square-free
/// iff this returns `None` at every step.
pub fn square_ending_at(prefix: &[u32], end: usize) -> Option<SquareWitness> {
    debug_assert!(end >= 1 && end <= prefix.len());
    for h in 2..=end / 2 {
        let s0 = end - 2 * h; // 0-based start
        if same_pattern(&prefix[s0..s0 + h], &prefix[s0 + h..s0 + 2 * h]) {
            return Some(SquareWitness {
                start: s0 + 1,
                half_len: h,
            });
        }
    }
    None
}

/// Subset of `{0,1,2,3}`: the zigzag templates a permutation is consistent
/// with. Square-free permutations always fit at least one template; the
/// converse fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseSet(u8);

impl PhaseSet {
    pub const ALL: PhaseSet = PhaseSet(0b1111);
    pub const EMPTY: PhaseSet = PhaseSet(0);

    pub fn contains(&self, i: u8) -> bool {
        i < 4 && self.0 & (1 << i) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn phases(&self) -> Vec<u8> {
        (0..4).filter(|&i| self.contains(i)).collect()
    }

    /// Restricts the set given one adjacent comparison: `ascent` says whether
    /// the element at 1-based position `pos` is below its right neighbour.
    pub fn restrict(&mut self, pos: usize, ascent: bool) {
        for i in 0..4u8 {
            // Template i: local minima at positions congruent to i mod 4,
            // maxima at i+2; ascent out of position p iff p mod 4 is i or i+1.
            let up = (pos as u8 % 4) == i || (pos as u8 % 4) == (i + 1) % 4;
            if up != ascent {
                self.0 &= !(1 << i);
            }
        }
    }
}

/// All templates consistent with every adjacent comparison of `p`. Boundary
/// positions constrain only the side that exists.
pub fn zigzag_phases(p: &Permutation) -> PhaseSet {
    let mut set = PhaseSet::ALL;
    let v = p.values();
    for pos in 1..v.len() {
        set.restrict(pos, v[pos - 1] < v[pos]);
    }
    set
}

/// Comparison accessor over the conceptual extension of `values` by rank `x`
/// at slot `pos`, without materialising the relabeled permutation.
///
/// Indices are 0-based over the extended sequence of length `n + 1`; the
/// inserted element sits at index `pos`. For an original entry `v`, the
/// inserted element is below it iff `x <= v`.
#[derive(Clone, Copy)]
pub(crate) struct ExtensionView<'a> {
    values: &'a [u32],
    pos: usize,
    x: u32,
}

impl<'a> ExtensionView<'a> {
    pub(crate) fn new(values: &'a [u32], pos: usize, x: u32) -> Self {
        debug_assert!(pos <= values.len());
        debug_assert!(x >= 1 && x as usize <= values.len() + 1);
        ExtensionView { values, pos, x }
    }

    pub(crate) fn len(&self) -> usize {
        self.values.len() + 1
    }

    fn orig(&self, i: usize) -> u32 {
        self.values[if i < self.pos { i } else { i - 1 }]
    }

    pub(crate) fn less(&self, i: usize, j: usize) -> bool {
        match (i == self.pos, j == self.pos) {
            (false, false) => self.orig(i) < self.orig(j),
            (true, false) => self.x <= self.orig(j),
            (false, true) => self.orig(i) < self.x,
            (true, true) => unreachable!(),
        }
    }

    pub(crate) fn halves_match(&self, s0: usize, h: usize) -> bool {
        for i in 0..h {
            for j in i + 1..h {
                if self.less(s0 + i, s0 + j) != self.less(s0 + h + i, s0 + h + j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Minimal square in the extension that covers the inserted index, with the
/// `find_square` tie-break. `allowed_total_len` restricts candidate total
/// lengths when given (the end-extension search uses `{4} union 8Z`).
pub(crate) fn extension_square_covering(
    values: &[u32],
    pos: usize,
    x: u32,
    allowed_total_len: Option<&dyn Fn(usize) -> bool>,
) -> Option<SquareWitness> {
    let view = ExtensionView::new(values, pos, x);
    let m = view.len();
    for h in 2..=m / 2 {
        if let Some(allow) = allowed_total_len {
            if !allow(2 * h) {
                continue;
            }
        }
        // 0-based starts whose window covers the inserted index.
        let lo = pos.saturating_sub(2 * h - 1);
        let hi = pos.min(m - 2 * h);
        for s0 in lo..=hi {
            if view.halves_match(s0, h) {
                return Some(SquareWitness {
                    start: s0 + 1,
                    half_len: h,
                });
            }
        }
    }
    None
}

/// Total length in `{4} union 8Z`: the only square lengths an extension at
/// the left or right end of a square-free permutation can create.
pub fn end_extension_length_allowed(total: usize) -> bool {
    total == 4 || total % 8 == 0
}

/// For each inserted rank `x` (index `x - 1`), the minimal square created by
/// extending square-free `p` at slot `pos`, or `None` if that extension is
/// square-free.
pub fn squares_created_by_extension(
    p: &Permutation,
    pos: usize,
) -> Result<Vec<Option<SquareWitness>>, SquaresError> {
    if let Some(w) = find_square(p) {
        return Err(SquaresError::NotSquareFree(w.start, w.half_len));
    }
    let n = p.len();
    if pos > n {
        return Err(SquaresError::PositionOutOfRange { pos, n });
    }
    Ok((1..=n as u32 + 1)
        .map(|x| extension_square_covering(p.values(), pos, x, None))
        .collect())
}
