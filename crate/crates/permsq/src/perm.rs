//! Permutations in one-line notation, their symmetries, pattern reduction,
//! single-element extensions, and text I/O.
//!
//! Entries are addressed 1-based (`pi_1 .. pi_n`); extension slots are
//! 0-based (`0` is the left end, `n` the right end).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("values do not form a permutation of 1..{n}: {reason}")]
    NotPermutation { n: usize, reason: String },
    #[error("sequence contains duplicate value {0}")]
    DuplicateValue(u32),
    #[error("empty sequence")]
    Empty,
    #[error("extension position {pos} out of range 0..={n}")]
    PositionOutOfRange { pos: usize, n: usize },
    #[error("extension value {x} out of range 1..={max}")]
    ValueOutOfRange { x: u32, max: u32 },
    #[error("parse error at byte {offset}: {reason}")]
    Parse { offset: usize, reason: String },
}

/// A permutation of `1..=n` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<u32>,
}

/// The order type of a factor is itself a permutation.
pub type Pattern = Permutation;

impl Permutation {
    /// Builds a permutation from one-line values, validating that each of
    /// `1..=n` occurs exactly once.
    pub fn new(values: Vec<u32>) -> Result<Self, PermError> {
        if values.is_empty() {
            return Err(PermError::Empty);
        }
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v as usize > n {
                return Err(PermError::NotPermutation {
                    n,
                    reason: format!("value {v} outside 1..={n}"),
                });
            }
            if seen[v as usize] {
                return Err(PermError::NotPermutation {
                    n,
                    reason: format!("value {v} repeated"),
                });
            }
            seen[v as usize] = true;
        }
        Ok(Permutation { values })
    }

    /// The identity permutation `1 2 .. n`.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        Permutation {
            values: (1..=n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// 1-based entry access: `at(1)` is `pi_1`.
    pub fn at(&self, i: usize) -> u32 {
        self.values[i - 1]
    }

    /// `r(pi) = pi_n pi_{n-1} .. pi_1`.
    pub fn reverse(&self) -> Permutation {
        let mut v = self.values.clone();
        v.reverse();
        Permutation { values: v }
    }

    /// `c(pi)` replaces each value `v` by `n + 1 - v`.
    pub fn complement(&self) -> Permutation {
        let n = self.values.len() as u32;
        Permutation {
            values: self.values.iter().map(|&v| n + 1 - v).collect(),
        }
    }

    /// Composition of reverse and complement (order irrelevant: they commute).
    pub fn reverse_complement(&self) -> Permutation {
        self.reverse().complement()
    }

    /// Inserts rank `x` at slot `pos` (0 = left end, `n` = right end),
    /// incrementing every existing value `>= x`.
    pub fn extend(&self, pos: usize, x: u32) -> Result<Permutation, PermError> {
        let n = self.values.len();
        if pos > n {
            return Err(PermError::PositionOutOfRange { pos, n });
        }
        if x == 0 || x as usize > n + 1 {
            return Err(PermError::ValueOutOfRange {
                x,
                max: n as u32 + 1,
            });
        }
        let mut v = Vec::with_capacity(n + 1);
        for (i, &p) in self.values.iter().enumerate() {
            if i == pos {
                v.push(x);
            }
            v.push(if p < x { p } else { p + 1 });
        }
        if pos == n {
            v.push(x);
        }
        Ok(Permutation { values: v })
    }

    /// Removes the entry at slot `pos` (0-based insertion slot semantics:
    /// `delete(pos)` undoes `extend(pos, x)`), returning the shortened
    /// permutation and the removed rank.
    pub fn delete(&self, pos: usize) -> Result<(Permutation, u32), PermError> {
        let n = self.values.len();
        if n < 2 || pos >= n {
            return Err(PermError::PositionOutOfRange { pos, n });
        }
        let x = self.values[pos];
        let v = self
            .values
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos)
            .map(|(_, &p)| if p < x { p } else { p - 1 })
            .collect();
        Ok((Permutation { values: v }, x))
    }
}

/// Rank-reduces a sequence of distinct values to its order type.
///
/// `49` and `25` both reduce to `12`; `517` and `638` to `213`.
pub fn pattern_of(seq: &[u32]) -> Result<Pattern, PermError> {
    if seq.is_empty() {
        return Err(PermError::Empty);
    }
    let mut sorted: Vec<u32> = seq.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(PermError::DuplicateValue(w[0]));
        }
    }
    let values = seq
        .iter()
        .map(|v| sorted.binary_search(v).unwrap() as u32 + 1)
        .collect();
    Ok(Permutation { values })
}

/// Order-isomorphism of two equal-length sequences of distinct values,
/// decided by comparing every index pair.
pub fn same_pattern(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if (a[i] < a[j]) != (b[i] < b[j]) {
                return false;
            }
        }
    }
    true
}

/// The symmetry group acting on a class of permutations.
///
/// Complement always preserves the classes treated here; reverse is included
/// only when the class is mirror-symmetric. Closure forces
/// reverse-complement in exactly when reverse is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryGroup {
    includes_reverse: bool,
}

impl SymmetryGroup {
    /// `{id, c}`.
    pub const COMPLEMENT_ONLY: SymmetryGroup = SymmetryGroup {
        includes_reverse: false,
    };
    /// `{id, r, c, rc}`.
    pub const FULL: SymmetryGroup = SymmetryGroup {
        includes_reverse: true,
    };

    pub fn includes_reverse(&self) -> bool {
        self.includes_reverse
    }

    /// The orbit of `p`, deduplicated; size 4, 2, or 1.
    pub fn orbit(&self, p: &Permutation) -> Vec<Permutation> {
        let mut out = vec![p.clone(), p.complement()];
        if self.includes_reverse {
            out.push(p.reverse());
            out.push(p.reverse_complement());
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Canonical output: space-separated decimals.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

/// Compact style: single digits juxtaposed, multi-digit values parenthesized,
/// e.g. `143289756(14)(11)`.
pub fn format_compact(p: &Permutation) -> String {
    let mut s = String::new();
    for &v in p.values() {
        if v < 10 {
            s.push_str(&v.to_string());
        } else {
            s.push('(');
            s.push_str(&v.to_string());
            s.push(')');
        }
    }
    s
}

/// Parses either space-separated decimals or the compact
/// digits-with-parentheses style.
pub fn parse_permutation(text: &str) -> Result<Permutation, PermError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(PermError::Parse {
            offset: 0,
            reason: "empty input".into(),
        });
    }
    let values = if trimmed.contains('(') {
        let stripped: String = trimmed.chars().filter(|c| !c.is_whitespace()).collect();
        parse_compact(&stripped)?
    } else if trimmed.contains(|c: char| c.is_whitespace()) {
        parse_spaced(trimmed)?
    } else {
        parse_compact(trimmed)?
    };
    Permutation::new(values)
}

fn parse_spaced(text: &str) -> Result<Vec<u32>, PermError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for tok in text.split_whitespace() {
        let v: u32 = tok.parse().map_err(|_| PermError::Parse {
            offset: text[offset..].find(tok).map_or(offset, |k| offset + k),
            reason: format!("invalid number {tok:?}"),
        })?;
        out.push(v);
        offset += tok.len();
    }
    Ok(out)
}

fn parse_compact(text: &str) -> Result<Vec<u32>, PermError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'0'..=b'9' => {
                out.push((bytes[i] - b'0') as u32);
                i += 1;
            }
            b'(' => {
                let close = text[i..].find(')').ok_or(PermError::Parse {
                    offset: i,
                    reason: "unterminated '('".into(),
                })? + i;
                let v: u32 = text[i + 1..close].parse().map_err(|_| PermError::Parse {
                    offset: i + 1,
                    reason: format!("invalid number {:?}", &text[i + 1..close]),
                })?;
                out.push(v);
                i = close + 1;
            }
            c => {
                return Err(PermError::Parse {
                    offset: i,
                    reason: format!("unexpected byte {:?}", c as char),
                })
            }
        }
    }
    Ok(out)
}
