//! P-crucial predicates, position-set resolution, and machine-checkable
//! certificates.
//!
//! A square-free permutation is crucial at slot `i` when every inserted rank
//! there creates a square; it is P-crucial when that holds at every position
//! named by a `PositionSpec`. A certificate pins down one square witness per
//! `(position, inserted rank)` pair and can be re-verified from scratch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::perm::{parse_permutation, PermError, Permutation};
use crate::squares::{extension_square_covering, find_square, SquareWitness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CrucialityError {
    #[error("subject is not square-free (square at start {0}, half length {1})")]
    NotSquareFree(usize, usize),
    #[error("position {pos} out of range 0..={n}")]
    PositionOutOfRange { pos: usize, n: usize },
    #[error("extension at position {pos} by {x} is square-free; subject is not crucial there")]
    Extendable { pos: usize, x: u32 },
    #[error("empty position spec")]
    EmptySpec,
    #[error("invalid position token {0:?}")]
    BadToken(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A symbolic extension slot anchored at one end of the permutation.
/// `FromLeft(0)` is slot 0, `FromRight(0)` is slot `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    FromLeft(u32),
    FromRight(u32),
}

impl Anchor {
    fn sort_key(&self) -> (u8, i64) {
        match *self {
            Anchor::FromLeft(k) => (0, k as i64),
            Anchor::FromRight(k) => (1, -(k as i64)),
        }
    }
}

impl PartialOrd for Anchor {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Anchor {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Anchor::FromLeft(k) => write!(f, "{k}"),
            Anchor::FromRight(0) => write!(f, "n"),
            Anchor::FromRight(k) => write!(f, "n-{k}"),
        }
    }
}

/// The prohibited-extension position set P, as end-anchored markers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionSpec {
    anchors: BTreeSet<Anchor>,
}

impl PositionSpec {
    pub fn new(anchors: impl IntoIterator<Item = Anchor>) -> Result<Self, CrucialityError> {
        let anchors: BTreeSet<Anchor> = anchors.into_iter().collect();
        if anchors.is_empty() {
            return Err(CrucialityError::EmptySpec);
        }
        Ok(PositionSpec { anchors })
    }

    /// Parses a comma-separated anchor list, e.g. `"0,1,n-1,n"`.
    pub fn parse(text: &str) -> Result<Self, CrucialityError> {
        let mut anchors = BTreeSet::new();
        for tok in text.split(',') {
            let tok = tok.trim();
            if tok == "n" {
                anchors.insert(Anchor::FromRight(0));
            } else if let Some(rest) = tok.strip_prefix("n-") {
                let k: u32 = rest
                    .parse()
                    .map_err(|_| CrucialityError::BadToken(tok.to_string()))?;
                anchors.insert(Anchor::FromRight(k));
            } else {
                let k: u32 = tok
                    .parse()
                    .map_err(|_| CrucialityError::BadToken(tok.to_string()))?;
                anchors.insert(Anchor::FromLeft(k));
            }
        }
        if anchors.is_empty() {
            return Err(CrucialityError::EmptySpec);
        }
        Ok(PositionSpec { anchors })
    }

    pub fn anchors(&self) -> impl Iterator<Item = Anchor> + '_ {
        self.anchors.iter().copied()
    }

    /// Swaps `FromLeft(k)` and `FromRight(k)`.
    pub fn mirror(&self) -> PositionSpec {
        PositionSpec {
            anchors: self
                .anchors
                .iter()
                .map(|a| match *a {
                    Anchor::FromLeft(k) => Anchor::FromRight(k),
                    Anchor::FromRight(k) => Anchor::FromLeft(k),
                })
                .collect(),
        }
    }

    /// Reversal is a class symmetry exactly for mirror-symmetric specs.
    pub fn is_mirror_symmetric(&self) -> bool {
        self.mirror() == *self
    }

    /// Concrete slots for length `n`: `FromLeft(k) -> k`,
    /// `FromRight(k) -> n - k`; out-of-range slots dropped, coincidences
    /// merged.
    pub fn resolve(&self, n: usize) -> BTreeSet<usize> {
        self.anchors
            .iter()
            .filter_map(|a| match *a {
                Anchor::FromLeft(k) => (k as usize <= n).then_some(k as usize),
                Anchor::FromRight(k) => n.checked_sub(k as usize),
            })
            .collect()
    }

    /// The slots an enumeration engine actually has to test. For square-free
    /// subjects of length >= 7, inserting at a slot with at least three
    /// elements on each side breaks the zigzag structure on both sides at
    /// once, so such slots are crucial automatically and can be dropped.
    ///
    /// Slots 2 and n-2 are kept: with a single comparison on the short side
    /// the zigzag phase is not pinned there, and square-free extensions do
    /// exist (e.g. 1432576 extended at slot 2 by a new maximum).
    pub fn effective(&self, n: usize) -> BTreeSet<usize> {
        let resolved = self.resolve(n);
        if n < 7 {
            return resolved;
        }
        let ends: BTreeSet<usize> = [0, 1, 2, n - 2, n - 1, n].into_iter().collect();
        resolved.intersection(&ends).copied().collect()
    }
}

impl fmt::Display for PositionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.anchors.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// True iff every inserted rank at slot `pos` creates a square.
pub fn is_crucial_at(p: &Permutation, pos: usize) -> Result<bool, CrucialityError> {
    if let Some(w) = find_square(p) {
        return Err(CrucialityError::NotSquareFree(w.start, w.half_len));
    }
    let n = p.len();
    if pos > n {
        return Err(CrucialityError::PositionOutOfRange { pos, n });
    }
    Ok(crucial_at_unchecked(p.values(), pos))
}

/// Cruciality at one slot, assuming the caller knows `values` is square-free.
pub(crate) fn crucial_at_unchecked(values: &[u32], pos: usize) -> bool {
    let n = values.len() as u32;
    (1..=n + 1).all(|x| extension_square_covering(values, pos, x, None).is_some())
}

/// True iff `p` is square-free and crucial at every resolved position.
pub fn is_p_crucial(p: &Permutation, spec: &PositionSpec) -> bool {
    if find_square(p).is_some() {
        return false;
    }
    spec.resolve(p.len())
        .iter()
        .all(|&pos| crucial_at_unchecked(p.values(), pos))
}

/// Witnesses proving a permutation P-crucial: one minimal square per
/// `(position, inserted rank)` pair over the resolved position set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    subject: Permutation,
    spec: PositionSpec,
    entries: BTreeMap<(usize, u32), SquareWitness>,
}

impl Certificate {
    pub fn subject(&self) -> &Permutation {
        &self.subject
    }

    pub fn spec(&self) -> &PositionSpec {
        &self.spec
    }

    pub fn entries(&self) -> &BTreeMap<(usize, u32), SquareWitness> {
        &self.entries
    }

    pub fn witness(&self, pos: usize, x: u32) -> Option<&SquareWitness> {
        self.entries.get(&(pos, x))
    }
}

/// Builds the complete certificate, or reports the first `(pos, x)` whose
/// extension stays square-free.
pub fn certificate(p: &Permutation, spec: &PositionSpec) -> Result<Certificate, CrucialityError> {
    if let Some(w) = find_square(p) {
        return Err(CrucialityError::NotSquareFree(w.start, w.half_len));
    }
    let n = p.len();
    let mut entries = BTreeMap::new();
    for pos in spec.resolve(n) {
        for x in 1..=n as u32 + 1 {
            match extension_square_covering(p.values(), pos, x, None) {
                Some(w) => {
                    entries.insert((pos, x), w);
                }
                None => return Err(CrucialityError::Extendable { pos, x }),
            }
        }
    }
    Ok(Certificate {
        subject: p.clone(),
        spec: spec.clone(),
        entries,
    })
}

/// Re-checks every certificate invariant from scratch. Returns the failing
/// entries as diagnostics; the certificate is valid iff the list is empty.
pub fn verify_certificate(cert: &Certificate) -> (bool, Vec<String>) {
    let mut problems = Vec::new();
    let p = &cert.subject;
    let n = p.len();
    if let Some(w) = find_square(p) {
        problems.push(format!(
            "subject contains a square at start {}, half length {}",
            w.start, w.half_len
        ));
    }
    let mut expected: BTreeSet<(usize, u32)> = BTreeSet::new();
    for pos in cert.spec.resolve(n) {
        for x in 1..=n as u32 + 1 {
            expected.insert((pos, x));
        }
    }
    for key in &expected {
        if !cert.entries.contains_key(key) {
            problems.push(format!("missing entry for pos {}, x {}", key.0, key.1));
        }
    }
    for (&(pos, x), w) in &cert.entries {
        if !expected.contains(&(pos, x)) {
            problems.push(format!("spurious entry for pos {pos}, x {x}"));
            continue;
        }
        match p.extend(pos, x) {
            Ok(e) => {
                if !w.holds_in(e.values()) {
                    problems.push(format!(
                        "witness (start {}, half_len {}) is not a square of extend({pos}, {x})",
                        w.start, w.half_len
                    ));
                }
            }
            Err(err) => problems.push(format!("extend({pos}, {x}) failed: {err}")),
        }
    }
    (problems.is_empty(), problems)
}

// Serialization: a flat key-value tree with entries in (pos, x) order. The
// BTreeMap guarantees the canonical ordering on write.

#[derive(Serialize, Deserialize)]
struct CertificateEntryRepr {
    pos: usize,
    x: u32,
    start: usize,
    half_len: usize,
}

#[derive(Serialize, Deserialize)]
struct CertificateRepr {
    subject: String,
    spec: Vec<String>,
    entries: Vec<CertificateEntryRepr>,
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CertificateRepr {
            subject: self.subject.to_string(),
            spec: self.spec.anchors().map(|a| a.to_string()).collect(),
            entries: self
                .entries
                .iter()
                .map(|(&(pos, x), w)| CertificateEntryRepr {
                    pos,
                    x,
                    start: w.start,
                    half_len: w.half_len,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = CertificateRepr::deserialize(deserializer)?;
        let subject = parse_permutation(&repr.subject).map_err(D::Error::custom)?;
        let spec = PositionSpec::parse(&repr.spec.join(",")).map_err(D::Error::custom)?;
        let mut entries = BTreeMap::new();
        for e in repr.entries {
            entries.insert(
                (e.pos, e.x),
                SquareWitness {
                    start: e.start,
                    half_len: e.half_len,
                },
            );
        }
        Ok(Certificate {
            subject,
            spec,
            entries,
        })
    }
}

/// The four permutations the class results hang on, in the compact notation.
pub mod named {
    /// Right-crucial, length 7.
    pub const RIGHT_CRUCIAL_7: &str = "2136547";
    /// Bicrucial, length 19.
    pub const BICRUCIAL_19: &str = "143289756(14)(11)(10)(17)(19)(16)(13)(15)(18)(12)";
    /// Bicrucial, length 27.
    pub const BICRUCIAL_27: &str =
        "312(27)(26)6(24)(25)54(11)(23)(12)8(10)(16)97(17)(21)(19)(14)(18)(20)(15)(13)(22)";
    /// Bicrucial of even length, length 32.
    pub const BICRUCIAL_32: &str = "(28)(30)(31)(23)(22)(24)(29)(27)(19)(25)(26)(17)(13)(18)(21)(20)(14)(16)(32)879(15)(12)5(10)(11)31462";
    /// S-crucial, length 17.
    pub const S_CRUCIAL_17: &str = "24315(11)(10)69(12)87(13)(17)(15)(14)(16)";
}
