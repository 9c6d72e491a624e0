//! Level-by-level construction of square-free permutations.
//!
//! Level n is built from levels n-2 and n-1: for each square-free alpha of
//! length n-2, each sigma extending alpha on the left and each tau extending
//! it on the right are merged into the one or two length-n permutations
//! having sigma as left parent and tau as right parent. The only square such
//! a candidate can contain is a repeat of a pattern of length n/2, so a
//! single half-repeat check suffices. Crucial and bicrucial permutations of
//! length n-1 are read off as the members without square-free children.
//!
//! Levels persist as sorted text files `level-<n>.txt` in a store directory,
//! one canonical permutation per line under a `level <n> <count>` header.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use thiserror::Error;

use crate::cruciality::PositionSpec;
use crate::perm::{parse_permutation, pattern_of, same_pattern, PermError, Pattern, Permutation};

#[derive(Debug, Error)]
pub enum LayeredError {
    #[error("level {0} is not present in the store")]
    MissingLevel(usize),
    #[error("permutation of length 1 has no parent")]
    NoParent,
    #[error("parent mismatch: sigma/tau do not extend alpha")]
    ParentMismatch,
    #[error("half-repeat check requires even length >= 4, got {0}")]
    OddLength(usize),
    #[error("read-off supports only end-anchored specs 0, n, or 0,n; got {0}")]
    UnsupportedSpec(String),
    #[error("corrupt level file {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// The square-free permutations of one length, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub n: usize,
    pub members: Vec<Permutation>,
}

/// Pattern of the first n-1 letters.
pub fn left_parent(p: &Permutation) -> Result<Pattern, LayeredError> {
    if p.len() < 2 {
        return Err(LayeredError::NoParent);
    }
    Ok(pattern_of(&p.values()[..p.len() - 1])?)
}

/// Pattern of the last n-1 letters.
pub fn right_parent(p: &Permutation) -> Result<Pattern, LayeredError> {
    if p.len() < 2 {
        return Err(LayeredError::NoParent);
    }
    Ok(pattern_of(&p.values()[1..])?)
}

/// All length-n permutations with `sigma` as left parent and `tau` as right
/// parent, given their common overlap `alpha` (sigma extends alpha on the
/// left, tau on the right). There are one or two; two exactly when the first
/// and last elements are unconstrained relative to each other.
pub fn merge_candidates(
    alpha: &Permutation,
    sigma: &Permutation,
    tau: &Permutation,
) -> Result<Vec<Permutation>, LayeredError> {
    let m = alpha.len();
    if sigma.len() != m + 1
        || tau.len() != m + 1
        || right_parent(sigma)? != *alpha
        || left_parent(tau)? != *alpha
    {
        return Err(LayeredError::ParentMismatch);
    }
    let n = m + 2;
    let mut out = Vec::with_capacity(2);
    // Append each possible final rank to sigma and keep the candidates whose
    // last n-1 letters form tau.
    for r in 1..=n as u32 {
        let candidate = sigma.extend(m + 1, r)?;
        if same_pattern(&candidate.values()[1..], tau.values()) {
            out.push(candidate);
        }
    }
    debug_assert!(!out.is_empty() && out.len() <= 2);
    out.sort();
    Ok(out)
}

/// True iff the two halves of an even-length permutation share a pattern.
/// For a merge candidate this is the only possible square: any shorter one
/// would already appear in sigma or tau.
pub fn half_repeat_check(p: &Permutation) -> Result<bool, LayeredError> {
    let n = p.len();
    if n % 2 != 0 || n < 4 {
        return Err(LayeredError::OddLength(n));
    }
    Ok(same_pattern(&p.values()[..n / 2], &p.values()[n / 2..]))
}

/// A directory of level files.
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Store { dir })
    }

    pub fn path(&self, n: usize) -> PathBuf {
        self.dir.join(format!("level-{n}.txt"))
    }

    pub fn has_level(&self, n: usize) -> bool {
        self.path(n).exists()
    }

    pub fn read_level(&self, n: usize) -> Result<Level, LayeredError> {
        let path = self.path(n);
        if !path.exists() {
            return Err(LayeredError::MissingLevel(n));
        }
        let text = fs::read_to_string(&path)?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let parts: Vec<&str> = header.split_whitespace().collect();
        let corrupt = |reason: &str| LayeredError::Corrupt {
            path: path.clone(),
            reason: reason.to_string(),
        };
        if parts.len() != 3 || parts[0] != "level" {
            return Err(corrupt("bad header"));
        }
        let header_n: usize = parts[1].parse().map_err(|_| corrupt("bad header n"))?;
        let count: usize = parts[2].parse().map_err(|_| corrupt("bad header count"))?;
        if header_n != n {
            return Err(corrupt("header n does not match file name"));
        }
        let members: Vec<Permutation> = lines
            .map(parse_permutation)
            .collect::<Result<_, _>>()?;
        if members.len() != count {
            return Err(corrupt("member count does not match header"));
        }
        Ok(Level { n, members })
    }

    pub fn write_level(&self, level: &Level) -> Result<(), LayeredError> {
        let mut w = BufWriter::new(fs::File::create(self.path(level.n))?);
        writeln!(w, "level {} {}", level.n, level.members.len())?;
        for m in &level.members {
            writeln!(w, "{m}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds level n from stored levels n-2 and n-1 (levels 1 and 2 directly),
/// persists it, and returns it.
pub fn build_level(n: usize, store: &Store) -> Result<Level, LayeredError> {
    let level = match n {
        1 => Level {
            n: 1,
            members: vec![Permutation::identity(1)],
        },
        2 => Level {
            n: 2,
            members: vec![
                parse_permutation("12").unwrap(),
                parse_permutation("21").unwrap(),
            ],
        },
        _ => {
            let below = store.read_level(n - 1)?;
            let base = store.read_level(n - 2)?;
            construct(&base, &below)?
        }
    };
    store.write_level(&level)?;
    Ok(level)
}

fn construct(base: &Level, below: &Level) -> Result<Level, LayeredError> {
    let n = base.n + 2;
    // Index level n-1 by overlap with level n-2: sigma pools keyed by right
    // parent, tau pools keyed by left parent.
    let mut sigma_pool: HashMap<Pattern, Vec<&Permutation>> = HashMap::new();
    let mut tau_pool: HashMap<Pattern, Vec<&Permutation>> = HashMap::new();
    for q in &below.members {
        sigma_pool.entry(right_parent(q)?).or_default().push(q);
        tau_pool.entry(left_parent(q)?).or_default().push(q);
    }
    let empty = Vec::new();
    let mut members = BTreeSet::new();
    for alpha in &base.members {
        let sigmas = sigma_pool.get(alpha).unwrap_or(&empty);
        let taus = tau_pool.get(alpha).unwrap_or(&empty);
        for sigma in sigmas {
            for tau in taus {
                for candidate in merge_candidates(alpha, sigma, tau)? {
                    let keep = if n % 2 == 0 {
                        !half_repeat_check(&candidate)?
                    } else {
                        true
                    };
                    if keep {
                        members.insert(candidate);
                    }
                }
            }
        }
    }
    Ok(Level {
        n,
        members: members.into_iter().collect(),
    })
}

/// Builds all levels 1..=n_max, reusing any already stored.
pub fn build_up_to(n_max: usize, store: &Store) -> Result<(), LayeredError> {
    for n in 1..=n_max {
        if !store.has_level(n) {
            build_level(n, store)?;
        }
    }
    Ok(())
}

/// Members of level n-1 that are crucial in the stated end positions, read
/// off from the stored child relation: right-crucial means no square-free
/// right children, bicrucial means no square-free children at all.
pub fn read_off_crucial(
    store: &Store,
    n: usize,
    spec: &PositionSpec,
) -> Result<Vec<Permutation>, LayeredError> {
    let resolved = spec.resolve(n - 1);
    let left = resolved.contains(&0);
    let right = resolved.contains(&(n - 1));
    if resolved.len() != left as usize + right as usize || resolved.is_empty() {
        return Err(LayeredError::UnsupportedSpec(spec.to_string()));
    }
    let parents = store.read_level(n - 1)?;
    let children = store.read_level(n)?;
    // A permutation with a square-free right child appears as a left parent
    // at level n; one with a left child appears as a right parent.
    let mut has_right_child: BTreeSet<Pattern> = BTreeSet::new();
    let mut has_left_child: BTreeSet<Pattern> = BTreeSet::new();
    for c in &children.members {
        has_right_child.insert(left_parent(c)?);
        has_left_child.insert(right_parent(c)?);
    }
    Ok(parents
        .members
        .iter()
        .filter(|m| {
            (!right || !has_right_child.contains(*m)) && (!left || !has_left_child.contains(*m))
        })
        .cloned()
        .collect())
}
