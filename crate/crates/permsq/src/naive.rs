//! Brute-force reference routines.
//!
//! Everything here recomputes its answer from the definitions, without going
//! through the incremental square detector, the DFS engine, or the constraint
//! model. The cross-engine tests treat these as the ground truth at small n.

use crate::cruciality::PositionSpec;
use crate::perm::Permutation;

/// All permutations of length `n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut values: Vec<u32> = (1..=n as u32).collect();
    loop {
        out.push(Permutation::new(values.clone()).unwrap());
        if !next_lex(&mut values) {
            break;
        }
    }
    out
}

fn next_lex(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Definitional order-isomorphism: compare every index pair.
fn isomorphic(a: &[u32], b: &[u32]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if (a[i] < a[j]) != (b[i] < b[j]) {
                return false;
            }
        }
    }
    true
}

/// Definitional square check: scan all adjacent factor pairs of every
/// half-length.
pub fn contains_square(values: &[u32]) -> bool {
    let n = values.len();
    for h in 2..=n / 2 {
        for s in 0..=n - 2 * h {
            if isomorphic(&values[s..s + h], &values[s + h..s + 2 * h]) {
                return true;
            }
        }
    }
    false
}

pub fn is_square_free(p: &Permutation) -> bool {
    !contains_square(p.values())
}

/// Definitional cruciality at one slot: every inserted rank yields a square.
pub fn is_crucial_at(p: &Permutation, pos: usize) -> bool {
    let n = p.len() as u32;
    (1..=n + 1).all(|x| contains_square(p.extend(pos, x).unwrap().values()))
}

/// Definitional P-cruciality over the fully resolved position set.
pub fn is_p_crucial(p: &Permutation, spec: &PositionSpec) -> bool {
    if !is_square_free(p) {
        return false;
    }
    spec.resolve(p.len()).iter().all(|&pos| is_crucial_at(p, pos))
}

/// Filter all n! permutations by the class predicate.
pub fn enumerate(n: usize, spec: Option<&PositionSpec>) -> Vec<Permutation> {
    all_permutations(n)
        .into_iter()
        .filter(|p| match spec {
            None => is_square_free(p),
            Some(s) => is_p_crucial(p, s),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_count() {
        assert_eq!(all_permutations(1).len(), 1);
        assert_eq!(all_permutations(4).len(), 24);
        assert_eq!(all_permutations(6).len(), 720);
    }

    #[test]
    fn square_free_small_counts() {
        // 1, 2, 6, 12, 34, 104, 406 by direct filter.
        let want = [1usize, 2, 6, 12, 34, 104, 406];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(enumerate(i + 1, None).len(), w);
        }
    }
}
