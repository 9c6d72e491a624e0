//! Depth-first enumeration of square-free and P-crucial permutations.
//!
//! The search fills positions left to right over *order types*: a prefix of
//! depth k is the pattern of the first k elements, extended by appending a
//! relative rank in 1..=k+1. Square containment depends only on order type,
//! so each square check is exact before any absolute value is fixed, and the
//! depth-n leaves are exactly the permutations of n.
//!
//! Pruning: incremental square detection at every placement, zigzag phase
//! tracking, and (for classes requiring cruciality at position 0) an early
//! left-cruciality decision once the prefix covers every square length a
//! left insertion can create.

use thiserror::Error;

use crate::cruciality::{crucial_at_unchecked, PositionSpec};
use crate::perm::{Permutation, SymmetryGroup};
use crate::squares::{find_square_in, square_ending_at, ExtensionView, PhaseSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("reverse is not a class symmetry for spec {0}; rc-invariant counting needs a mirror-symmetric spec")]
    NotMirrorSymmetric(String),
}

/// Counters produced by one enumeration run.
///
/// With the full symmetry group, `total = 4 * up_to_symmetry -
/// 2 * rc_invariant`; with `{id, c}` only, `total = 2 * up_to_symmetry`
/// (for n > 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountResult {
    pub total: u64,
    pub up_to_symmetry: u64,
    /// Solutions with `p = r(c(p))`, one representative per `{p, c(p)}` pair.
    pub rc_invariant: u64,
    /// Committed left-branch placements.
    pub nodes: u64,
}

impl CountResult {
    fn merge(&mut self, other: &CountResult) {
        self.total += other.total;
        self.up_to_symmetry += other.up_to_symmetry;
        self.rc_invariant += other.rc_invariant;
        self.nodes += other.nodes;
    }
}

/// Which solutions a sink receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryMode {
    /// Every solution.
    None,
    /// Lex leaders only.
    UpToSymmetry,
    /// Reverse-complement-invariant lex leaders (under `{id, c}`) only.
    RcInvariantOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub zigzag_prune: bool,
    pub incremental_prune: bool,
    pub left_crucial_prune: bool,
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            zigzag_prune: true,
            incremental_prune: true,
            left_crucial_prune: true,
            workers: 1,
        }
    }
}

/// True iff `p` is lexicographically minimal in its orbit under `g`.
pub fn is_lex_leader(p: &Permutation, g: SymmetryGroup) -> bool {
    g.orbit(p).first() == Some(p)
}

/// The symmetry group applicable to a class: reverse is included exactly for
/// square-free (no spec) and mirror-symmetric specs.
pub fn class_group(spec: Option<&PositionSpec>) -> SymmetryGroup {
    match spec {
        None => SymmetryGroup::FULL,
        Some(s) if s.is_mirror_symmetric() => SymmetryGroup::FULL,
        Some(_) => SymmetryGroup::COMPLEMENT_ONLY,
    }
}

/// Counts (and optionally emits) the square-free permutations of length `n`,
/// or the P-crucial ones when `spec` is given. Emission order is the
/// deterministic discovery order of the single-worker search.
pub fn enumerate(
    n: usize,
    spec: Option<&PositionSpec>,
    mode: SymmetryMode,
    mut sink: Option<&mut dyn FnMut(&Permutation)>,
    opts: SearchOptions,
) -> CountResult {
    assert!(n >= 1);
    let positions: Vec<usize> = spec
        .map(|s| s.effective(n).into_iter().collect())
        .unwrap_or_default();
    let group = class_group(spec);
    let left_plan = spec.and_then(|s| {
        (opts.left_crucial_prune && s.resolve(n).contains(&0)).then(|| LeftCrucialPlan::new(n))
    });

    let config = Config {
        n,
        positions,
        group,
        mode,
        opts,
        left_plan,
    };

    if opts.workers > 1 && sink.is_none() {
        return enumerate_parallel(&config);
    }

    let mut searcher = Searcher::new(&config, sink.take());
    searcher.run_from_root();
    searcher.result
}

fn enumerate_parallel(config: &Config) -> CountResult {
    // Static split on the subtrees below a short prefix depth.
    let split_depth = 3.min(config.n);
    let mut stubs: Vec<Vec<u32>> = Vec::new();
    let mut prelude = CountResult::default();
    {
        let mut searcher = Searcher::new(config, None);
        searcher.collect_stubs(split_depth, &mut stubs);
        prelude.nodes = searcher.result.nodes;
    }
    if config.n == split_depth {
        // The stubs are already leaves; redo them sequentially.
        let mut searcher = Searcher::new(config, None);
        searcher.run_from_root();
        return searcher.result;
    }
    let workers = config.opts.workers.min(stubs.len().max(1));
    let chunks: Vec<Vec<Vec<u32>>> = (0..workers)
        .map(|w| {
            stubs
                .iter()
                .enumerate()
                .filter(|(i, _)| i % workers == w)
                .map(|(_, s)| s.clone())
                .collect()
        })
        .collect();
    let partials: Vec<CountResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| {
                scope.spawn(move || {
                    let mut local = CountResult::default();
                    for stub in chunk {
                        let mut searcher = Searcher::new(config, None);
                        searcher.run_from_stub(&stub);
                        local.merge(&searcher.result);
                    }
                    local
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut result = prelude;
    for p in &partials {
        result.merge(p);
    }
    result
}

/// Counts class members fixed by reverse-complement, one representative per
/// `{p, c(p)}` pair. Requires reversal to be a class symmetry.
pub fn count_rc_invariant(n: usize, spec: Option<&PositionSpec>) -> Result<u64, SearchError> {
    if let Some(s) = spec {
        if !s.is_mirror_symmetric() {
            return Err(SearchError::NotMirrorSymmetric(s.to_string()));
        }
    }
    Ok(enumerate(n, spec, SymmetryMode::None, None, SearchOptions::default()).rc_invariant)
}

struct Config {
    n: usize,
    positions: Vec<usize>,
    group: SymmetryGroup,
    mode: SymmetryMode,
    opts: SearchOptions,
    left_plan: Option<LeftCrucialPlan>,
}

/// Checkpoints for deciding left-cruciality at position 0 before the leaf.
///
/// A square created by inserting at position 0 has total length 4 or a
/// multiple of 8 and uses only the first `len - 1` elements, so its verdict
/// per insertion gap is fixed once the prefix is that long. At a checkpoint
/// of depth d, a gap not yet covered can only be rescued by a strictly
/// longer admissible square; each such length rescues at most one gap when
/// its half spans at least the current prefix, so more uncovered gaps than
/// remaining lengths is a dead branch.
struct LeftCrucialPlan {
    /// Admissible total lengths, ascending.
    lengths: Vec<usize>,
    /// Depths at which a decision fires (length - 1, below n).
    checkpoints: Vec<usize>,
}

impl LeftCrucialPlan {
    fn new(n: usize) -> Self {
        let mut lengths = Vec::new();
        if n + 1 >= 4 {
            lengths.push(4);
        }
        let mut l = 8;
        while l <= n + 1 {
            lengths.push(l);
            l += 8;
        }
        let checkpoints = lengths
            .iter()
            .map(|&l| l - 1)
            .filter(|&d| d < n)
            .collect();
        LeftCrucialPlan {
            lengths,
            checkpoints,
        }
    }

    /// False iff the branch can no longer produce a permutation crucial at
    /// position 0.
    fn viable(&self, prefix: &[u32]) -> bool {
        let d = prefix.len();
        if !self.checkpoints.contains(&d) {
            return true;
        }
        let future: Vec<usize> = self.lengths.iter().copied().filter(|&l| l > d + 1).collect();
        // Each future length l rescues at most one gap only when its half
        // (l/2 elements including the insertion) already spans the prefix.
        if !future.iter().all(|&l| l / 2 - 1 >= d) {
            return true;
        }
        let mut uncovered = 0usize;
        for r in 1..=(d as u32 + 1) {
            let view = ExtensionView::new(prefix, 0, r);
            let covered = self
                .lengths
                .iter()
                .copied()
                .filter(|&l| l <= d + 1)
                .any(|l| view.halves_match(0, l / 2));
            if !covered {
                uncovered += 1;
                if uncovered > future.len() {
                    return false;
                }
            }
        }
        true
    }
}

struct Searcher<'a, 'b> {
    config: &'a Config,
    prefix: Vec<u32>,
    phases: Vec<PhaseSet>,
    result: CountResult,
    sink: Option<&'b mut dyn FnMut(&Permutation)>,
}

impl<'a, 'b> Searcher<'a, 'b> {
    fn new(config: &'a Config, sink: Option<&'b mut dyn FnMut(&Permutation)>) -> Self {
        Searcher {
            config,
            prefix: Vec::with_capacity(config.n),
            phases: vec![PhaseSet::ALL],
            result: CountResult::default(),
            sink,
        }
    }

    fn run_from_root(&mut self) {
        self.descend();
    }

    fn run_from_stub(&mut self, stub: &[u32]) {
        // Replay the stub's placements (the prelude pass already counted
        // them as nodes) and search below it.
        for (i, &v) in stub.iter().enumerate() {
            let rank = stub[..i].iter().filter(|&&w| w < v).count() as u32 + 1;
            self.push(rank);
        }
        self.result.nodes -= stub.len() as u64;
        debug_assert_eq!(self.prefix, stub);
        self.descend();
    }

    fn collect_stubs(&mut self, depth: usize, out: &mut Vec<Vec<u32>>) {
        if self.prefix.len() == depth {
            out.push(self.prefix.clone());
            return;
        }
        let k = self.prefix.len();
        for r in 1..=(k as u32 + 1) {
            self.push(r);
            if self.placement_ok() {
                self.collect_stubs(depth, out);
            }
            self.pop();
        }
    }

    fn push(&mut self, r: u32) {
        for v in self.prefix.iter_mut() {
            if *v >= r {
                *v += 1;
            }
        }
        self.prefix.push(r);
        self.result.nodes += 1;
        let mut mask = *self.phases.last().unwrap();
        let k = self.prefix.len();
        if k >= 2 {
            mask.restrict(k - 1, self.prefix[k - 2] < self.prefix[k - 1]);
        }
        self.phases.push(mask);
    }

    fn pop(&mut self) {
        self.phases.pop();
        let r = self.prefix.pop().unwrap();
        for v in self.prefix.iter_mut() {
            if *v > r {
                *v -= 1;
            }
        }
    }

    /// Prune decisions after a committed placement.
    fn placement_ok(&self) -> bool {
        let opts = &self.config.opts;
        if opts.zigzag_prune && self.phases.last().unwrap().is_empty() {
            return false;
        }
        if opts.incremental_prune
            && square_ending_at(&self.prefix, self.prefix.len()).is_some()
        {
            return false;
        }
        if let Some(plan) = &self.config.left_plan {
            if !plan.viable(&self.prefix) {
                return false;
            }
        }
        true
    }

    fn descend(&mut self) {
        if self.prefix.len() == self.config.n {
            self.leaf();
            return;
        }
        let k = self.prefix.len();
        for r in 1..=(k as u32 + 1) {
            self.push(r);
            if self.placement_ok() {
                self.descend();
            }
            self.pop();
        }
    }

    fn leaf(&mut self) {
        if !self.config.opts.incremental_prune && find_square_in(&self.prefix).is_some() {
            return;
        }
        for &pos in &self.config.positions {
            if !crucial_at_unchecked(&self.prefix, pos) {
                return;
            }
        }
        self.result.total += 1;

        let p = Permutation::new(self.prefix.clone()).expect("leaf is a permutation");
        let leader = is_lex_leader(&p, self.config.group);
        if leader {
            self.result.up_to_symmetry += 1;
        }
        let rc_leader = p == p.reverse_complement() && p <= p.complement();
        if rc_leader {
            self.result.rc_invariant += 1;
        }
        if let Some(sink) = self.sink.as_mut() {
            let emit = match self.config.mode {
                SymmetryMode::None => true,
                SymmetryMode::UpToSymmetry => leader,
                SymmetryMode::RcInvariantOnly => rc_leader,
            };
            if emit {
                sink(&p);
            }
        }
    }
}

/// Convenience: the solution set of a class, in discovery order.
pub fn enumerate_collect(n: usize, spec: Option<&PositionSpec>) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut sink = |p: &Permutation| out.push(p.clone());
    enumerate(
        n,
        spec,
        SymmetryMode::None,
        Some(&mut sink),
        SearchOptions::default(),
    );
    out
}

/// Convenience: total count with default options.
pub fn count(n: usize, spec: Option<&PositionSpec>) -> u64 {
    enumerate(n, spec, SymmetryMode::None, None, SearchOptions::default()).total
}

#[allow(dead_code)]
fn _assert_send(_: &Config) {
    fn check<T: Sync>() {}
    check::<Config>();
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::naive;
    use crate::perm::parse_permutation;

    fn p(s: &str) -> Permutation {
        parse_permutation(s).unwrap()
    }

    fn spec(s: &str) -> PositionSpec {
        PositionSpec::parse(s).unwrap()
    }

    #[test]
    fn square_free_counts() {
        let want = [1u64, 2, 6, 12, 34, 104, 406, 1112, 3980];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(count(i + 1, None), w, "n = {}", i + 1);
        }
    }

    #[test]
    fn published_spec_class_counts() {
        assert_eq!(count(7, Some(&spec("n"))), 60);
        assert_eq!(count(9, Some(&spec("0,n"))), 54);
        assert_eq!(count(11, Some(&spec("0,n"))), 0);
        assert_eq!(count(7, Some(&spec("1,n-1"))), 18);
        assert_eq!(count(7, Some(&spec("0,n-1"))), 20);
        assert_eq!(count(7, Some(&spec("1"))), 82);
    }

    #[test]
    fn lex_leader_examples() {
        assert!(is_lex_leader(&p("2134"), SymmetryGroup::COMPLEMENT_ONLY));
        assert!(!is_lex_leader(&p("3421"), SymmetryGroup::COMPLEMENT_ONLY));
        // Exactly one member of each orbit is the leader.
        for n in 1..=6 {
            for g in [SymmetryGroup::COMPLEMENT_ONLY, SymmetryGroup::FULL] {
                for q in naive::all_permutations(n) {
                    let orbit = g.orbit(&q);
                    let leaders = orbit.iter().filter(|m| is_lex_leader(m, g)).count();
                    assert_eq!(leaders, 1, "{q}");
                }
            }
        }
    }

    #[test]
    fn rc_invariant_counts() {
        assert_eq!(count_rc_invariant(9, Some(&spec("0,n"))).unwrap(), 5);
        assert_eq!(count_rc_invariant(5, None).unwrap(), 3);
        assert_eq!(count_rc_invariant(6, None).unwrap(), 0);
        assert!(count_rc_invariant(7, Some(&spec("0,1"))).is_err());
    }

    #[test]
    fn matches_naive_filter() {
        let specs = ["0", "n", "1", "n-1", "0,n", "1,n-1", "0,1,n-1,n"];
        for n in 1..=7 {
            assert_eq!(count(n, None) as usize, naive::enumerate(n, None).len());
            for s in specs {
                let s = spec(s);
                assert_eq!(
                    count(n, Some(&s)) as usize,
                    naive::enumerate(n, Some(&s)).len(),
                    "n = {n}, spec = {s}"
                );
            }
        }
    }

    #[test]
    fn pruning_toggles_do_not_change_totals() {
        for n in 1..=8 {
            for s in [None, Some(spec("0")), Some(spec("0,n"))] {
                let mut totals = BTreeSet::new();
                let mut nodes = BTreeSet::new();
                for zig in [false, true] {
                    for inc in [false, true] {
                        for left in [false, true] {
                            let opts = SearchOptions {
                                zigzag_prune: zig,
                                incremental_prune: inc,
                                left_crucial_prune: left,
                                workers: 1,
                            };
                            let r = enumerate(n, s.as_ref(), SymmetryMode::None, None, opts);
                            totals.insert(r.total);
                            nodes.insert(r.nodes);
                        }
                    }
                }
                assert_eq!(totals.len(), 1, "n = {n}, spec = {s:?}");
                let _ = nodes; // node counts may differ; totals may not
            }
        }
    }

    #[test]
    fn parallel_matches_single_worker() {
        for n in [6usize, 9] {
            for s in [None, Some(spec("0,n"))] {
                let single =
                    enumerate(n, s.as_ref(), SymmetryMode::None, None, SearchOptions::default());
                let par = enumerate(
                    n,
                    s.as_ref(),
                    SymmetryMode::None,
                    None,
                    SearchOptions {
                        workers: 4,
                        ..SearchOptions::default()
                    },
                );
                assert_eq!(single.total, par.total);
                assert_eq!(single.up_to_symmetry, par.up_to_symmetry);
                assert_eq!(single.rc_invariant, par.rc_invariant);
                assert_eq!(single.nodes, par.nodes);
            }
        }
    }

    #[test]
    fn emitted_solutions_are_distinct_and_valid() {
        let s = spec("n");
        let emitted = enumerate_collect(7, Some(&s));
        assert_eq!(emitted.len(), 60);
        let set: BTreeSet<&Permutation> = emitted.iter().collect();
        assert_eq!(set.len(), 60);
        for q in &emitted {
            assert!(crate::cruciality::is_p_crucial(q, &s));
        }
    }

    #[test]
    fn inclusion_exclusion_identity() {
        for (n, s) in [(9, Some(spec("0,n"))), (8, None), (7, Some(spec("1,n-1")))] {
            let r = enumerate(n, s.as_ref(), SymmetryMode::None, None, SearchOptions::default());
            assert_eq!(r.total, 4 * r.up_to_symmetry - 2 * r.rc_invariant);
        }
        // Complement-only classes: total is twice the leader count.
        for (n, s) in [(7, spec("0")), (8, spec("1"))] {
            let r = enumerate(n, Some(&s), SymmetryMode::None, None, SearchOptions::default());
            assert_eq!(r.total, 2 * r.up_to_symmetry);
        }
    }
}
