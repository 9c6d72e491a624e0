//! A miniature constraint engine over a reified order encoding.
//!
//! A model has one integer variable per position with domain `1..=n` and one
//! boolean order literal `b(p,q)` per pair `p < q` meaning `var_p < var_q`.
//! Square-freeness is stated over the literals: for every factor window of
//! even total length, the two halves must not agree on every internal order
//! comparison. Cruciality is a disjunction per (insertion slot, inserted
//! value) of candidate squares, with comparisons against the inserted value
//! expressed as threshold conditions on the integer variables.
//!
//! Propagation is deliberately partial; completeness comes from evaluating
//! the exact class semantics at every full assignment, so the propagators
//! only have to be sound. The cross-checks in the test suite compare this
//! engine's solution counts against the direct backtracking search.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cruciality::{self, PositionSpec};
use crate::dfs::{class_group, is_lex_leader, SymmetryMode};
use crate::perm::{Permutation, SymmetryGroup};
use crate::squares::{end_extension_length_allowed, is_square_free};

#[derive(Debug, Error)]
pub enum CspError {
    #[error("lex-leader group includes reverse but the position spec is not mirror-symmetric")]
    InapplicableGroup,
    #[error("reverse-complement-invariant counting requires a mirror-symmetric spec")]
    NotMirrorSymmetric,
}

/// One symmetry image used by a lex-leader constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SymOp {
    Reverse,
    Complement,
    ReverseComplement,
}

impl SymOp {
    fn apply(&self, p: &Permutation) -> Permutation {
        match self {
            SymOp::Reverse => p.reverse(),
            SymOp::Complement => p.complement(),
            SymOp::ReverseComplement => p.reverse_complement(),
        }
    }
}

#[derive(Debug, Clone)]
enum Constraint {
    /// Pairwise distinctness of all variables (value removal on assignment).
    AllDifferent,
    /// `b(p,q) = true  ⇔  var_p < var_q` (0-based `p < q`).
    Channel { p: usize, q: usize, lit: usize },
    /// The window of length `2h` starting at 0-based `s` is not a square:
    /// the halves must differ on at least one internal order comparison.
    /// `pairs` holds `(lit_left, lit_right)` for corresponding comparisons.
    SquareBlock {
        s: usize,
        h: usize,
        pairs: Vec<(usize, usize)>,
    },
    /// Inserting value `x` at slot `pos` must create a square: at least one
    /// of the candidate witnesses `(start, half_len)` (0-based start in the
    /// extended sequence) must hold.
    CrucialityClause {
        pos: usize,
        x: u32,
        options: Vec<(usize, usize)>,
    },
    /// `vars ≤lex op(vars)`.
    LexLeq { op: SymOp },
}

/// An immutable constraint model; solver runs own their state exclusively.
#[derive(Debug, Clone)]
pub struct Model {
    pub n: usize,
    spec: Option<PositionSpec>,
    mode: SymmetryMode,
    constraints: Vec<Constraint>,
    lex_ops: Vec<SymOp>,
    /// Touched-variable lists, parallel to `constraints` (for wdeg).
    var_constraints: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub solutions: u64,
    /// Left branches (assignments), the node count of the search tree.
    pub nodes: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    Static,
    Wdeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preprocess {
    None,
    Singleton,
    /// Singleton consistency with a nested singleton pass inside each probe.
    SingletonDoubled,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub heuristic: Heuristic,
    pub preprocess: Preprocess,
    /// Disable to fall back to pure leaf evaluation (soundness oracle).
    pub propagation: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            heuristic: Heuristic::Static,
            preprocess: Preprocess::None,
            propagation: true,
        }
    }
}

fn lit_index(n: usize, p: usize, q: usize) -> usize {
    debug_assert!(p < q && q < n);
    p * (2 * n - p - 1) / 2 + (q - p - 1)
}

/// Mutable search state: variable domains as bitmasks and literal values.
#[derive(Debug, Clone)]
pub struct State {
    n: usize,
    doms: Vec<u32>,
    lits: Vec<Option<bool>>,
}

impl State {
    fn full(n: usize) -> State {
        State {
            n,
            doms: vec![(1u32 << n) - 1; n],
            lits: vec![None; n * (n - 1) / 2],
        }
    }

    pub fn domain(&self, var: usize) -> Vec<u32> {
        (1..=self.n as u32)
            .filter(|v| self.doms[var] & (1 << (v - 1)) != 0)
            .collect()
    }

    pub fn lit(&self, p: usize, q: usize) -> Option<bool> {
        self.lits[lit_index(self.n, p, q)]
    }

    pub fn set_lit(&mut self, p: usize, q: usize, value: bool) {
        self.lits[lit_index(self.n, p, q)] = Some(value);
    }

    pub fn assign(&mut self, var: usize, value: u32) {
        self.doms[var] = 1 << (value - 1);
    }

    pub fn remove(&mut self, var: usize, value: u32) {
        self.doms[var] &= !(1 << (value - 1));
    }

    fn min(&self, var: usize) -> u32 {
        self.doms[var].trailing_zeros() + 1
    }

    fn max(&self, var: usize) -> u32 {
        32 - self.doms[var].leading_zeros()
    }

    fn is_assigned(&self, var: usize) -> bool {
        self.doms[var].count_ones() == 1
    }

    fn all_assigned(&self) -> bool {
        self.doms.iter().all(|d| d.count_ones() == 1)
    }

    fn values(&self) -> Vec<u32> {
        self.doms.iter().map(|d| d.trailing_zeros() + 1).collect()
    }
}

/// Builds the model for square-free (or, with `spec`, P-crucial)
/// permutations of length `n`. `mode` selects which representatives count as
/// solutions; lex-leader constraints are added separately via
/// [`add_lex_leader`]. Candidate squares for end insertions are restricted
/// to total length 4 or a multiple of 8 unless `all_lengths` is set.
pub fn build_model_with(
    n: usize,
    spec: Option<&PositionSpec>,
    mode: SymmetryMode,
    all_lengths: bool,
) -> Model {
    let mut constraints = vec![Constraint::AllDifferent];
    for p in 0..n {
        for q in p + 1..n {
            constraints.push(Constraint::Channel {
                p,
                q,
                lit: lit_index(n, p, q),
            });
        }
    }
    let mut h = 2;
    while 2 * h <= n {
        for s in 0..=n - 2 * h {
            let mut pairs = Vec::new();
            for a in 0..h {
                for b in a + 1..h {
                    pairs.push((
                        lit_index(n, s + a, s + b),
                        lit_index(n, s + h + a, s + h + b),
                    ));
                }
            }
            constraints.push(Constraint::SquareBlock { s, h, pairs });
        }
        h += 1;
    }
    if let Some(spec) = spec {
        for &pos in &spec.effective(n) {
            for x in 1..=(n + 1) as u32 {
                let mut options = Vec::new();
                let mut h = 2;
                while 2 * h <= n + 1 {
                    let ok_len = all_lengths
                        || !(pos == 0 || pos == n)
                        || end_extension_length_allowed(2 * h);
                    if ok_len {
                        for s in 0..=(n + 1 - 2 * h) {
                            if s <= pos && pos < s + 2 * h {
                                options.push((s, h));
                            }
                        }
                    }
                    h += 1;
                }
                constraints.push(Constraint::CrucialityClause { pos, x, options });
            }
        }
    }
    let var_constraints = touch_lists(n, &constraints);
    Model {
        n,
        spec: spec.cloned(),
        mode,
        constraints,
        lex_ops: Vec::new(),
        var_constraints,
    }
}

pub fn build_model(n: usize, spec: Option<&PositionSpec>, mode: SymmetryMode) -> Model {
    build_model_with(n, spec, mode, false)
}

fn touch_lists(n: usize, constraints: &[Constraint]) -> Vec<Vec<usize>> {
    let mut lists = vec![Vec::new(); n];
    for (ci, c) in constraints.iter().enumerate() {
        let touched: Vec<usize> = match c {
            Constraint::AllDifferent | Constraint::LexLeq { .. } => (0..n).collect(),
            Constraint::Channel { p, q, .. } => vec![*p, *q],
            Constraint::SquareBlock { s, h, .. } => (*s..s + 2 * h).collect(),
            Constraint::CrucialityClause { pos, options, .. } => {
                let lo = options.iter().map(|&(s, _)| s).min().unwrap_or(0);
                let hi = options
                    .iter()
                    .map(|&(s, h)| s + 2 * h)
                    .max()
                    .unwrap_or(0);
                // Extended indices back to original positions, skipping pos.
                (lo..hi)
                    .filter(|&e| e != *pos)
                    .map(|e| if e < *pos { e } else { e - 1 })
                    .collect()
            }
        };
        for v in touched {
            lists[v].push(ci);
        }
    }
    lists
}

/// Adds `vars ≤lex op(vars)` for every non-identity member of `g`, so the
/// solutions become the lex-leader representatives of their orbits.
pub fn add_lex_leader(mut m: Model, g: SymmetryGroup) -> Result<Model, CspError> {
    if g.includes_reverse() {
        if let Some(spec) = &m.spec {
            if !spec.is_mirror_symmetric() {
                return Err(CspError::InapplicableGroup);
            }
        }
    }
    let mut ops = vec![SymOp::Complement];
    if g.includes_reverse() {
        ops.push(SymOp::Reverse);
        ops.push(SymOp::ReverseComplement);
    }
    for op in ops {
        if !m.lex_ops.contains(&op) {
            m.lex_ops.push(op);
            m.constraints.push(Constraint::LexLeq { op });
        }
    }
    m.var_constraints = touch_lists(m.n, &m.constraints);
    Ok(m)
}

impl Model {
    pub fn initial_state(&self) -> State {
        State::full(self.n)
    }

    pub fn order_lit_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// `(start, half_len)` of every square block, 0-based starts.
    pub fn square_blocks(&self) -> Vec<(usize, usize)> {
        self.constraints
            .iter()
            .filter_map(|c| match c {
                Constraint::SquareBlock { s, h, .. } => Some((*s, *h)),
                _ => None,
            })
            .collect()
    }

    pub fn cruciality_clause_count(&self) -> usize {
        self.constraints
            .iter()
            .filter(|c| matches!(c, Constraint::CrucialityClause { .. }))
            .count()
    }

    /// Debugging listing of variables, literals, and constraints. The format
    /// is human-oriented and not stability-guaranteed.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model n={} lits={}", self.n, self.order_lit_count());
        for v in 0..self.n {
            let _ = writeln!(out, "var v{} in 1..={}", v + 1, self.n);
        }
        for c in &self.constraints {
            let line = match c {
                Constraint::AllDifferent => "alldifferent".to_string(),
                Constraint::Channel { p, q, .. } => {
                    format!("channel b({},{}) <=> v{} < v{}", p + 1, q + 1, p + 1, q + 1)
                }
                Constraint::SquareBlock { s, h, .. } => {
                    format!("square-block start={} half={}", s + 1, h)
                }
                Constraint::CrucialityClause { pos, x, options } => format!(
                    "cruciality slot={pos} value={x} candidates={}",
                    options.len()
                ),
                Constraint::LexLeq { op } => format!("lex-leq {op:?}"),
            };
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

/// Three-valued order comparison between extended indices `e1 < e2` for the
/// extension inserting `x` at slot `pos` (adjusted semantics: the inserted
/// element is below an original value `v` iff `x <= v`).
fn tri_less(m: &Model, st: &State, e1: usize, e2: usize, pos: usize, x: u32) -> Option<bool> {
    debug_assert!(e1 < e2);
    if e1 == pos {
        let o = e2 - 1;
        if st.min(o) >= x {
            Some(true)
        } else if st.max(o) < x {
            Some(false)
        } else {
            None
        }
    } else if e2 == pos {
        let o = e1;
        if st.max(o) < x {
            Some(true)
        } else if st.min(o) >= x {
            Some(false)
        } else {
            None
        }
    } else {
        let o1 = if e1 < pos { e1 } else { e1 - 1 };
        let o2 = if e2 < pos { e2 } else { e2 - 1 };
        if let Some(b) = st.lits[lit_index(m.n, o1, o2)] {
            return Some(b);
        }
        if st.max(o1) < st.min(o2) {
            Some(true)
        } else if st.min(o1) > st.max(o2) {
            Some(false)
        } else {
            None
        }
    }
}

/// Whether candidate witness `(s, h)` holds in the extension: true / false /
/// undetermined under the current partial state.
fn option_status(m: &Model, st: &State, s: usize, h: usize, pos: usize, x: u32) -> Option<bool> {
    let mut unknown = false;
    for a in 0..h {
        for b in a + 1..h {
            let t1 = tri_less(m, st, s + a, s + b, pos, x);
            let t2 = tri_less(m, st, s + h + a, s + h + b, pos, x);
            match (t1, t2) {
                (Some(u), Some(v)) => {
                    if u != v {
                        return Some(false);
                    }
                }
                _ => unknown = true,
            }
        }
    }
    if unknown {
        None
    } else {
        Some(true)
    }
}

enum Outcome {
    NoChange,
    Changed,
    Conflict,
}

fn propagate_one(m: &Model, c: &Constraint, st: &mut State) -> Outcome {
    let mut changed = false;
    match c {
        Constraint::AllDifferent => {
            for v in 0..m.n {
                if st.is_assigned(v) {
                    let bit = st.doms[v];
                    for w in 0..m.n {
                        if w != v && st.doms[w] & bit != 0 {
                            st.doms[w] &= !bit;
                            changed = true;
                            if st.doms[w] == 0 {
                                return Outcome::Conflict;
                            }
                        }
                    }
                }
            }
        }
        Constraint::Channel { p, q, lit } => {
            let (p, q, lit) = (*p, *q, *lit);
            match st.lits[lit] {
                None => {
                    if st.max(p) < st.min(q) {
                        st.lits[lit] = Some(true);
                        changed = true;
                    } else if st.min(p) > st.max(q) {
                        st.lits[lit] = Some(false);
                        changed = true;
                    }
                }
                Some(true) => {
                    // v_p < v_q: bound each domain by the other.
                    let below = (1u32 << (st.max(q) - 1)) - 1;
                    if st.doms[p] & !below != 0 {
                        st.doms[p] &= below;
                        changed = true;
                        if st.doms[p] == 0 {
                            return Outcome::Conflict;
                        }
                    }
                    let above = !((1u32 << st.min(p)) - 1);
                    if st.doms[q] & !above != 0 {
                        st.doms[q] &= above;
                        changed = true;
                        if st.doms[q] == 0 {
                            return Outcome::Conflict;
                        }
                    }
                }
                Some(false) => {
                    let above = !((1u32 << st.min(q)) - 1);
                    if st.doms[p] & !above != 0 {
                        st.doms[p] &= above;
                        changed = true;
                        if st.doms[p] == 0 {
                            return Outcome::Conflict;
                        }
                    }
                    let below = (1u32 << (st.max(p) - 1)) - 1;
                    if st.doms[q] & !below != 0 {
                        st.doms[q] &= below;
                        changed = true;
                        if st.doms[q] == 0 {
                            return Outcome::Conflict;
                        }
                    }
                }
            }
        }
        Constraint::SquareBlock { pairs, .. } => {
            let mut undecided = None;
            let mut undecided_count = 0;
            for &(la, lb) in pairs {
                match (st.lits[la], st.lits[lb]) {
                    (Some(a), Some(b)) => {
                        if a != b {
                            return Outcome::NoChange; // satisfied
                        }
                    }
                    _ => {
                        undecided = Some((la, lb));
                        undecided_count += 1;
                    }
                }
            }
            match (undecided, undecided_count) {
                (None, 0) => return Outcome::Conflict, // halves pattern-equal
                (Some((la, lb)), 1) => {
                    // Force the last comparison pair to disagree.
                    match (st.lits[la], st.lits[lb]) {
                        (Some(a), None) => {
                            st.lits[lb] = Some(!a);
                            changed = true;
                        }
                        (None, Some(b)) => {
                            st.lits[la] = Some(!b);
                            changed = true;
                        }
                        _ => {}
                    }
                }
                _ => {}
            }
        }
        Constraint::CrucialityClause { pos, x, options } => {
            if options.is_empty() {
                return Outcome::Conflict;
            }
            let mut all_false = true;
            for &(s, h) in options {
                match option_status(m, st, s, h, *pos, *x) {
                    Some(true) => return Outcome::NoChange, // satisfied
                    Some(false) => {}
                    None => all_false = false,
                }
            }
            if all_false {
                return Outcome::Conflict;
            }
        }
        Constraint::LexLeq { op } => {
            // Prefix walk comparing vars against the symmetry image.
            for i in 0..m.n {
                let vi = st.is_assigned(i).then(|| st.min(i));
                let src = match op {
                    SymOp::Complement => i,
                    SymOp::Reverse | SymOp::ReverseComplement => m.n - 1 - i,
                };
                let wi = st.is_assigned(src).then(|| match op {
                    SymOp::Reverse => st.min(src),
                    SymOp::Complement | SymOp::ReverseComplement => {
                        m.n as u32 + 1 - st.min(src)
                    }
                });
                match (vi, wi) {
                    (Some(a), Some(b)) => {
                        if a < b {
                            break;
                        }
                        if a > b {
                            return Outcome::Conflict;
                        }
                    }
                    _ => break,
                }
            }
        }
    }
    if changed {
        Outcome::Changed
    } else {
        Outcome::NoChange
    }
}

/// Runs all propagators to fixpoint. On conflict returns the index of the
/// constraint that detected it.
pub fn propagate(m: &Model, st: &mut State) -> Result<(), usize> {
    loop {
        let mut changed = false;
        for (ci, c) in m.constraints.iter().enumerate() {
            match propagate_one(m, c, st) {
                Outcome::Conflict => return Err(ci),
                Outcome::Changed => changed = true,
                Outcome::NoChange => {}
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

struct Solver<'a> {
    model: &'a Model,
    opts: SolveOptions,
    stats: SearchStats,
    weights: Vec<u64>,
    sink: Option<&'a mut dyn FnMut(&Permutation)>,
}

impl<'a> Solver<'a> {
    fn leaf_ok(&self, st: &State) -> bool {
        let Ok(p) = Permutation::new(st.values()) else {
            return false; // duplicate values (possible with propagation off)
        };
        if !is_square_free(&p) {
            return false;
        }
        if let Some(spec) = &self.model.spec {
            if !cruciality::is_p_crucial(&p, spec) {
                return false;
            }
        }
        for op in &self.model.lex_ops {
            if p > op.apply(&p) {
                return false;
            }
        }
        match self.model.mode {
            SymmetryMode::None => true,
            SymmetryMode::UpToSymmetry => {
                is_lex_leader(&p, class_group(self.model.spec.as_ref()))
            }
            SymmetryMode::RcInvariantOnly => {
                p == p.reverse_complement() && p <= p.complement()
            }
        }
    }

    fn select_var(&self, st: &State) -> usize {
        match self.opts.heuristic {
            Heuristic::Static => (0..self.model.n)
                .find(|&v| !st.is_assigned(v))
                .expect("unassigned var exists"),
            Heuristic::Wdeg => {
                let mut best = None;
                let mut best_score = f64::INFINITY;
                for v in 0..self.model.n {
                    if st.is_assigned(v) {
                        continue;
                    }
                    let wsum: u64 = self.model.var_constraints[v]
                        .iter()
                        .map(|&ci| self.weights[ci])
                        .sum();
                    let score = st.doms[v].count_ones() as f64 / wsum.max(1) as f64;
                    if score < best_score {
                        best_score = score;
                        best = Some(v);
                    }
                }
                best.expect("unassigned var exists")
            }
        }
    }

    fn search(&mut self, mut st: State) {
        if self.opts.propagation {
            if let Err(ci) = propagate(self.model, &mut st) {
                self.stats.failures += 1;
                self.weights[ci] += 1;
                return;
            }
        }
        if st.all_assigned() {
            if self.leaf_ok(&st) {
                self.stats.solutions += 1;
                if let Some(sink) = self.sink.as_mut() {
                    sink(&Permutation::new(st.values()).expect("valid at leaf"));
                }
            }
            return;
        }
        let var = self.select_var(&st);
        let val = st.min(var);
        let mut left = st.clone();
        left.assign(var, val);
        self.stats.nodes += 1;
        self.search(left);
        st.remove(var, val);
        if st.doms[var] == 0 {
            self.stats.failures += 1;
        } else {
            self.search(st);
        }
    }

    /// One pass of singleton consistency over `st`; returns Err on wipeout.
    fn singleton_pass(&mut self, st: &mut State, nested: bool) -> Result<bool, usize> {
        let mut changed = false;
        for var in 0..self.model.n {
            for val in st.domain(var) {
                if st.is_assigned(var) {
                    break;
                }
                let mut probe = st.clone();
                probe.assign(var, val);
                let mut failed = propagate(self.model, &mut probe).is_err();
                if !failed && nested {
                    // Doubled variant: run a nested singleton pass inside
                    // the probe and treat its wipeout as a failed probe.
                    failed = self.singleton_pass(&mut probe, false).is_err();
                }
                if failed {
                    st.remove(var, val);
                    changed = true;
                    if st.doms[var] == 0 {
                        return Err(0);
                    }
                    propagate(self.model, st)?;
                }
            }
        }
        Ok(changed)
    }

    fn run(&mut self) {
        let mut root = self.model.initial_state();
        if self.opts.propagation {
            if propagate(self.model, &mut root).is_err() {
                self.stats.failures += 1;
                return;
            }
            let nested = self.opts.preprocess == Preprocess::SingletonDoubled;
            if self.opts.preprocess != Preprocess::None {
                loop {
                    match self.singleton_pass(&mut root, nested) {
                        Ok(true) => continue,
                        Ok(false) => break,
                        Err(_) => {
                            self.stats.failures += 1;
                            return;
                        }
                    }
                }
            }
        }
        self.search(root);
    }
}

pub fn solve_with_options(m: &Model, opts: SolveOptions) -> SearchStats {
    let mut solver = Solver {
        model: m,
        opts,
        stats: SearchStats::default(),
        weights: vec![1; m.constraints.len()],
        sink: None,
    };
    solver.run();
    solver.stats
}

/// Complete depth-first search with chronological backtracking; counts all
/// solutions of the model.
pub fn solve_count(m: &Model, heuristic: Heuristic, preprocess: Preprocess) -> SearchStats {
    solve_with_options(
        m,
        SolveOptions {
            heuristic,
            preprocess,
            propagation: true,
        },
    )
}

/// Like [`solve_with_options`] but streams each solution to `sink`.
pub fn solve_with_sink(
    m: &Model,
    opts: SolveOptions,
    sink: &mut dyn FnMut(&Permutation),
) -> SearchStats {
    let mut solver = Solver {
        model: m,
        opts,
        stats: SearchStats::default(),
        weights: vec![1; m.constraints.len()],
        sink: Some(sink),
    };
    solver.run();
    solver.stats
}

/// Like [`solve_count`] but also collects the solutions.
pub fn solve_collect(m: &Model, opts: SolveOptions) -> (SearchStats, Vec<Permutation>) {
    let mut out = Vec::new();
    let stats = solve_with_sink(m, opts, &mut |p| out.push(p.clone()));
    (stats, out)
}

/// Convenience entry point mirroring the direct search: builds the model,
/// adds lex-leader constraints when a symmetry mode asks for them, solves.
pub fn count(
    n: usize,
    spec: Option<&PositionSpec>,
    mode: SymmetryMode,
    heuristic: Heuristic,
    preprocess: Preprocess,
) -> Result<SearchStats, CspError> {
    let mut m = build_model(n, spec, mode);
    match mode {
        SymmetryMode::None => {}
        SymmetryMode::UpToSymmetry => {
            m = add_lex_leader(m, class_group(spec))?;
        }
        SymmetryMode::RcInvariantOnly => {
            if class_group(spec) != SymmetryGroup::FULL {
                return Err(CspError::NotMirrorSymmetric);
            }
            m = add_lex_leader(m, SymmetryGroup::COMPLEMENT_ONLY)?;
        }
    }
    Ok(solve_count(&m, heuristic, preprocess))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs;

    fn spec(text: &str) -> PositionSpec {
        PositionSpec::parse(text).unwrap()
    }

    #[test]
    fn model_shape_examples() {
        let m = build_model(5, None, SymmetryMode::None);
        assert_eq!(m.order_lit_count(), 10);
        assert_eq!(m.square_blocks(), vec![(0, 2), (1, 2)]);
        let m3 = build_model(3, None, SymmetryMode::None);
        assert!(m3.square_blocks().is_empty());
        assert_eq!(
            solve_count(&m3, Heuristic::Static, Preprocess::None).solutions,
            6
        );
        assert!(m.dump().contains("square-block start=1 half=2"));
    }

    #[test]
    fn channel_propagation_examples() {
        let m = build_model(5, None, SymmetryMode::None);
        let mut st = m.initial_state();
        st.assign(0, 3);
        st.remove(1, 3);
        st.remove(1, 4);
        st.remove(1, 5);
        propagate(&m, &mut st).unwrap();
        assert_eq!(st.lit(0, 1), Some(false));

        let mut st = m.initial_state();
        st.set_lit(0, 1, true);
        st.assign(1, 2);
        propagate(&m, &mut st).unwrap();
        assert_eq!(st.domain(0), vec![1]);
    }

    #[test]
    fn square_block_conflict_example() {
        // h=2 block over positions 1..4: halves pattern-equal iff the single
        // comparison pair agrees; forcing both ascents is a conflict.
        let m = build_model(4, None, SymmetryMode::None);
        let mut st = m.initial_state();
        st.set_lit(0, 1, true);
        st.set_lit(2, 3, true);
        assert!(propagate(&m, &mut st).is_err());
        // With only one side fixed the block forces the other to differ.
        let mut st = m.initial_state();
        st.set_lit(0, 1, true);
        propagate(&m, &mut st).unwrap();
        assert_eq!(st.lit(2, 3), Some(false));
    }

    #[test]
    fn solve_count_examples() {
        let m = build_model(5, None, SymmetryMode::None);
        assert_eq!(
            solve_count(&m, Heuristic::Static, Preprocess::None).solutions,
            34
        );
        let bi = spec("0,n");
        let m = build_model(9, Some(&bi), SymmetryMode::None);
        assert_eq!(
            solve_count(&m, Heuristic::Static, Preprocess::None).solutions,
            54
        );
        let m1 = build_model(1, None, SymmetryMode::None);
        let s = solve_count(&m1, Heuristic::Static, Preprocess::None);
        assert_eq!(s.solutions, 1);
        assert!(s.nodes <= 1);
        let m = build_model(7, Some(&spec("n")), SymmetryMode::None);
        assert_eq!(
            solve_count(&m, Heuristic::Static, Preprocess::None).solutions,
            60
        );
    }

    #[test]
    fn lex_leader_examples() {
        let m = add_lex_leader(
            build_model(5, None, SymmetryMode::None),
            SymmetryGroup::FULL,
        )
        .unwrap();
        assert_eq!(
            solve_count(&m, Heuristic::Static, Preprocess::None).solutions,
            10
        );
        let bi = spec("0,n");
        let m = add_lex_leader(
            build_model(9, Some(&bi), SymmetryMode::None),
            SymmetryGroup::FULL,
        )
        .unwrap();
        assert_eq!(
            solve_count(&m, Heuristic::Static, Preprocess::None).solutions,
            16
        );
        let m = add_lex_leader(
            build_model(2, None, SymmetryMode::None),
            SymmetryGroup::COMPLEMENT_ONLY,
        )
        .unwrap();
        let (_, sols) = solve_collect(&m, SolveOptions::default());
        assert_eq!(sols, vec![Permutation::new(vec![1, 2]).unwrap()]);
        // Reverse is inapplicable to a one-sided class.
        assert!(add_lex_leader(
            build_model(7, Some(&spec("n")), SymmetryMode::None),
            SymmetryGroup::FULL
        )
        .is_err());
    }

    #[test]
    fn matches_dfs_counts() {
        for n in 1..=8 {
            let m = build_model(n, None, SymmetryMode::None);
            assert_eq!(
                solve_count(&m, Heuristic::Static, Preprocess::None).solutions,
                dfs::count(n, None),
                "square-free n={n}"
            );
        }
        for text in ["0", "1", "0,1", "0,n-1", "1,n-1", "0,n"] {
            let sp = spec(text);
            for n in 5..=8 {
                let m = build_model(n, Some(&sp), SymmetryMode::None);
                assert_eq!(
                    solve_count(&m, Heuristic::Static, Preprocess::None).solutions,
                    dfs::count(n, Some(&sp)),
                    "spec {text} n={n}"
                );
            }
        }
    }

    #[test]
    fn propagation_is_sound() {
        // Propagation-free search is pure leaf evaluation; the counts match.
        for n in 1..=7 {
            let m = build_model(n, None, SymmetryMode::None);
            let with = solve_with_options(&m, SolveOptions::default());
            let without = solve_with_options(
                &m,
                SolveOptions {
                    propagation: false,
                    ..SolveOptions::default()
                },
            );
            assert_eq!(with.solutions, without.solutions, "n={n}");
            assert!(with.nodes <= without.nodes);
        }
        let sp = spec("n");
        let m = build_model(7, Some(&sp), SymmetryMode::None);
        let with = solve_with_options(&m, SolveOptions::default());
        let without = solve_with_options(
            &m,
            SolveOptions {
                propagation: false,
                ..SolveOptions::default()
            },
        );
        assert_eq!(with.solutions, 60);
        assert_eq!(without.solutions, 60);
    }

    #[test]
    fn channel_completeness_at_assigned_fixpoint() {
        let m = build_model(6, None, SymmetryMode::None);
        let (_, sols) = solve_collect(&m, SolveOptions::default());
        for p in sols {
            let mut st = m.initial_state();
            for (i, &v) in p.values().iter().enumerate() {
                st.assign(i, v);
            }
            propagate(&m, &mut st).unwrap();
            for a in 0..6 {
                for b in a + 1..6 {
                    assert_eq!(st.lit(a, b), Some(p.at(a + 1) < p.at(b + 1)));
                }
            }
        }
    }

    #[test]
    fn heuristics_and_preprocessing_preserve_counts() {
        let sp = spec("0,n");
        for (label, n, spec) in [
            ("square-free", 7usize, None),
            ("bicrucial", 9, Some(&sp)),
        ] {
            let m = build_model(n, spec, SymmetryMode::None);
            let base = solve_count(&m, Heuristic::Static, Preprocess::None).solutions;
            for h in [Heuristic::Static, Heuristic::Wdeg] {
                for p in [
                    Preprocess::None,
                    Preprocess::Singleton,
                    Preprocess::SingletonDoubled,
                ] {
                    assert_eq!(
                        solve_count(&m, h, p).solutions,
                        base,
                        "{label} {h:?} {p:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn all_lengths_validation_flag_is_equivalent() {
        for text in ["0", "n", "0,n"] {
            let sp = spec(text);
            for n in 5..=9 {
                let restricted = build_model(n, Some(&sp), SymmetryMode::None);
                let full = build_model_with(n, Some(&sp), SymmetryMode::None, true);
                assert_eq!(
                    solve_count(&restricted, Heuristic::Static, Preprocess::None).solutions,
                    solve_count(&full, Heuristic::Static, Preprocess::None).solutions,
                    "spec {text} n={n}"
                );
            }
        }
    }

    #[test]
    fn count_convenience_modes() {
        assert_eq!(
            count(5, None, SymmetryMode::UpToSymmetry, Heuristic::Static, Preprocess::None)
                .unwrap()
                .solutions,
            10
        );
        let bi = spec("0,n");
        assert_eq!(
            count(
                9,
                Some(&bi),
                SymmetryMode::RcInvariantOnly,
                Heuristic::Static,
                Preprocess::None
            )
            .unwrap()
            .solutions,
            5
        );
        assert!(count(
            7,
            Some(&spec("n")),
            SymmetryMode::RcInvariantOnly,
            Heuristic::Static,
            Preprocess::None
        )
        .is_err());
    }
}
