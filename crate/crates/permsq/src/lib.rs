//! Enumeration, counting, and certification of square-free and P-crucial
//! permutations.
//!
//! A permutation contains a *square* when two adjacent factors of equal
//! length at least two share the same order type; it is *square-free*
//! otherwise. A square-free permutation is *P-crucial* when inserting any
//! rank at any position named by P creates a square. This crate provides:
//!
//! - [`perm`]: permutations, symmetries, pattern reduction, extensions,
//!   and text I/O;
//! - [`squares`]: full and incremental square detection plus the zigzag
//!   phase characterisation;
//! - [`cruciality`]: P-crucial predicates and machine-checkable
//!   certificates;
//! - [`dfs`]: the direct backtracking enumeration engine;
//! - [`csp`]: a miniature reified order-encoding constraint engine;
//! - [`layered`]: the level-by-level parent/child constructor with on-disk
//!   persistence;
//! - [`golden`]: published reference counts with provenance;
//! - [`naive`]: brute-force reference routines used as ground truth in
//!   tests.
//!
//! The `permsq` binary drives enumeration runs, table emission,
//! certificate production and verification, and cross-engine validation.
//! The `book/` directory holds a guide whose code snippets compile as part
//! of this crate's doc-tests.

pub mod cruciality;
pub mod csp;
pub mod dfs;
pub mod golden;
pub mod layered;
pub mod naive;
pub mod perm;
pub mod squares;

pub use cruciality::{Anchor, Certificate, PositionSpec};
pub use perm::{parse_permutation, pattern_of, Permutation, SymmetryGroup};
pub use squares::{find_square, is_square_free, zigzag_phases, SquareWitness};

#[doc = include_str!("../../../book/src/permutations-and-squares.md")]
mod _book_permutations_and_squares {}

#[doc = include_str!("../../../book/src/crucial-permutations.md")]
mod _book_crucial_permutations {}

#[doc = include_str!("../../../book/src/backtracking-search.md")]
mod _book_backtracking_search {}

#[doc = include_str!("../../../book/src/constraint-encoding.md")]
mod _book_constraint_encoding {}

#[doc = include_str!("../../../book/src/layered-construction.md")]
mod _book_layered_construction {}
