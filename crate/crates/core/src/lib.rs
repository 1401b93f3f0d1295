//! Exact intersection sizes of linear subspaces with the vertices of the
//! hypercube `{0,1}^n`.
//!
//! A `k`-dimensional subspace of `R^n` is parameterised by a linear map
//! `L: R^k -> R^m` (with `m = n - k`); its intersection with the cube has
//! the same size as `{x in {0,1}^k : L(x) in {0,1}^m}`. Everything in this
//! crate works in that formulation with exact rational arithmetic.
//!
//! Module map:
//!
//! - [`cube`]: linear maps, intersection patterns and the brute-force oracle.
//! - [`codim1`]: closed-form counts for single-row maps.
//! - [`shape`]: support hypergraphs, canonical forms and maximum sizes over
//!   sign assignments.
//! - [`search`]: breadth-first search over shapes with pruning.
//! - [`closure`]: exhaustive closure of intersection patterns under adding rows.
//! - [`theorems`]: constructions and end-to-end verification reports.
//! - [`report`]: deterministic TSV/JSON documents.

pub mod binomial;
pub mod closure;
pub mod codim1;
pub mod cube;
mod error;
pub mod exec;
pub mod rational;
pub mod report;
pub mod search;
pub mod shape;
pub mod sizes;
pub mod theorems;

pub use error::{Error, Result};
pub use exec::Exec;
pub use rational::Rational;
