//! Invariant random relational structures from step hypergraphons.
//!
//! The crate samples `G(n, W)` for piecewise-constant extended hypergraphons
//! `W`, computes the entropy function `h(n) = h(μ_n)` exactly or by Monte
//! Carlo, and builds the standard extremal examples: the Erdős–Rényi and
//! triangle hypergraphons, blow-ups of the Rado hypergraph, the uniform
//! non-redundant measure, and the quantifier-free interdefinitions that
//! remove function symbols or repeated-entry tuples.

pub mod blowup;
pub mod entropy;
mod error;
pub mod hypergraphon;
pub mod interdef;
pub mod prf;
pub mod rado;
pub mod sampler;
pub mod types;

pub use error::{Error, Result};
