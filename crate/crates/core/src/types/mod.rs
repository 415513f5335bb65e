//! Signatures, subset combinatorics, quantifier-free types and finite
//! structures.

mod qftype;
mod signature;
mod structure;
pub mod subsets;

pub use qftype::{enumerate_qf_types, sym_act_type, QfType, TypeSpace, MAX_TYPE_BITS};
pub use signature::{ArityProfile, Signature, Symbol};
pub use structure::{FiniteStructure, RedundantStructure, StructureBody};
pub use subsets::{shortlex, tau, SubsetIndex};

pub(crate) use structure::{index_tuple, signature_from_json, signature_to_json, tuple_index};
