//! Blind-spot analysis of personal ontologies: structural diffs against an
//! ideal, severity, a four-way taxonomy, failure-pattern detectors,
//! resilience, a case database, and a sample-efficiency simulation.
//!
//! The crate is `no_std` (with `alloc`); file and process IO live in the
//! `blindspot` crate.

#![no_std]
// Range checks are written `!(x > lo)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cases;
pub mod config;
pub mod diff;
pub mod error;
pub mod ontology;
pub mod patterns;
pub mod pipeline;
pub mod resilience;
mod serde_util;
pub mod sim;
pub mod taxonomy;

pub use error::{Error, Result};
pub use ontology::{
    CausalEdge, ConceptNode, DimensionGraph, DimensionId, EdgeRef, NodeRef, Ontology,
};

/// Version of the JSON document formats read and written by this crate.
pub const SCHEMA_VERSION: &str = "1";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
