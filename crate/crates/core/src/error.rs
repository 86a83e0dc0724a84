use alloc::string::String;

use thiserror::Error;

use crate::ontology::{DimensionId, ValidationReport};

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ontology failed validation with {} violation(s)", .0.violations.len())]
    Validation(ValidationReport),

    #[error("graph has no positive weight and cannot be normalized")]
    DegenerateGraph,

    #[error("dimension `{0}` is missing or has no nodes")]
    AbsentDimension(DimensionId),

    #[error("ideal ontology element {element} lacks `{field}`")]
    IncompleteIdeal {
        element: String,
        field: &'static str,
    },

    #[error("node {node} lacks `{field}`")]
    IncompleteNode { node: String, field: &'static str },

    #[error("ideal dimension `{0}` has no nodes")]
    DegenerateIdeal(DimensionId),

    #[error("ideal ontology has zero maximum severity")]
    ZeroSeverityBound,

    #[error("malformed path: {0}")]
    MalformedPath(String),

    #[error("shock domain is empty")]
    DegenerateShock,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("case database is empty")]
    EmptyDatabase,

    #[error("invalid case `{id}`: {reason}")]
    InvalidCase { id: String, reason: String },

    #[error("feature schema error: {0}")]
    Schema(String),

    #[error(
        "insufficient data: {stage_matches} case(s) share the stage label, {similar_matches} pass the similarity cut"
    )]
    InsufficientData {
        stage_matches: usize,
        similar_matches: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}
