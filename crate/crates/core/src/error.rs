use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("conditioning on null atom (node {node})")]
    NullAtom { node: usize },

    #[error("measure must be strictly positive (leaf node {node} has zero mass)")]
    NotStrictlyPositive { node: usize },

    #[error("NA1 fails on atom {node}: one-period problem is unbounded")]
    Na1Fails { node: usize, ray: Vec<crate::Rational> },

    #[error("deflator must satisfy E[Z_0] = 1, found {found}")]
    NotNormalized { found: String },

    #[error("not a supermartingale: compensator increment at node {node} is {increment}")]
    NotSupermartingale { node: usize, increment: String },

    #[error("not strictly positive: process value at node {node} is {value}")]
    NonPositiveDensity { node: usize, value: String },

    #[error("tail function: {0}")]
    Tail(String),

    #[error("cannot certify Cesàro bound: {0}")]
    CesaroBound(String),

    #[error("example requires completeness: {0}")]
    Incomplete(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("admissibility violated: {0}")]
    Admissibility(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
