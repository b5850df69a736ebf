use std::fmt;

use thiserror::Error;

/// Which residual a [`Error::NotResiduated`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `x\z`, the greatest `y` with `x·y ≤ z`.
    Left,
    /// `z/y`, the greatest `x` with `x·y ≤ z`.
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => f.write_str("left residual \\"),
            Side::Right => f.write_str("right residual /"),
        }
    }
}

/// The partial-order axiom a raw relation fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderAxiom {
    Reflexivity,
    Antisymmetry,
    Transitivity,
    /// The relation does not restrict to a component order.
    Extension,
}

impl fmt::Display for OrderAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OrderAxiom::Reflexivity => "reflexivity",
            OrderAxiom::Antisymmetry => "antisymmetry",
            OrderAxiom::Transitivity => "transitivity",
            OrderAxiom::Extension => "extension of component orders",
        };
        f.write_str(s)
    }
}

fn join_witness(w: &[String]) -> String {
    format!("({})", w.join(", "))
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("order relation has a cycle: {first} ≤ {second} and {second} ≤ {first}")]
    CycleError { first: String, second: String },

    #[error("unknown element label `{0}`")]
    UnknownLabel(String),

    #[error("{side} of ({x}, {z}) does not exist: candidate set has no greatest element")]
    NotResiduated { x: String, z: String, side: Side },

    #[error("not a monoid: {law} fails at {}", join_witness(.witness))]
    NotMonoid { law: String, witness: Vec<String> },

    #[error("multiplication is not monotone at {}", join_witness(.witness))]
    NotMonotone { witness: Vec<String> },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("precondition {condition} fails{}", .witness.as_ref().map(|w| format!(" at {}", join_witness(w))).unwrap_or_default())]
    PreconditionFailed {
        condition: String,
        witness: Option<Vec<String>>,
    },

    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),

    #[error("sum relation is not an order: {axiom} fails at {} ({failed_condition} fails)", join_witness(.witness))]
    NotAnOrder {
        axiom: OrderAxiom,
        witness: Vec<String>,
        failed_condition: String,
    },

    #[error("size {requested} exceeds bound {max}")]
    SizeBound { requested: usize, max: usize },

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(condition: impl Into<String>, witness: Option<Vec<String>>) -> Self {
        Error::PreconditionFailed {
            condition: condition.into(),
            witness,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
