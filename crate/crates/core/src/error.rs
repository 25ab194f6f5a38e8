use thiserror::Error;

use crate::feasibility::ConstraintSystem;
use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live on different state or outcome spaces")]
    SpaceMismatch,

    #[error("event must be nonempty")]
    EmptyEvent,

    #[error("unknown state {0:?}")]
    UnknownState(String),

    #[error("unknown outcome {0:?}")]
    UnknownOutcome(String),

    #[error("{what}: {required} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        required: u128,
        cap: u128,
    },

    #[error("event has class {actual}, not level {expected}")]
    ClassMismatch { expected: usize, actual: String },

    #[error("event {inner} is not a subset of {outer}")]
    NotSubset { inner: String, outer: String },

    #[error("lottery weights sum to {0}, not 1")]
    NotNormalized(String),

    #[error("no grouping of the atoms of {event} realizes the lottery")]
    AtomGranularity { event: String },

    #[error("malformed constraint system: {0}")]
    MalformedSystem(String),

    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Violation>),

    #[error("invalid preference table: {0}")]
    InvalidTable(String),

    #[error("incomplete preference table: {0}")]
    IncompleteTable(String),

    #[error("axiom precheck failed: {0}")]
    AxiomPrecheckFailed(String),

    #[error("no additive representation exists: {reason}")]
    Unrepresentable {
        reason: String,
        certificate: Box<ConstraintSystem>,
    },

    #[error("synthesized model disagrees with the table at event {event:?} on acts {f} and {g}")]
    VerificationFailed { event: String, f: String, g: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
