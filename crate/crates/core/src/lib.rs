//! Lexicographic subjective expected utility on finite state spaces.
//!
//! A [`GsleuModel`] is a chain of levels, each carrying a probability on its
//! support and a utility over outcomes. From a model the crate evaluates
//! indexed and unconditional preferences, the event-class hierarchy, lottery
//! comparisons and perturbation-based conditioning. In the other direction it
//! checks the axioms on explicit preference tables and synthesizes a model
//! from a table through exact rational linear feasibility.

pub mod act;
pub mod axioms;
pub mod conditioning;
pub mod engine;
pub mod error;
pub mod event;
pub mod family;
pub mod feasibility;
pub mod fixtures;
pub mod io;
pub mod lottery;
pub mod model;
pub mod rational;
pub mod sampling;
pub mod synthesis;

pub use act::{compose, constant_act, enumerate_acts, Act, OutcomeSpace, DEFAULT_ACT_CAP};
pub use error::{Error, Result};
pub use event::{enumerate_partitions, powerset, set_op, Event, Partition, SetOp, StateSpace};
pub use model::{
    class_of, conditional_measure, top_event_chain, validate_model, EventClass, GsleuModel, Level,
    TopEventChain, ValidationReport, Violation,
};
pub use rational::Q;
