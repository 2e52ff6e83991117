//! Online learning of Event Calculus event definitions from annotated
//! interpretation streams.
//!
//! The learner runs two independent processes over the same stream: one
//! builds `initiatedAt` clauses, the other `terminatedAt` clauses. Each
//! grows clauses top-down from bottom clauses obtained by abduction and
//! picks specializations with a Hoeffding test, reading every
//! interpretation exactly once.

pub mod error;
pub mod logic;
pub mod ec;
pub mod abduce;
pub mod learner;
pub mod dispatch;
pub mod log;
pub mod io;
pub mod eval;

pub use error::{Error, ParseError, Result};
