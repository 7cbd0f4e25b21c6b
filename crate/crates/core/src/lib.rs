//! Supervisory control of fuzzy discrete-event systems with fuzzy
//! observability and controllability.
//!
//! The crate decides whether a specification satisfies the fuzzy
//! controllability, fuzzy observability and marked-closedness conditions
//! with respect to a plant, synthesizes the corresponding supervisor and
//! evaluates the closed loop. Every decision procedure has a brute-force
//! counterpart in [`oracle`] that works on explicit strings only.

pub mod algebra;
pub mod corpus;
pub mod format;
pub mod model;
pub mod oracle;
pub mod reach;
pub mod report;
pub mod supervisor;
pub mod verify;

pub use algebra::{Degree, EventMatrix, StateVector};
pub use model::{Attributes, ControlProblem, EventAttr, EventId, EventString, FuzzyAutomaton, ObsFactor};
