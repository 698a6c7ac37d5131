//! Phased object-registration planning for brick assemblies.
//!
//! The crate turns a brick model into an [`plan::InstructionPlan`]: a build
//! order, a ground-plane bootstrap segment, and a small number of phases each
//! served by one recognizable intermediate shape (a "model target"). The
//! [`runtime`] module executes such a plan as a step-counting state machine,
//! and [`tracking`] provides a threshold-based stand-in recognizer plus the
//! pixel alignment metric used to evaluate registration.

pub mod config;
pub mod fixture;
pub mod metrics;
pub mod model;
pub mod plan;
pub mod runtime;
pub mod sequencer;
pub mod stability;
pub mod tracking;
