//! Deterministic discrete-event simulation of one personal basic service
//! set: the beacon-interval layout, scheduled and contention access, beam
//! training, mobility, band transfer, and power save, all driven by a
//! single ordered event queue. Equal scenarios and seeds reproduce
//! byte-identical output files.

pub mod engine;
pub mod event;
pub mod metrics;
pub mod scenario;

use thiserror::Error;

/// Simulation-level failures. Scenario problems surface as one batch
/// before any event runs; a runtime error means a broken engine invariant,
/// never a mid-run validation throw.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("parse: {0}")]
    Parse(String),
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("runtime: {0}")]
    Runtime(String),
}
