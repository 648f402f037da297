//! Seed-reproducible Monte Carlo experiments.
//!
//! Everything here consumes a `u64` seed and derives per-trial streams by
//! hashing `(seed, trial)`, so results are bit-identical across repeat runs
//! and independent of how trials are scheduled across threads.

mod barrier;
mod increments;
mod init;
mod probes;
pub mod stats;
mod trapezoid;

pub use barrier::{
    run_barrier_algorithm, run_barrier_algorithm_recorded, Barrier, BarrierOutcome,
    ExplorationRecord, DEFAULT_EXPLORATION_BUDGET,
};
pub use increments::{
    sample_barrier_increments, sample_barrier_increments_direct, IncrementHistogram,
};
pub use init::{sample_initial, InitialLaw};
pub use probes::{
    activity_probe, fixation_probe, phase_sweep, PhaseRow, PhaseTable, ProbeEstimate,
    DEFAULT_ACTIVITY_FRACTION,
};
pub use trapezoid::{
    choose_ball_radius, trapezoid_stabilize, TrapezoidGeometry, TrapezoidPlan, TrapezoidRun,
};

use crate::bounds::BoundsError;
use crate::drift::DriftError;
use crate::engine::EngineError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Drift(#[from] DriftError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("invalid parameter {name}: {msg}")]
    InvalidParameter { name: &'static str, msg: String },
    #[error("invalid trapezoid geometry: {0}")]
    InvalidGeometry(String),
    #[error("exploration exceeded its step budget of {0}")]
    ExplorationBudget(u64),
}

pub(crate) fn invalid(name: &'static str, msg: impl Into<String>) -> ExperimentError {
    ExperimentError::InvalidParameter {
        name,
        msg: msg.into(),
    }
}
