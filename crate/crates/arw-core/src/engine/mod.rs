//! The discrete graphical representation of activated random walks.
//!
//! Particles topple by consuming per-site instruction tapes. Toppling an
//! unstable site is *legal*; stabilizing a finite region means toppling
//! legally until the region holds no active particle. The outcome — both the
//! odometer (instructions used per site) and the final configuration — does
//! not depend on the order of legal topplings, which the test suite checks
//! by stabilizing under unrelated policies and comparing bit by bit.

mod config;
mod stabilize;
mod state;
mod tape;

pub use config::{Configuration, Odometer};
pub use stabilize::{
    box_region, interval_region, stabilize, topple, StabilizeOutcome, TopplePolicy,
    DEFAULT_TOPPLE_BUDGET,
};
pub use state::SiteState;
pub use tape::{
    testing, EnforcedActivation, Instruction, InstructionSource, InstructionTape, TapeStore,
};

use crate::lattice::Site;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    /// Toppling was requested at a stable site.
    #[error("illegal topple at {site}: site holds no active particle")]
    IllegalTopple { site: Site },
    /// Sleep arithmetic applied to a stable site; a caller bug.
    #[error("sleep transform applied to stable state {state:?}")]
    IllegalSleepTransform { state: SiteState },
    /// Stabilization ran out of its topple budget. Diagnostic; retry with a
    /// larger budget.
    #[error("stabilization exceeded the topple budget of {budget}")]
    BudgetExceeded { budget: u64 },
    #[error("sleeping rate must be finite and >= 0, got {0}")]
    InvalidLambda(f64),
}
