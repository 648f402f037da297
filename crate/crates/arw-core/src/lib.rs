//! Simulation and computation laboratory for the activated random walk (ARW)
//! model on the integer lattice.
//!
//! The crate has four layers:
//!
//! * [`engine`] — the discrete graphical representation of ARW: per-site
//!   instruction tapes, the toppling operator, and region stabilization.
//!   Stabilization is order-independent, and its structural contracts
//!   (abelianness, least action, monotonicity, enforced activation) are
//!   executable and covered by the test suite.
//! * [`bounds`] — closed-form machinery for the analytic lower bound on the
//!   critical density of the 1-D biased model, together with an independent
//!   dynamic-programming oracle for the first-passage generating function.
//! * [`drift`] — jump-distribution geometry (drift vector, forward half-space)
//!   and the Monte Carlo estimator of the forward-confinement probability
//!   that powers the upper bounds on the critical density.
//! * [`experiments`] — seed-reproducible Monte Carlo experiments: fixation and
//!   activity probes, phase sweeps, the 1-D barrier stabilization algorithm,
//!   the barrier-increment sampler, and the 2-D trapezoid/ghost construction.
//!
//! Everything is deterministic given a `u64` seed: instruction tapes are pure
//! functions of `(seed, site, index)` and per-trial seeds are derived by
//! hashing `(seed, trial)`, so results do not depend on thread count.

pub mod bounds;
pub mod drift;
pub mod engine;
pub mod experiments;
pub mod lattice;
mod parallel;
pub mod rng;

pub use engine::{
    stabilize, topple, Configuration, EngineError, Instruction, InstructionSource, Odometer,
    SiteState, StabilizeOutcome, TapeStore, TopplePolicy, DEFAULT_TOPPLE_BUDGET,
};
pub use lattice::Site;
