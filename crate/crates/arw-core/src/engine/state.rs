//! Per-site occupancy arithmetic.
//!
//! A site holds nothing, one sleeping particle, or `k >= 1` active particles.
//! The total order `Empty < Sleeping < Active(1) < Active(2) < ...` is the
//! pointwise order used by the monotonicity contracts.

use super::EngineError;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SiteState {
    Empty,
    Sleeping,
    Active(u32),
}

impl SiteState {
    /// Particle count regardless of state.
    #[inline]
    pub fn particles(self) -> u64 {
        match self {
            SiteState::Empty => 0,
            SiteState::Sleeping => 1,
            SiteState::Active(k) => k as u64,
        }
    }

    /// A site is unstable exactly when it hosts an active particle.
    #[inline]
    pub fn is_unstable(self) -> bool {
        matches!(self, SiteState::Active(_))
    }

    /// Effect of a particle arriving: a sleeping particle wakes up.
    #[inline]
    pub fn add_particle(self) -> SiteState {
        match self {
            SiteState::Empty => SiteState::Active(1),
            SiteState::Sleeping => SiteState::Active(2),
            SiteState::Active(k) => SiteState::Active(k + 1),
        }
    }

    /// Effect of a sleep instruction on an unstable site: a lone active
    /// particle falls asleep, company keeps everyone awake. Calling this on
    /// a stable site is a caller bug.
    #[inline]
    pub fn sleep_transform(self) -> Result<SiteState, EngineError> {
        match self {
            SiteState::Active(1) => Ok(SiteState::Sleeping),
            SiteState::Active(k) => Ok(SiteState::Active(k)),
            other => Err(EngineError::IllegalSleepTransform { state: other }),
        }
    }

    /// Dense-cell encoding: `-1` sleeping, `0` empty, `k >= 1` active.
    #[inline]
    pub fn to_cell(self) -> i64 {
        match self {
            SiteState::Empty => 0,
            SiteState::Sleeping => -1,
            SiteState::Active(k) => k as i64,
        }
    }

    #[inline]
    pub fn from_cell(cell: i64) -> SiteState {
        match cell {
            0 => SiteState::Empty,
            -1 => SiteState::Sleeping,
            k if k >= 1 => SiteState::Active(k as u32),
            other => panic!("invalid cell encoding {other}"),
        }
    }

    /// Rank in the total order `0 < sleeping < 1 < 2 < ...`.
    #[inline]
    fn rank(self) -> (u64, u8) {
        match self {
            SiteState::Empty => (0, 0),
            SiteState::Sleeping => (1, 0),
            SiteState::Active(k) => (k as u64, 1),
        }
    }
}

impl PartialOrd for SiteState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SiteState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl Default for SiteState {
    fn default() -> Self {
        SiteState::Empty
    }
}
