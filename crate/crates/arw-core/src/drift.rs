//! Jump-distribution geometry and the forward-confinement estimator.
//!
//! For a biased jump distribution the drift vector `m` splits the lattice
//! into a forward half-space `H = { x : <x, m> > 0 }` (sites on the
//! orthogonal hyperplane through the origin are excluded) and its complement.
//! The quantity estimated here is the probability that a "sleeping walk" —
//! a random walk `X(t)` decorated with i.i.d. sleep marks `Y(t)` of rate
//! `lambda / (1 + lambda)` — places all of its marks inside `H`. That
//! probability feeds the upper bounds on the critical density: `1 - F` in
//! one dimension and `nu0 / F` in general dimension.

use crate::lattice::Site;
use crate::parallel::run_trials;
use crate::rng::{derive_seed, hash64, Rng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DriftError {
    #[error("invalid jump distribution: {0}")]
    InvalidDistribution(String),
    #[error("jump distribution has zero drift; a nonzero drift vector is required")]
    ZeroDrift,
    #[error("operation requires a one-dimensional jump distribution, got dimension {0}")]
    DimensionMismatch(u8),
    #[error("invalid parameter {name}: {msg}")]
    InvalidParameter { name: &'static str, msg: String },
    #[error("lower confinement estimate is zero; the upper bound nu0/F is unbounded")]
    UnboundedBound,
}

/// A finitely supported jump distribution on `Z^d`, `d` in `{1, 2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpDistribution {
    dimension: u8,
    support: Vec<(Site, f64)>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl JumpDistribution {
    /// Builds and validates a jump distribution. Probabilities must be
    /// positive and sum to 1 within `1e-12`; offsets must be distinct, and
    /// one-dimensional distributions must keep `y = 0`.
    pub fn new(dimension: u8, support: Vec<(Site, f64)>) -> Result<Self, DriftError> {
        if dimension != 1 && dimension != 2 {
            return Err(DriftError::InvalidDistribution(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        if support.is_empty() {
            return Err(DriftError::InvalidDistribution("empty support".into()));
        }
        let mut total = 0.0;
        for &(z, p) in &support {
            if !(p > 0.0) || !p.is_finite() {
                return Err(DriftError::InvalidDistribution(format!(
                    "offset {z} has non-positive probability {p}"
                )));
            }
            if dimension == 1 && z.y != 0 {
                return Err(DriftError::InvalidDistribution(format!(
                    "offset {z} is not one-dimensional"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(DriftError::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut seen = support.iter().map(|&(z, _)| z).collect::<Vec<_>>();
        seen.sort();
        seen.dedup();
        if seen.len() != support.len() {
            return Err(DriftError::InvalidDistribution("duplicate offsets".into()));
        }
        let mut cumulative = Vec::with_capacity(support.len());
        let mut acc = 0.0;
        for &(_, p) in &support {
            acc += p;
            cumulative.push(acc);
        }
        Ok(JumpDistribution {
            dimension,
            support,
            cumulative,
        })
    }

    /// Nearest-neighbour walk on `Z` with right-jump probability `q`.
    pub fn bias_1d(q: f64) -> Result<Self, DriftError> {
        if !(0.0..=1.0).contains(&q) {
            return Err(DriftError::InvalidParameter {
                name: "q",
                msg: format!("must lie in [0,1], got {q}"),
            });
        }
        let mut support = Vec::new();
        if q > 0.0 {
            support.push((Site::line(1), q));
        }
        if q < 1.0 {
            support.push((Site::line(-1), 1.0 - q));
        }
        JumpDistribution::new(1, support)
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn support(&self) -> &[(Site, f64)] {
        &self.support
    }

    /// Probability of jumping to the right neighbour, for nearest-neighbour
    /// one-dimensional distributions.
    pub fn right_probability(&self) -> Option<f64> {
        if self.dimension != 1 {
            return None;
        }
        let mut q = 0.0;
        for &(z, p) in &self.support {
            match z.x {
                1 => q = p,
                -1 => {}
                _ => return None,
            }
        }
        Some(q)
    }

    pub fn max_offset_norm(&self) -> i64 {
        self.support
            .iter()
            .map(|(z, _)| z.x.abs().max(z.y.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Samples one jump.
    #[inline]
    pub fn sample(&self, rng: &mut Rng) -> Site {
        let u = rng.next_f64();
        // Linear scan; supports here have a handful of offsets.
        for (i, &c) in self.cumulative.iter().enumerate() {
            if u < c {
                return self.support[i].0;
            }
        }
        self.support[self.support.len() - 1].0
    }

    /// Rebuilds the cumulative table after deserialization.
    pub fn normalized(self) -> Result<Self, DriftError> {
        JumpDistribution::new(self.dimension, self.support)
    }
}

/// Drift vector `sum_z p(z) z`. Errors when the drift vanishes, since every
/// consumer here requires a direction.
pub fn drift_vector(p: &JumpDistribution) -> Result<[f64; 2], DriftError> {
    let mut m = [0.0, 0.0];
    for &(z, prob) in p.support() {
        m[0] += prob * z.x as f64;
        m[1] += prob * z.y as f64;
    }
    if m[0] * m[0] + m[1] * m[1] < 1e-24 {
        return Err(DriftError::ZeroDrift);
    }
    Ok(m)
}

/// Drift direction plus the strict forward half-space predicate.
#[derive(Clone, Debug)]
pub struct DriftGeometry {
    drift: [f64; 2],
}

impl DriftGeometry {
    pub fn new(p: &JumpDistribution) -> Result<Self, DriftError> {
        Ok(DriftGeometry {
            drift: drift_vector(p)?,
        })
    }

    pub fn drift(&self) -> [f64; 2] {
        self.drift
    }

    pub fn drift_norm2(&self) -> f64 {
        self.drift[0] * self.drift[0] + self.drift[1] * self.drift[1]
    }

    /// Strict membership: sites on the hyperplane through the origin are out.
    #[inline(always)]
    pub fn in_forward_halfspace(&self, x: Site) -> bool {
        x.dot(self.drift) > 0.0
    }
}

/// Finite-horizon bracket for the forward-confinement probability.
///
/// `upper` counts trials with no sleep mark outside the half-space up to the
/// horizon; `lower` additionally requires the walk to end with displacement
/// at least `|m|^2 * horizon / 2` along the drift, which makes a violation
/// after the horizon exponentially unlikely. The true probability sits
/// between the two up to stochastic error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfinementEstimate {
    pub lower: f64,
    pub upper: f64,
    pub trials: u64,
    pub horizon: u64,
    pub se_lower: f64,
    pub se_upper: f64,
}

/// Estimates the forward-confinement probability by Monte Carlo.
///
/// Per trial the walk stream and the sleep-mark stream are independent and
/// the mark stream is consumed by comparing shared uniforms against
/// `lambda/(1+lambda)`, so on a fixed seed the violation indicator is
/// pointwise monotone in `lambda`.
pub fn estimate_confinement(
    lambda: f64,
    p: &JumpDistribution,
    horizon: u64,
    trials: u64,
    seed: u64,
) -> Result<ConfinementEstimate, DriftError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(DriftError::InvalidParameter {
            name: "lambda",
            msg: format!("must be positive and finite, got {lambda}"),
        });
    }
    if horizon == 0 {
        return Err(DriftError::InvalidParameter {
            name: "horizon",
            msg: "must be >= 1".into(),
        });
    }
    if trials == 0 {
        return Err(DriftError::InvalidParameter {
            name: "trials",
            msg: "must be >= 1".into(),
        });
    }
    let geom = DriftGeometry::new(p)?;
    let sleep_p = lambda / (1.0 + lambda);
    let margin = 0.5 * geom.drift_norm2() * horizon as f64;

    let outcomes = run_trials(trials, |trial| {
        let base = derive_seed(seed, trial);
        let mut walk_rng = Rng::new(hash64(base, 1));
        let mut mark_rng = Rng::new(hash64(base, 2));
        let mut pos = Site::ORIGIN;
        let mut violated = false;
        for t in 0..=horizon {
            let marked = mark_rng.bernoulli(sleep_p);
            if marked && !geom.in_forward_halfspace(pos) {
                violated = true;
                break;
            }
            if t < horizon {
                pos = pos.offset(p.sample(&mut walk_rng));
            }
        }
        if violated {
            (false, false)
        } else {
            (true, pos.dot(geom.drift) >= margin)
        }
    });

    let ok_upper = outcomes.iter().filter(|o| o.0).count() as u64;
    let ok_lower = outcomes.iter().filter(|o| o.1).count() as u64;
    let n = trials as f64;
    let upper = ok_upper as f64 / n;
    let lower = ok_lower as f64 / n;
    Ok(ConfinementEstimate {
        lower,
        upper,
        trials,
        horizon,
        se_lower: (lower * (1.0 - lower) / n).sqrt(),
        se_upper: (upper * (1.0 - upper) / n).sqrt(),
    })
}

/// One-dimensional upper-bound interval `[1 - F_upper, 1 - F_lower]` for the
/// critical density.
pub fn upper_bound_1d(
    p: &JumpDistribution,
    f: &ConfinementEstimate,
) -> Result<[f64; 2], DriftError> {
    if p.dimension() != 1 {
        return Err(DriftError::DimensionMismatch(p.dimension()));
    }
    drift_vector(p)?;
    Ok([1.0 - f.upper, 1.0 - f.lower])
}

/// General-dimension upper-bound interval `[nu0/F_upper, nu0/F_lower]`.
pub fn upper_bound_d(nu0: f64, f: &ConfinementEstimate) -> Result<[f64; 2], DriftError> {
    if !(0.0..=1.0).contains(&nu0) {
        return Err(DriftError::InvalidParameter {
            name: "nu0",
            msg: format!("must lie in [0,1], got {nu0}"),
        });
    }
    if f.lower <= 0.0 {
        return Err(DriftError::UnboundedBound);
    }
    Ok([nu0 / f.upper, nu0 / f.lower])
}
