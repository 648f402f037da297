//! Fixation and activity probes, and the phase sweep built on them.
//!
//! A probe samples an initial configuration on `[-L, L]` (or `[-L, L]^2`),
//! stabilizes it, and looks at the odometer at the origin: fixation means no
//! instruction was used there, activity means the count grew linearly in
//! `L`. Their disagreement across a grid of densities locates the phase
//! transition.

use super::stats::wilson_interval;
use super::{invalid, sample_initial, ExperimentError, InitialLaw};
use crate::drift::JumpDistribution;
use crate::engine::{box_region, interval_region, stabilize, EngineError, TapeStore, TopplePolicy};
use crate::lattice::Site;
use crate::parallel::run_trials;
use crate::rng::{derive_seed, hash64};
use serde::{Deserialize, Serialize};

/// Default linear-growth fraction for the activity probe: the origin's
/// odometer must reach `c * L`.
pub const DEFAULT_ACTIVITY_FRACTION: f64 = 0.05;

/// A probability estimate with its 95% Wilson interval. Trials that blew the
/// topple budget are excluded from the estimate and reported, never dropped
/// silently.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials_ok: u64,
    pub budget_failures: u64,
}

impl ProbeEstimate {
    fn from_counts(successes: u64, ok: u64, failures: u64) -> Self {
        let estimate = if ok > 0 {
            successes as f64 / ok as f64
        } else {
            0.0
        };
        let (ci_low, ci_high) = wilson_interval(successes, ok, 1.96);
        ProbeEstimate {
            estimate,
            ci_low,
            ci_high,
            trials_ok: ok,
            budget_failures: failures,
        }
    }
}

struct TrialIndicators {
    fixated: bool,
    active: bool,
    budget_failure: bool,
}

/// One stabilization evaluating both probe indicators, so a sweep pays for
/// each trial once.
fn probe_trial(
    law: &InitialLaw,
    lambda: f64,
    p: &JumpDistribution,
    l: i64,
    activity_threshold: u64,
    seed: u64,
    budget: u64,
) -> Result<TrialIndicators, EngineError> {
    let region = if p.dimension() == 1 {
        interval_region(-l, l)
    } else {
        box_region(-l, l)
    };
    let config = sample_initial(law, &region, hash64(seed, 0x11));
    let tapes = TapeStore::new(hash64(seed, 0x22), lambda, p)?;
    match stabilize(&config, &region, &tapes, TopplePolicy::Fifo, budget) {
        Ok(out) => {
            let at_origin = out.odometer.get(Site::ORIGIN);
            Ok(TrialIndicators {
                fixated: at_origin == 0,
                active: at_origin >= activity_threshold,
                budget_failure: false,
            })
        }
        Err(EngineError::BudgetExceeded { .. }) => Ok(TrialIndicators {
            fixated: false,
            active: false,
            budget_failure: true,
        }),
        Err(e) => Err(e),
    }
}

fn run_probe(
    law: &InitialLaw,
    lambda: f64,
    p: &JumpDistribution,
    l: i64,
    activity_threshold: u64,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<(ProbeEstimate, ProbeEstimate), ExperimentError> {
    if l < 1 {
        return Err(invalid("L", format!("must be >= 1, got {l}")));
    }
    if trials < 1 {
        return Err(invalid("trials", "must be >= 1"));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(invalid(
            "lambda",
            format!("must be >= 0 and finite, got {lambda}"),
        ));
    }
    let outcomes = run_trials(trials, |t| {
        probe_trial(
            law,
            lambda,
            p,
            l,
            activity_threshold,
            derive_seed(seed, t),
            budget,
        )
    });
    let mut fix = 0u64;
    let mut act = 0u64;
    let mut ok = 0u64;
    let mut failures = 0u64;
    for o in outcomes {
        let o = o?;
        if o.budget_failure {
            failures += 1;
        } else {
            ok += 1;
            fix += u64::from(o.fixated);
            act += u64::from(o.active);
        }
    }
    Ok((
        ProbeEstimate::from_counts(fix, ok, failures),
        ProbeEstimate::from_counts(act, ok, failures),
    ))
}

/// Estimates the probability that stabilizing `[-L, L]` (or the square box
/// in 2-D) uses no instruction at the origin.
pub fn fixation_probe(
    law: &InitialLaw,
    lambda: f64,
    p: &JumpDistribution,
    l: i64,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<ProbeEstimate, ExperimentError> {
    run_probe(law, lambda, p, l, u64::MAX, trials, seed, budget).map(|r| r.0)
}

/// Estimates the probability that the origin's odometer reaches `c * L`.
pub fn activity_probe(
    law: &InitialLaw,
    lambda: f64,
    p: &JumpDistribution,
    l: i64,
    c: f64,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<ProbeEstimate, ExperimentError> {
    if !(c > 0.0) {
        return Err(invalid("c", format!("must be positive, got {c}")));
    }
    let threshold = (c * l as f64).ceil().max(1.0) as u64;
    run_probe(law, lambda, p, l, threshold, trials, seed, budget).map(|r| r.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub mu: f64,
    pub l: i64,
    pub p_fix: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_act: f64,
    pub budget_failures: u64,
}

/// Sweep output: raw rows plus the crossing heuristic, so callers can apply
/// their own finite-size analysis to the curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    pub rows: Vec<PhaseRow>,
    /// Midpoint between the largest density whose fixation probability looks
    /// L-stable and the smallest that decays; `None` when no decay shows.
    pub crossing: Option<f64>,
}

/// Runs both probes over a `mu x L` grid.
///
/// The decay test compares the smallest and largest `L`: a density decays
/// when fixation at `L_max` drops below half its `L_min` value, or never
/// fixates at all at `L_min`.
pub fn phase_sweep(
    law_family: &InitialLaw,
    lambda: f64,
    p: &JumpDistribution,
    mu_grid: &[f64],
    l_list: &[i64],
    trials: u64,
    seed: u64,
    budget: u64,
    activity_fraction: f64,
) -> Result<PhaseTable, ExperimentError> {
    if mu_grid.is_empty() {
        return Err(invalid("mu_grid", "must be non-empty"));
    }
    if l_list.is_empty() {
        return Err(invalid("L_list", "must be non-empty"));
    }
    let mut mus = mu_grid.to_vec();
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut ls = l_list.to_vec();
    ls.sort_unstable();

    let mut rows = Vec::with_capacity(mus.len() * ls.len());
    for (mi, &mu) in mus.iter().enumerate() {
        let law = law_family.with_mean(mu)?;
        for (li, &l) in ls.iter().enumerate() {
            let threshold = (activity_fraction * l as f64).ceil().max(1.0) as u64;
            let cell_seed = hash64(seed, (mi as u64) << 32 | li as u64);
            let (fix, act) = run_probe(&law, lambda, p, l, threshold, trials, cell_seed, budget)?;
            rows.push(PhaseRow {
                mu,
                l,
                p_fix: fix.estimate,
                ci_low: fix.ci_low,
                ci_high: fix.ci_high,
                p_act: act.estimate,
                budget_failures: fix.budget_failures,
            });
        }
    }

    let l_min = ls[0];
    let l_max = ls[ls.len() - 1];
    let mut stable_max: Option<f64> = None;
    let mut decay_min: Option<f64> = None;
    for &mu in &mus {
        let at = |l: i64| {
            rows.iter()
                .find(|r| r.mu == mu && r.l == l)
                .map(|r| r.p_fix)
                .unwrap_or(0.0)
        };
        let p_lo = at(l_min);
        let p_hi = at(l_max);
        let decays = p_lo == 0.0 || p_hi < p_lo / 2.0;
        if decays {
            if decay_min.is_none() {
                decay_min = Some(mu);
            }
        } else {
            stable_max = Some(mu);
        }
    }
    let crossing = match (stable_max, decay_min) {
        (Some(s), Some(d)) => Some(0.5 * (s + d)),
        (None, Some(d)) => Some(d),
        _ => None,
    };
    Ok(PhaseTable { rows, crossing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::DEFAULT_TOPPLE_BUDGET;

    #[test]
    fn zero_density_always_fixates() {
        let law = InitialLaw::poisson(0.0).unwrap();
        let p = JumpDistribution::bias_1d(0.7).unwrap();
        let est = fixation_probe(&law, 1.0, &p, 50, 20, 3, DEFAULT_TOPPLE_BUDGET).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert_eq!(est.budget_failures, 0);
        let act = activity_probe(&law, 1.0, &p, 50, 0.05, 20, 3, DEFAULT_TOPPLE_BUDGET).unwrap();
        assert_eq!(act.estimate, 0.0);
    }

    #[test]
    fn totally_asymmetric_fixation_sides() {
        // mu_c = 1/2 at q = 1, lambda = 1: below it the estimate stays away
        // from zero, above it the estimate collapses with L.
        let p = JumpDistribution::bias_1d(1.0).unwrap();
        let low = InitialLaw::poisson(0.25).unwrap();
        let high = InitialLaw::poisson(0.75).unwrap();
        let mut lows = Vec::new();
        let mut highs = Vec::new();
        for (i, l) in [100i64, 200, 400].into_iter().enumerate() {
            let a = fixation_probe(&low, 1.0, &p, l, 150, 40 + i as u64, DEFAULT_TOPPLE_BUDGET)
                .unwrap();
            let b = fixation_probe(&high, 1.0, &p, l, 150, 80 + i as u64, DEFAULT_TOPPLE_BUDGET)
                .unwrap();
            lows.push(a.estimate);
            highs.push(b.estimate);
        }
        assert!(
            lows.iter().all(|&e| e > 0.2),
            "fixation side should plateau: {lows:?}"
        );
        assert!(highs[2] < 0.05, "active side should collapse: {highs:?}");
    }

    #[test]
    fn activity_persists_on_the_active_side() {
        // Above the transition the origin's odometer grows linearly, so the
        // activity probe stays away from zero across region sizes.
        let law = InitialLaw::poisson(0.75).unwrap();
        let p = JumpDistribution::bias_1d(1.0).unwrap();
        for (i, l) in [60i64, 120, 240].into_iter().enumerate() {
            let est = activity_probe(
                &law,
                1.0,
                &p,
                l,
                0.05,
                100,
                900 + i as u64,
                DEFAULT_TOPPLE_BUDGET,
            )
            .unwrap();
            assert!(est.estimate > 0.5, "L={l}: {est:?}");
        }
    }

    #[test]
    fn activity_threshold_too_high_never_fires() {
        let law = InitialLaw::poisson(0.75).unwrap();
        let p = JumpDistribution::bias_1d(1.0).unwrap();
        // The origin cannot use more instructions than exist particles times
        // the worst sleep gap; 10 * mu * (1 + lambda) * L is far beyond it.
        let est = activity_probe(&law, 1.0, &p, 100, 15.0, 100, 5, DEFAULT_TOPPLE_BUDGET).unwrap();
        assert_eq!(est.estimate, 0.0);
    }

    #[test]
    fn budget_failures_are_reported() {
        let law = InitialLaw::poisson(0.9).unwrap();
        let p = JumpDistribution::bias_1d(0.5).unwrap();
        let est = fixation_probe(&law, 0.5, &p, 30, 10, 11, 5).unwrap();
        assert!(est.budget_failures > 0);
        assert_eq!(est.trials_ok + est.budget_failures, 10);
    }

    #[test]
    fn two_dimensional_probe_runs() {
        let law = InitialLaw::bernoulli(0.4).unwrap();
        let p = JumpDistribution::new(
            2,
            vec![
                (Site::new(1, 0), 0.4),
                (Site::new(-1, 0), 0.2),
                (Site::new(0, 1), 0.2),
                (Site::new(0, -1), 0.2),
            ],
        )
        .unwrap();
        let est = fixation_probe(&law, 1.0, &p, 6, 30, 2, DEFAULT_TOPPLE_BUDGET).unwrap();
        assert!(est.estimate >= 0.0 && est.estimate <= 1.0);
    }

    #[test]
    fn sweep_reports_no_crossing_below_the_bound() {
        // Densities entirely below the analytic bound: no decay anywhere.
        let law = InitialLaw::poisson(0.1).unwrap();
        let p = JumpDistribution::bias_1d(1.0).unwrap();
        let table = phase_sweep(
            &law,
            1.0,
            &p,
            &[0.05, 0.1, 0.2],
            &[50, 100, 200],
            60,
            77,
            DEFAULT_TOPPLE_BUDGET,
            DEFAULT_ACTIVITY_FRACTION,
        )
        .unwrap();
        assert_eq!(table.crossing, None, "rows: {:?}", table.rows);
    }

    #[test]
    fn sweep_is_deterministic() {
        let law = InitialLaw::poisson(0.5).unwrap();
        let p = JumpDistribution::bias_1d(1.0).unwrap();
        let run = || {
            phase_sweep(
                &law,
                1.0,
                &p,
                &[0.2, 0.6],
                &[40, 80],
                40,
                123,
                DEFAULT_TOPPLE_BUDGET,
                DEFAULT_ACTIVITY_FRACTION,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_grid_is_an_error() {
        let law = InitialLaw::poisson(0.5).unwrap();
        let p = JumpDistribution::bias_1d(1.0).unwrap();
        assert!(phase_sweep(
            &law,
            1.0,
            &p,
            &[],
            &[50],
            10,
            1,
            DEFAULT_TOPPLE_BUDGET,
            DEFAULT_ACTIVITY_FRACTION
        )
        .is_err());
    }
}
