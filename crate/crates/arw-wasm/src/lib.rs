//! Browser bindings for the activated random walk laboratory.
//!
//! Three interactive operations back the demo page in `www/`:
//!
//! * [`bound_curve`] — the analytic lower bound for the critical density as
//!   a function of the bias, for plotting against the flat bound.
//! * [`stabilize_profile`] — one seeded stabilization of `[-L, L]`,
//!   returning the odometer and final occupancy profiles as JSON.
//! * [`fixation_curve`] — Monte Carlo fixation probability across a density
//!   grid, the phase-transition picture.
//!
//! Build with `wasm-pack build --target web crates/arw-wasm`; the bindings
//! also compile natively so the workspace test suite covers them.

use arw_core::bounds::{lower_bound, BoundParams, SeriesControl};
use arw_core::drift::JumpDistribution;
use arw_core::engine::{interval_region, stabilize, SiteState, TapeStore, TopplePolicy};
use arw_core::experiments::{fixation_probe, sample_initial, InitialLaw};
use arw_core::lattice::Site;
use arw_core::rng::hash64;
use wasm_bindgen::prelude::wasm_bindgen;

fn err_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

/// Lower bound for the critical density over an even bias grid. Returns
/// interleaved `[q0, B0, q1, B1, ...]`; an empty vector flags bad input.
#[wasm_bindgen]
pub fn bound_curve(lambda: f64, points: u32) -> Vec<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() || points < 2 {
        return Vec::new();
    }
    let ctl = SeriesControl {
        max_terms: 200_000,
        ..SeriesControl::default()
    };
    let mut out = Vec::with_capacity(2 * points as usize);
    for i in 0..points {
        let q = i as f64 / (points - 1) as f64;
        match BoundParams::new(lambda, q).and_then(|p| lower_bound(p, ctl)) {
            Ok(v) => {
                out.push(q);
                out.push(v.bound);
            }
            Err(_) => return Vec::new(),
        }
    }
    out
}

/// The flat lower bound `lambda / (1 + lambda)` drawn as a reference line.
#[wasm_bindgen]
pub fn flat_bound(lambda: f64) -> f64 {
    lambda / (1.0 + lambda)
}

/// Stabilizes one sampled configuration on `[-L, L]` and reports the
/// odometer and occupancy profiles (JSON). Occupancy uses `-1` for a
/// sleeping particle and `k >= 1` for `k` active ones; particles at rest
/// outside the region are summed into `rested_left`/`rested_right`.
#[wasm_bindgen]
pub fn stabilize_profile(lambda: f64, q: f64, mu: f64, l: i32, seed: u64) -> String {
    if !(1..=2000).contains(&l) {
        return err_json("L must lie in [1, 2000]");
    }
    let l = l as i64;
    let jumps = match JumpDistribution::bias_1d(q) {
        Ok(j) => j,
        Err(e) => return err_json(e),
    };
    let law = match InitialLaw::poisson(mu) {
        Ok(law) => law,
        Err(e) => return err_json(e),
    };
    let region = interval_region(-l, l);
    let config = sample_initial(&law, &region, hash64(seed, 1));
    let tapes = match TapeStore::new(hash64(seed, 2), lambda, &jumps) {
        Ok(t) => t,
        Err(e) => return err_json(e),
    };
    let out = match stabilize(&config, &region, &tapes, TopplePolicy::Fifo, 200_000_000) {
        Ok(o) => o,
        Err(e) => return err_json(e),
    };
    let xs: Vec<i64> = (-l..=l).collect();
    let odometer: Vec<u64> = xs
        .iter()
        .map(|&x| out.odometer.get(Site::line(x)))
        .collect();
    let occupancy: Vec<i64> = xs
        .iter()
        .map(|&x| out.config.get(Site::line(x)).to_cell())
        .collect();
    let initial: Vec<i64> = xs
        .iter()
        .map(|&x| config.get(Site::line(x)).to_cell())
        .collect();
    let mut rested_left = 0u64;
    let mut rested_right = 0u64;
    for (site, state) in out.config.occupied() {
        if site.x < -l {
            rested_left += state.particles();
        } else if site.x > l {
            rested_right += state.particles();
        }
    }
    let sleeping = out
        .config
        .occupied()
        .filter(|(_, s)| *s == SiteState::Sleeping)
        .count();
    serde_json::json!({
        "l": l,
        "topples": out.topples,
        "origin_uses": out.odometer.get(Site::ORIGIN),
        "particles": config.total_particles(),
        "sleeping": sleeping,
        "rested_left": rested_left,
        "rested_right": rested_right,
        "odometer": odometer,
        "occupancy": occupancy,
        "initial": initial,
    })
    .to_string()
}

/// Fixation probability of the origin across a density grid (JSON rows of
/// `mu`, `p_fix`, and the Wilson interval), plus the analytic bound for the
/// same parameters.
#[wasm_bindgen]
pub fn fixation_curve(
    lambda: f64,
    q: f64,
    l: i32,
    trials: u32,
    mu_min: f64,
    mu_max: f64,
    points: u32,
    seed: u64,
) -> String {
    if !(1..=2000).contains(&l) {
        return err_json("L must lie in [1, 2000]");
    }
    if points < 2 || trials == 0 {
        return err_json("need at least 2 grid points and 1 trial");
    }
    if !(mu_min >= 0.0 && mu_max > mu_min) {
        return err_json("need 0 <= mu_min < mu_max");
    }
    let jumps = match JumpDistribution::bias_1d(q) {
        Ok(j) => j,
        Err(e) => return err_json(e),
    };
    let mut rows = Vec::new();
    for i in 0..points {
        let mu = mu_min + (mu_max - mu_min) * i as f64 / (points - 1) as f64;
        let law = match InitialLaw::poisson(mu) {
            Ok(law) => law,
            Err(e) => return err_json(e),
        };
        let est = match fixation_probe(
            &law,
            lambda,
            &jumps,
            l as i64,
            trials as u64,
            hash64(seed, i as u64),
            200_000_000,
        ) {
            Ok(e) => e,
            Err(e) => return err_json(e),
        };
        rows.push(serde_json::json!({
            "mu": mu,
            "p_fix": est.estimate,
            "ci_low": est.ci_low,
            "ci_high": est.ci_high,
        }));
    }
    let bound = BoundParams::new(lambda, q)
        .and_then(|p| lower_bound(p, SeriesControl::default()))
        .map(|v| v.bound)
        .ok();
    serde_json::json!({ "rows": rows, "bound": bound, "flat_bound": flat_bound(lambda) })
        .to_string()
}
