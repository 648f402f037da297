//! Empirical law of the barrier increment.
//!
//! One algorithm step started far to the right of the current barrier moves
//! the barrier up by a random amount: the rightmost site visited after the
//! last sleep read before the walk reaches the barrier. This module samples
//! that increment for a single exploration launched from `y` toward the
//! origin with right absorbing boundary `L + 1`, as a finite proxy for the
//! idealized law (right boundary, then start offset, sent to infinity).
//!
//! Two samplers exist. The direct one walks the whole exploration and is the
//! reference implementation; for the symmetric walk its running time is
//! `Theta(y * L)` per trial, which is hopeless at the default proxy sizes.
//! The accelerated sampler is exact in distribution and built on a last-exit
//! decomposition at a small window `[0, K]`:
//!
//! * whether the walk escapes to `L + 1` is a Bernoulli draw with the exact
//!   gambler's-ruin probability;
//! * given no escape, the walk's final descent — everything after the last
//!   visit to `K` — is a walk from `K - 1` conditioned to hit 0 before `K`,
//!   sampled here by honest path rejection, with the increment rule applied
//!   literally to the accepted path;
//! * sleep flags before that final descent occur with overwhelming
//!   probability (the pre-descent path reads at least `y - K` flags), so a
//!   flagless window routes to the `>= K` overflow bucket.
//!
//! Increments up to `K - 1` are therefore sampled exactly; the acceptance
//! checks only use `k <= 10` with `K = 64`.

use super::{invalid, ExperimentError};
use crate::parallel::run_trials;
use crate::rng::{derive_seed, Rng};
use serde::{Deserialize, Serialize};

/// Window size of the accelerated sampler.
pub const INCREMENT_WINDOW: i64 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementHistogram {
    /// `bins[k]` counts trials with increment exactly `k`; index 0 unused.
    pub bins: Vec<u64>,
    /// Trials whose increment reached past the last bin.
    pub overflow: u64,
    /// Trials whose walk escaped through the right boundary (excluded; the
    /// right boundary is sent to infinity in the idealized law).
    pub escapes: u64,
    /// Trials whose whole explored path carried no sleep (excluded).
    pub no_sleep: u64,
    pub trials: u64,
}

impl IncrementHistogram {
    fn with_bins(max_bin: usize, trials: u64) -> Self {
        IncrementHistogram {
            bins: vec![0; max_bin + 1],
            overflow: 0,
            escapes: 0,
            no_sleep: 0,
            trials,
        }
    }

    fn record(&mut self, k: i64) {
        let k = k as usize;
        if k < self.bins.len() {
            self.bins[k] += 1;
        } else {
            self.overflow += 1;
        }
    }

    fn merge(mut self, other: &IncrementHistogram) -> Self {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.overflow += other.overflow;
        self.escapes += other.escapes;
        self.no_sleep += other.no_sleep;
        self
    }

    /// Trials contributing to the law.
    pub fn valid(&self) -> u64 {
        self.trials - self.escapes - self.no_sleep
    }

    /// Empirical probability of an increment of exactly `k`.
    pub fn pmf(&self, k: usize) -> f64 {
        if self.valid() == 0 || k >= self.bins.len() {
            return 0.0;
        }
        self.bins[k] as f64 / self.valid() as f64
    }

    /// Empirical tail probability `P(increment >= k)`.
    pub fn survival(&self, k: usize) -> f64 {
        if self.valid() == 0 {
            return 0.0;
        }
        let mass: u64 = self.bins.iter().skip(k).sum::<u64>() + self.overflow;
        mass as f64 / self.valid() as f64
    }

    /// Mean over finite bins; meaningful when overflow is negligible.
    pub fn mean(&self) -> f64 {
        if self.valid() == 0 {
            return 0.0;
        }
        let sum: u64 = self
            .bins
            .iter()
            .enumerate()
            .map(|(k, &c)| k as u64 * c)
            .sum();
        sum as f64 / self.valid() as f64
    }
}

fn validate(q: f64, lambda: f64, y: i64, l: i64, trials: u64) -> Result<(), ExperimentError> {
    if !(0.0..=0.5).contains(&q) {
        return Err(invalid("q", format!("needs 0 <= q <= 1/2, got {q}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("needs lambda > 0, got {lambda}")));
    }
    if y < 1 {
        return Err(invalid("y", "needs y >= 1"));
    }
    if l < y {
        return Err(invalid("L", format!("needs L >= y, got L={l}, y={y}")));
    }
    if trials == 0 {
        return Err(invalid("trials", "needs trials >= 1"));
    }
    Ok(())
}

enum TrialResult {
    Increment(i64),
    Overflow,
    Escape,
    NoSleep,
}

/// Walks the exploration step by step and applies the increment rule: every
/// sleep flag resets the candidate trap to the current site, and from the
/// last flag on, the running maximum of visited sites is the increment.
fn direct_trial(rng: &mut Rng, q: f64, sleep_p: f64, y: i64, l: i64) -> TrialResult {
    let mut s = y;
    let mut have_flag = false;
    let mut max_after = 0i64;
    loop {
        if s == 0 {
            return if have_flag {
                TrialResult::Increment(max_after)
            } else {
                TrialResult::NoSleep
            };
        }
        if s == l + 1 {
            return TrialResult::Escape;
        }
        if rng.bernoulli(sleep_p) {
            have_flag = true;
            max_after = s;
        } else if have_flag && s > max_after {
            max_after = s;
        }
        s += if rng.bernoulli(q) { 1 } else { -1 };
    }
}

/// Reference sampler: simulates every exploration in full. Exact but
/// `Theta(y * (L - y))` per trial for the symmetric walk; use it for small
/// proxies and for validating the accelerated sampler.
pub fn sample_barrier_increments_direct(
    q: f64,
    lambda: f64,
    y: i64,
    l: i64,
    trials: u64,
    seed: u64,
) -> Result<IncrementHistogram, ExperimentError> {
    validate(q, lambda, y, l, trials)?;
    let sleep_p = lambda / (1.0 + lambda);
    let max_bin = (y + 1) as usize;
    let parts = run_trials(trials, |t| {
        let mut rng = Rng::new(derive_seed(seed, t));
        let mut h = IncrementHistogram::with_bins(max_bin, 0);
        match direct_trial(&mut rng, q, sleep_p, y, l) {
            TrialResult::Increment(k) => h.record(k),
            TrialResult::Overflow => h.overflow += 1,
            TrialResult::Escape => h.escapes += 1,
            TrialResult::NoSleep => h.no_sleep += 1,
        }
        h
    });
    let mut total = IncrementHistogram::with_bins(max_bin, trials);
    for part in &parts {
        total = total.merge(part);
    }
    Ok(total)
}

/// Exact probability that the walk from `y` hits `l + 1` before the origin.
fn escape_probability(q: f64, y: i64, l: i64) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    if q == 0.5 {
        return y as f64 / (l + 1) as f64;
    }
    // q < 1/2: with rho = (1-q)/q > 1, the ruin ratio in stable form.
    let ln_rho = ((1.0 - q) / q).ln();
    let top = -f64::exp_m1(-(y as f64) * ln_rho);
    let bottom = -f64::exp_m1(-((l + 1) as f64) * ln_rho);
    f64::exp((y - l - 1) as f64 * ln_rho) * top / bottom
}

fn window_trial(rng: &mut Rng, q: f64, sleep_p: f64, window: i64) -> TrialResult {
    // Rejection-sample the final descent: from window-1 after the forced
    // step off the window top, a raw walk that must hit 0 before returning.
    let mut path: Vec<i64> = Vec::with_capacity((window * window) as usize);
    loop {
        path.clear();
        path.push(window);
        let mut s = window - 1;
        path.push(s);
        let accepted = loop {
            if s == 0 {
                break true;
            }
            s += if rng.bernoulli(q) { 1 } else { -1 };
            if s == window {
                break false;
            }
            path.push(s);
        };
        if accepted {
            break;
        }
    }
    // Sleep flags are independent of the path, one per read, none at the
    // final arrival at the origin.
    let reads = path.len() - 1;
    let mut t_star = None;
    for t in 0..reads {
        if rng.bernoulli(sleep_p) {
            t_star = Some(t);
        }
    }
    match t_star {
        // No flag in the window: the last sleep sits before the final
        // descent, so the increment is at least the window size.
        None => TrialResult::Overflow,
        Some(t) => TrialResult::Increment(*path[t..reads].iter().max().expect("non-empty")),
    }
}

/// Accelerated exact sampler of the barrier increment (see the module docs).
/// Falls back to the direct sampler when `y` is too close to the window for
/// the last-exit decomposition.
pub fn sample_barrier_increments(
    q: f64,
    lambda: f64,
    y: i64,
    l: i64,
    trials: u64,
    seed: u64,
) -> Result<IncrementHistogram, ExperimentError> {
    validate(q, lambda, y, l, trials)?;
    let window = INCREMENT_WINDOW;
    if y <= 2 * window {
        return sample_barrier_increments_direct(q, lambda, y, l, trials, seed);
    }
    let sleep_p = lambda / (1.0 + lambda);
    let p_escape = escape_probability(q, y, l);
    let max_bin = window as usize;
    let parts = run_trials(trials, |t| {
        let mut rng = Rng::new(derive_seed(seed, t));
        let mut h = IncrementHistogram::with_bins(max_bin, 0);
        if rng.bernoulli(p_escape) {
            h.escapes += 1;
        } else {
            match window_trial(&mut rng, q, sleep_p, window) {
                TrialResult::Increment(k) => h.record(k),
                TrialResult::Overflow => h.overflow += 1,
                TrialResult::Escape | TrialResult::NoSleep => unreachable!(),
            }
        }
        h
    });
    let mut total = IncrementHistogram::with_bins(max_bin, trials);
    for part in &parts {
        total = total.merge(part);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::conditional_passage_gf;

    #[test]
    fn no_mass_at_zero_and_tail_is_one_at_one() {
        let h = sample_barrier_increments(0.5, 1.0, 500, 5_000, 20_000, 9).unwrap();
        assert_eq!(h.bins[0], 0);
        assert!((h.survival(1) - 1.0).abs() < 1e-12);
        assert!(h.valid() > 0);
    }

    #[test]
    fn escape_probability_matches_symmetric_ruin() {
        assert!((escape_probability(0.5, 100, 999) - 0.1).abs() < 1e-12);
        assert_eq!(escape_probability(0.0, 100, 999), 0.0);
        // Strong left drift: escape is astronomically unlikely.
        assert!(escape_probability(0.3, 1_000, 1_000_000) < 1e-300);
    }

    #[test]
    fn fast_and_direct_samplers_agree() {
        // Same finite proxy, same conditioning: the two samplers draw from
        // the same law, so survival curves agree to Monte Carlo noise.
        let (q, lambda, y, l) = (0.5, 1.0, 150, 600);
        let trials = 30_000u64;
        let fast = sample_barrier_increments(q, lambda, y, l, trials, 11).unwrap();
        let direct = sample_barrier_increments_direct(q, lambda, y, l, trials, 12).unwrap();
        for k in 1..=10usize {
            let a = fast.survival(k);
            let b = direct.survival(k);
            let se = ((a * (1.0 - a) + b * (1.0 - b)) / trials as f64)
                .sqrt()
                .max(1e-4);
            assert!((a - b).abs() < 4.0 * se, "k={k}: fast {a} vs direct {b}");
        }
        // The proxy escape rates agree with the exact ruin probability.
        let p = escape_probability(q, y, l);
        let observed = direct.escapes as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((observed - p).abs() < 4.0 * se);
    }

    #[test]
    fn survival_matches_the_closed_form() {
        let (q, lambda) = (0.5, 1.0);
        let g = 1.0 / (1.0 + lambda);
        let h = sample_barrier_increments(q, lambda, 1_000, 1_000_000, 50_000, 21).unwrap();
        for k in 1..=8u32 {
            let closed = conditional_passage_gf(k, q, g).unwrap();
            let emp = h.survival(k as usize);
            let se = (closed * (1.0 - closed) / h.valid() as f64)
                .sqrt()
                .max(5e-4);
            assert!((emp - closed).abs() < 5.0 * se, "k={k}: {emp} vs {closed}");
        }
    }

    #[test]
    fn drifted_mean_approaches_the_sleep_gap() {
        // Near-deterministic left drift: mean increment ~ (1+lambda)/lambda.
        let lambda = 1.0;
        let h = sample_barrier_increments(0.01, lambda, 500, 5_000, 40_000, 33).unwrap();
        let expect = (1.0 + lambda) / lambda;
        assert!(
            (h.mean() - expect).abs() < 0.05 * expect,
            "{} vs {}",
            h.mean(),
            expect
        );
    }

    #[test]
    fn doubling_the_proxy_moves_nothing() {
        // Convergence check on the double limit: doubling y and L shifts
        // each tail point by no more than noise (3 combined sigmas).
        let (q, lambda) = (0.3, 0.5);
        let a = sample_barrier_increments(q, lambda, 1_000, 1_000_000, 30_000, 5).unwrap();
        let b = sample_barrier_increments(q, lambda, 2_000, 2_000_000, 30_000, 6).unwrap();
        for k in 1..=10usize {
            let (pa, pb) = (a.survival(k), b.survival(k));
            let se = ((pa * (1.0 - pa) + pb * (1.0 - pb)) / 30_000.0)
                .sqrt()
                .max(1e-4);
            assert!((pa - pb).abs() < 3.0 * se, "k={k}: {pa} vs {pb}");
        }
    }

    #[test]
    fn determinism() {
        let a = sample_barrier_increments(0.4, 0.7, 300, 3_000, 5_000, 77).unwrap();
        let b = sample_barrier_increments(0.4, 0.7, 300, 3_000, 5_000, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(sample_barrier_increments(0.7, 1.0, 10, 100, 10, 1).is_err());
        assert!(sample_barrier_increments(0.5, 0.0, 10, 100, 10, 1).is_err());
        assert!(sample_barrier_increments(0.5, 1.0, 200, 100, 10, 1).is_err());
    }
}
