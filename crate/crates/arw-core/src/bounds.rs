//! Analytic lower bound for the critical density of the 1-D biased model.
//!
//! The bound comes from a barrier stabilization argument: the expected
//! barrier increment per settled particle is a series of conditional
//! first-passage generating functions, and its reciprocal lower-bounds the
//! critical density. The series term is evaluated in closed form from the
//! roots of the associated martingale quadratic; an independent
//! dynamic-programming oracle over first-passage times checks the algebra.
//!
//! Conventions: `q` is the right-jump probability, `g = 1/(1+lambda)` the
//! per-step no-sleep weight. The underlying walk starts one step below the
//! origin; `ruin_probability(k, q)` is the chance it reaches `-k` before 0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("invalid parameter {name}: {msg}")]
    Domain { name: &'static str, msg: String },
}

fn domain(name: &'static str, msg: impl Into<String>) -> BoundsError {
    BoundsError::Domain {
        name,
        msg: msg.into(),
    }
}

/// Sleeping rate and bias for the one-dimensional bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub lambda: f64,
    pub q: f64,
}

impl BoundParams {
    pub fn new(lambda: f64, q: f64) -> Result<Self, BoundsError> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain(
                "lambda",
                format!("must be positive and finite, got {lambda}"),
            ));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(domain("q", format!("must lie in [0,1], got {q}")));
        }
        Ok(BoundParams { lambda, q })
    }

    pub fn no_sleep_weight(&self) -> f64 {
        1.0 / (1.0 + self.lambda)
    }
}

/// Truncation controls for the series and the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    /// Stop once a term drops below this.
    pub term_tolerance: f64,
    /// Hard cap on the number of terms.
    pub max_terms: u32,
    /// Step cap for the dynamic-programming oracle.
    pub oracle_max_steps: u32,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            term_tolerance: 1e-12,
            max_terms: 10_000,
            oracle_max_steps: 400,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<(), BoundsError> {
        if !(self.term_tolerance > 0.0) {
            return Err(domain("term_tolerance", "must be positive"));
        }
        if self.max_terms < 1 {
            return Err(domain("max_terms", "must be >= 1"));
        }
        if self.oracle_max_steps < 1 {
            return Err(domain("oracle_max_steps", "must be >= 1"));
        }
        Ok(())
    }
}

/// Larger root of `A^2 - A/(g(1-q)) + q/(1-q) = 0`, the quadratic whose
/// roots make `g^n A^(-H_n)` a martingale for the biased walk `H_n`.
///
/// `root_plus >= 1`, with equality exactly at `q = 1/2, g = 1`. The totally
/// asymmetric cases `q` in `{0,1}` are excluded; callers handle them in
/// closed form.
pub fn root_plus(q: f64, g: f64) -> Result<f64, BoundsError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain("q", format!("root_plus needs 0 < q < 1, got {q}")));
    }
    if !(g > 0.0 && g <= 1.0) {
        return Err(domain("g", format!("root_plus needs 0 < g <= 1, got {g}")));
    }
    let disc = 1.0 - 4.0 * q * (1.0 - q) * g * g;
    // disc >= 0 always: 4q(1-q) <= 1 and g <= 1.
    Ok((1.0 + disc.max(0.0).sqrt()) / (2.0 * (1.0 - q) * g))
}

/// Probability that the walk started one step below the origin reaches `-k`
/// before the origin: `1/k` in the symmetric case, else a gambler's-ruin
/// ratio. Requires `q <= 1/2`; reflect first for the other half.
pub fn ruin_probability(k: u32, q: f64) -> Result<f64, BoundsError> {
    if k < 1 {
        return Err(domain("k", "must be >= 1"));
    }
    if !(q > 0.0 && q <= 0.5) {
        return Err(domain(
            "q",
            format!("ruin_probability needs 0 < q <= 1/2, got {q}"),
        ));
    }
    if k == 1 {
        return Ok(1.0);
    }
    if q == 0.5 {
        return Ok(1.0 / k as f64);
    }
    let r = q / (1.0 - q); // < 1
    Ok((1.0 - r) / (1.0 - r.powi(k as i32)))
}

/// `E[g^T]` over the first passage to `-k`, conditioned on that passage
/// beating the return to the origin. This equals the tail probability that
/// a barrier increment is at least `k`, so it is the series term of the
/// bound. Exactly 1 at `k = 1`.
///
/// The evaluation uses the root-difference form `sqrt(disc)/(g(1-q))` and
/// `expm1` for `A_+^k - A_-^k`, which stays stable as the two roots collide
/// near `q = 1/2`, `g -> 1`.
pub fn conditional_passage_gf(k: u32, q: f64, g: f64) -> Result<f64, BoundsError> {
    if k < 1 {
        return Err(domain("k", "must be >= 1"));
    }
    if !(q > 0.0 && q <= 0.5) {
        return Err(domain("q", format!("needs 0 < q <= 1/2, got {q}")));
    }
    if !(g > 0.0 && g < 1.0) {
        return Err(domain(
            "g",
            format!("needs 0 < g < 1 (lambda > 0), got {g}"),
        ));
    }
    if k == 1 {
        // The walk starts at the target: the passage takes zero steps.
        return Ok(1.0);
    }
    let a_plus = root_plus(q, g)?;
    let a_minus = (q / (1.0 - q)) / a_plus; // Vieta: product of roots.
    let disc = 1.0 - 4.0 * q * (1.0 - q) * g * g;
    let root_diff = disc.max(0.0).sqrt() / ((1.0 - q) * g);
    // A_+^k - A_-^k = A_+^k (1 - r^k) with r = A_-/A_+ < 1.
    let ratio = a_minus / a_plus;
    let one_minus_rk = -f64::ln(ratio).mul_add(k as f64, 0.0).exp_m1();
    let denom = a_plus.powi(k as i32) * one_minus_rk;
    let p = ruin_probability(k, q)?;
    Ok(root_diff / (p * denom))
}

/// Dynamic-programming oracle for [`conditional_passage_gf`], summing
/// `g^j * P(first passage to -k at step j)` over an explicit horizon with a
/// rigorous tail bound. Independent of the martingale algebra.
///
/// Returns `(value, error_bound)`. The bound is the geometric tail
/// `g^steps/(1-g)` divided by the passage probability, plus a small
/// float-roundoff allowance so it stays meaningful when the tail undershoots
/// machine precision.
pub fn passage_gf_dp(k: u32, q: f64, g: f64, max_steps: u32) -> Result<(f64, f64), BoundsError> {
    if k < 1 {
        return Err(domain("k", "must be >= 1"));
    }
    if max_steps + 1 < k {
        return Err(domain("max_steps", format!("must be >= k - 1 = {}", k - 1)));
    }
    if !(q > 0.0 && q <= 0.5) {
        return Err(domain("q", format!("needs 0 < q <= 1/2, got {q}")));
    }
    if !(g > 0.0 && g < 1.0) {
        return Err(domain("g", format!("needs 0 < g < 1, got {g}")));
    }
    if k == 1 {
        return Ok((1.0, 0.0));
    }
    let p_pass = ruin_probability(k, q)?;
    // Live positions -1, -2, ..., -(k-1); index i holds position -(i+1).
    let live = (k - 1) as usize;
    let mut mass = vec![0.0f64; live];
    mass[0] = 1.0;
    let mut value = 0.0;
    let mut g_pow = 1.0;
    for _step in 1..=max_steps {
        g_pow *= g;
        let mut next = vec![0.0f64; live];
        let mut absorbed = 0.0;
        for (i, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            // Step right (towards 0) with probability q.
            if i == 0 {
                // -1 -> 0: absorbed at the origin, contributes nothing.
            } else {
                next[i - 1] += q * m;
            }
            // Step left with probability 1 - q.
            if i + 1 == live {
                absorbed += (1.0 - q) * m; // reached -k
            } else {
                next[i + 1] += (1.0 - q) * m;
            }
        }
        value += g_pow * absorbed;
        mass = next;
    }
    let geometric_tail = g_pow * g / (1.0 - g);
    let roundoff = 8.0 * f64::EPSILON * (max_steps as f64 + k as f64);
    Ok((value / p_pass, geometric_tail / p_pass + roundoff))
}

/// Result of the series evaluation of the lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    /// The lower bound on the critical density.
    pub bound: f64,
    /// Terms of the increment series actually summed (0 for closed forms).
    pub terms: u32,
    /// Geometric-tail estimate of the unsummed remainder of the increment
    /// series (the reciprocal of the bound), `last/(1 - last/previous)`.
    pub truncation_error: f64,
    /// True if the term cap was hit before the tolerance.
    pub under_resolved: bool,
}

/// Lower bound for the critical density of the 1-D model with right-jump
/// probability `q` and sleeping rate `lambda`.
///
/// The reciprocal of the bound is the sum over `k >= 1` of
/// [`conditional_passage_gf`]. `q > 1/2` reflects to `1 - q`; the totally
/// asymmetric edges return `lambda/(1+lambda)` in closed form.
pub fn lower_bound(params: BoundParams, ctl: SeriesControl) -> Result<BoundValue, BoundsError> {
    ctl.validate()?;
    let BoundParams { lambda, q } = BoundParams::new(params.lambda, params.q)?;
    let q = if q > 0.5 { 1.0 - q } else { q };
    if q == 0.0 {
        // The expected increment is the mean sleep gap (1+lambda)/lambda.
        return Ok(BoundValue {
            bound: lambda / (1.0 + lambda),
            terms: 0,
            truncation_error: 0.0,
            under_resolved: false,
        });
    }
    let g = 1.0 / (1.0 + lambda);
    let mut sum = 0.0;
    let mut previous = f64::NAN;
    let mut last = f64::NAN;
    let mut terms = 0u32;
    for k in 1..=ctl.max_terms {
        let term = conditional_passage_gf(k, q, g)?;
        sum += term;
        previous = last;
        last = term;
        terms = k;
        if term < ctl.term_tolerance {
            break;
        }
    }
    let ratio = if previous.is_finite() && previous > 0.0 {
        last / previous
    } else {
        0.0
    };
    let truncation_error = if ratio < 1.0 {
        last / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    let under_resolved = last >= ctl.term_tolerance;
    Ok(BoundValue {
        bound: 1.0 / sum,
        terms,
        truncation_error,
        under_resolved,
    })
}

/// Gambler's-ruin probability that a right-biased walk from `x` reaches
/// `l + 1` before the origin. Requires `q > 1/2` (reflect at the caller).
pub fn escape_right_prob(x: u32, l: u32, q: f64) -> Result<f64, BoundsError> {
    if x < 1 || x > l {
        return Err(domain("x", format!("needs 1 <= x <= l, got x={x}, l={l}")));
    }
    if !(q > 0.5 && q <= 1.0) {
        return Err(domain("q", format!("needs 1/2 < q <= 1, got {q}")));
    }
    if q == 1.0 {
        return Ok(1.0);
    }
    let r = (1.0 - q) / q; // < 1
    Ok((1.0 - r.powi(x as i32)) / (1.0 - r.powi(l as i32 + 1)))
}
