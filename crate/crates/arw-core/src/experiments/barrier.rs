//! The 1-D barrier stabilization algorithm.
//!
//! Particles on `[0, L]` are settled left to right. Each step explores the
//! putative trajectory of one particle by reading fresh tape slots until the
//! previous barrier (initially the origin) or the right boundary `L + 1` is
//! hit. If the exploration reaches the barrier, the particle is parked at
//! the *trap* — the site of the last sleep read along the path — and the new
//! barrier becomes the rightmost site visited from the trap onward. The
//! barrier separates corrupted tape slots (read but unused) from fresh ones,
//! so later explorations see i.i.d. instructions and never wake a parked
//! particle.
//!
//! A step fails when its particle starts at or left of the current barrier,
//! when no sleep shows up on the explored path, or when the new barrier
//! would overshoot the particle's starting site; failure is absorbing. When
//! every step succeeds, no instruction at the origin is ever used, and by
//! the enforced-activation order the same holds for full engine
//! stabilization of `[0, L]` on the same tapes.

use super::{invalid, ExperimentError};
use crate::engine::{Configuration, Instruction, InstructionSource, SiteState};
use crate::lattice::Site;
use std::collections::HashMap;

/// Default cap on tape reads in one algorithm run.
pub const DEFAULT_EXPLORATION_BUDGET: u64 = 1_000_000_000;

/// One exploration: the visited path, the per-arrival sleep flags, and the
/// start. The final path entry is the stop site, where nothing is read; its
/// flag is always false.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplorationRecord {
    pub start: i64,
    pub path: Vec<i64>,
    pub flags: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Barrier {
    Finite(i64),
    Infinite,
}

impl Barrier {
    pub fn finite(self) -> Option<i64> {
        match self {
            Barrier::Finite(x) => Some(x),
            Barrier::Infinite => None,
        }
    }
}

/// Outcome of one algorithm run: the per-step barriers and traps, and
/// whether every step succeeded.
#[derive(Clone, Debug, PartialEq)]
pub struct BarrierOutcome {
    pub barriers: Vec<Barrier>,
    pub traps: Vec<Option<i64>>,
    pub success: bool,
}

/// Runs the barrier algorithm on a configuration supported on `[0, L]` with
/// every particle active. `q` is the right-jump probability of the tape's
/// walk and must satisfy `q <= 1/2` (reflect the other case first).
pub fn run_barrier_algorithm(
    eta: &Configuration,
    tapes: &impl InstructionSource,
    q: f64,
    l: i64,
    step_budget: u64,
) -> Result<BarrierOutcome, ExperimentError> {
    run_barrier_algorithm_recorded(eta, tapes, q, l, step_budget, &mut |_| {})
}

/// Same as [`run_barrier_algorithm`] but streams each exploration record to
/// `on_exploration` (used by the contract tests).
pub fn run_barrier_algorithm_recorded(
    eta: &Configuration,
    tapes: &impl InstructionSource,
    q: f64,
    l: i64,
    step_budget: u64,
    on_exploration: &mut dyn FnMut(&ExplorationRecord),
) -> Result<BarrierOutcome, ExperimentError> {
    if !(0.0..=0.5).contains(&q) {
        return Err(invalid(
            "q",
            format!("barrier algorithm needs q <= 1/2, got {q}"),
        ));
    }
    if l < 1 {
        return Err(invalid("L", format!("must be >= 1, got {l}")));
    }
    let mut particles: Vec<i64> = Vec::new();
    for (site, state) in eta.occupied() {
        if site.y != 0 || site.x < 0 || site.x > l {
            return Err(invalid(
                "eta",
                format!("site {site} is outside [0, L] x {{0}}"),
            ));
        }
        match state {
            SiteState::Active(k) => {
                // Same-site particles settle in an arbitrary fixed order.
                for _ in 0..k {
                    particles.push(site.x);
                }
            }
            _ => {
                return Err(invalid(
                    "eta",
                    format!("site {site} holds a non-active particle"),
                ))
            }
        }
    }

    let mut cursors: HashMap<i64, u64> = HashMap::new();
    let mut barriers = Vec::with_capacity(particles.len());
    let mut traps = Vec::with_capacity(particles.len());
    let mut barrier = 0i64; // the origin seeds the first step
    let mut failed = false;
    let mut reads = 0u64;

    for &start in &particles {
        if failed || start <= barrier {
            failed = true;
            barriers.push(Barrier::Infinite);
            traps.push(None);
            continue;
        }
        // Explore from `start` until the barrier or L+1 is hit.
        let mut path = Vec::new();
        let mut flags = Vec::new();
        let mut s = start;
        loop {
            if s == barrier || s == l + 1 {
                path.push(s);
                flags.push(false);
                break;
            }
            // Read fresh slots at s until an arrow shows up; the flag says
            // whether any sleep preceded it.
            let cursor = cursors.entry(s).or_insert(0);
            let mut saw_sleep = false;
            let step = loop {
                reads += 1;
                if reads > step_budget {
                    return Err(ExperimentError::ExplorationBudget(step_budget));
                }
                let slot = *cursor;
                *cursor += 1;
                match tapes.instruction(Site::line(s), slot) {
                    Instruction::Sleep => saw_sleep = true,
                    Instruction::Neutral => {}
                    Instruction::Move(z) => {
                        if z.y != 0 || z.x.abs() != 1 {
                            return Err(invalid(
                                "tapes",
                                format!("barrier algorithm needs nearest-neighbour moves, got {z}"),
                            ));
                        }
                        break z.x;
                    }
                }
            };
            path.push(s);
            flags.push(saw_sleep);
            s += step;
        }
        on_exploration(&ExplorationRecord {
            start,
            path: path.clone(),
            flags: flags.clone(),
        });

        let stop = *path.last().expect("non-empty path");
        if stop == l + 1 {
            // Escape through the right boundary keeps the barrier in place.
            barriers.push(Barrier::Finite(barrier));
            traps.push(None);
            continue;
        }
        // Hit the previous barrier: park the particle at the last sleep.
        let live = path.len() - 1; // the stop site reads nothing
        match flags[..live].iter().rposition(|&f| f) {
            None => {
                failed = true;
                barriers.push(Barrier::Infinite);
                traps.push(None);
            }
            Some(t_star) => {
                let trap = path[t_star];
                let new_barrier = *path[t_star..live]
                    .iter()
                    .max()
                    .expect("trap segment is non-empty");
                if new_barrier > start {
                    // The barrier may not overshoot the starting site; a
                    // later particle would find itself behind it.
                    failed = true;
                    barriers.push(Barrier::Infinite);
                    traps.push(None);
                } else {
                    barrier = new_barrier;
                    barriers.push(Barrier::Finite(barrier));
                    traps.push(Some(trap));
                }
            }
        }
    }

    Ok(BarrierOutcome {
        barriers,
        traps,
        success: !failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::JumpDistribution;
    use crate::engine::{interval_region, stabilize, TapeStore, TopplePolicy};
    use crate::experiments::{sample_initial, InitialLaw};
    use crate::rng::hash64;

    /// Scripted source for hand-traced paths: a map from (site, slot) to
    /// instructions, with a default move so reads never run dry.
    struct Scripted {
        slots: HashMap<(i64, u64), Instruction>,
        default_step: i64,
    }

    impl InstructionSource for Scripted {
        fn instruction(&self, site: Site, index: u64) -> Instruction {
            self.slots
                .get(&(site.x, index))
                .copied()
                .unwrap_or(Instruction::Move(Site::line(self.default_step)))
        }
    }

    fn left() -> Instruction {
        Instruction::Move(Site::line(-1))
    }

    fn right() -> Instruction {
        Instruction::Move(Site::line(1))
    }

    #[test]
    fn empty_configuration_succeeds_trivially() {
        let eta = Configuration::new(1);
        let tapes = TapeStore::new(1, 1.0, &JumpDistribution::bias_1d(0.5).unwrap()).unwrap();
        let out = run_barrier_algorithm(&eta, &tapes, 0.5, 10, 1_000).unwrap();
        assert!(out.success);
        assert!(out.barriers.is_empty());
    }

    #[test]
    fn hand_traced_path_with_one_sleep() {
        // Particle at 5, path 5,4,5,4,3,2,1,0 with a sleep read only at the
        // third arrival (t = 2, site 5): trap 5, barrier max(S(2..6)) = 5.
        let mut slots = HashMap::new();
        slots.insert((5, 0), left());
        slots.insert((4, 0), right());
        slots.insert((5, 1), Instruction::Sleep);
        slots.insert((5, 2), left());
        slots.insert((4, 1), left());
        slots.insert((3, 0), left());
        slots.insert((2, 0), left());
        slots.insert((1, 0), left());
        let tapes = Scripted {
            slots,
            default_step: -1,
        };

        let mut eta = Configuration::new(1);
        eta.set(Site::line(5), SiteState::Active(1));
        let mut records = Vec::new();
        let out = run_barrier_algorithm_recorded(&eta, &tapes, 0.5, 10, 1_000, &mut |r| {
            records.push(r.clone())
        })
        .unwrap();
        assert!(out.success);
        assert_eq!(out.traps, vec![Some(5)]);
        assert_eq!(out.barriers, vec![Barrier::Finite(5)]);
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].path, vec![5, 4, 5, 4, 3, 2, 1, 0]);
        assert_eq!(
            records[0].flags,
            vec![false, false, true, false, false, false, false, false]
        );
    }

    #[test]
    fn sleepless_exploration_fails() {
        // Straight march to the origin with no sleep anywhere.
        let tapes = Scripted {
            slots: HashMap::new(),
            default_step: -1,
        };
        let mut eta = Configuration::new(1);
        eta.set(Site::line(4), SiteState::Active(1));
        let out = run_barrier_algorithm(&eta, &tapes, 0.3, 10, 1_000).unwrap();
        assert!(!out.success);
        assert_eq!(out.barriers, vec![Barrier::Infinite]);
        assert_eq!(out.traps, vec![None]);
    }

    #[test]
    fn escape_right_keeps_the_barrier() {
        let tapes = Scripted {
            slots: HashMap::new(),
            default_step: 1,
        };
        let mut eta = Configuration::new(1);
        eta.set(Site::line(3), SiteState::Active(1));
        let out = run_barrier_algorithm(&eta, &tapes, 0.5, 6, 1_000).unwrap();
        assert!(out.success);
        assert_eq!(out.barriers, vec![Barrier::Finite(0)]);
        assert_eq!(out.traps, vec![None]);
    }

    #[test]
    fn particle_on_the_barrier_fails() {
        let tapes = Scripted {
            slots: HashMap::new(),
            default_step: -1,
        };
        let mut eta = Configuration::new(1);
        eta.set(Site::ORIGIN, SiteState::Active(1));
        let out = run_barrier_algorithm(&eta, &tapes, 0.5, 5, 1_000).unwrap();
        assert!(!out.success);
    }

    #[test]
    fn rejects_bad_inputs() {
        let tapes = Scripted {
            slots: HashMap::new(),
            default_step: -1,
        };
        let mut eta = Configuration::new(1);
        eta.set(Site::line(2), SiteState::Sleeping);
        assert!(run_barrier_algorithm(&eta, &tapes, 0.5, 5, 1_000).is_err());
        let mut eta = Configuration::new(1);
        eta.set(Site::line(9), SiteState::Active(1));
        assert!(run_barrier_algorithm(&eta, &tapes, 0.5, 5, 1_000).is_err());
        let eta = Configuration::new(1);
        assert!(run_barrier_algorithm(&eta, &tapes, 0.7, 5, 1_000).is_err());
    }

    #[test]
    fn barrier_state_invariants_on_random_instances() {
        // Barriers non-decreasing while finite, failure absorbing, and
        // trap <= barrier <= start on every successful step; exploration
        // paths are nearest-neighbour with aligned flag lengths.
        let jumps = JumpDistribution::bias_1d(0.4).unwrap();
        for seed in 0..60u64 {
            let law = InitialLaw::poisson(0.3).unwrap();
            let region = interval_region(0, 60);
            let eta = sample_initial(&law, &region, hash64(seed, 1));
            let tapes = TapeStore::new(hash64(seed, 2), 0.8, &jumps).unwrap();
            let mut starts = Vec::new();
            let out = run_barrier_algorithm_recorded(&eta, &tapes, 0.4, 60, 10_000_000, &mut |r| {
                assert_eq!(r.path.len(), r.flags.len());
                assert_eq!(r.path[0], r.start);
                assert!(!*r.flags.last().unwrap());
                for w in r.path.windows(2) {
                    assert_eq!((w[0] - w[1]).abs(), 1, "non nearest-neighbour step");
                }
                starts.push(r.start);
            })
            .unwrap();

            let mut last_finite = 0i64;
            let mut seen_failure = false;
            let mut step = 0usize;
            for (b, t) in out.barriers.iter().zip(&out.traps) {
                match b {
                    Barrier::Infinite => seen_failure = true,
                    Barrier::Finite(a) => {
                        assert!(!seen_failure, "failure must be absorbing");
                        assert!(*a >= last_finite, "barriers must not decrease");
                        if let Some(trap) = t {
                            assert!(*trap <= *a, "trap beyond barrier");
                            assert!(*a <= starts[step], "barrier beyond start");
                        }
                        last_finite = *a;
                    }
                }
                if matches!(b, Barrier::Finite(_)) {
                    step += 1;
                }
            }
            assert_eq!(out.success, !seen_failure);
        }
    }

    #[test]
    fn success_implies_origin_untouched_by_the_engine() {
        // The key consequence: on success, full stabilization of [0, L]
        // with the very same tapes uses nothing at the origin.
        let jumps = JumpDistribution::bias_1d(0.4).unwrap();
        let law = InitialLaw::poisson(0.3).unwrap();
        let region = interval_region(0, 80);
        let mut successes = 0;
        for seed in 0..200u64 {
            let eta = sample_initial(&law, &region, hash64(seed, 3));
            let tapes = TapeStore::new(hash64(seed, 4), 1.0, &jumps).unwrap();
            let out = run_barrier_algorithm(&eta, &tapes, 0.4, 80, 10_000_000).unwrap();
            if !out.success {
                continue;
            }
            successes += 1;
            let stable = stabilize(&eta, &region, &tapes, TopplePolicy::Fifo, 100_000_000).unwrap();
            assert_eq!(stable.odometer.get(Site::ORIGIN), 0, "seed {seed}");
        }
        assert!(
            successes > 20,
            "expected a healthy success rate, got {successes}"
        );
    }
}
