//! Per-site instruction tapes.
//!
//! Every site carries an infinite i.i.d. sequence of instructions: move by an
//! offset `z` with probability `p(z)/(1+lambda)` or sleep with probability
//! `lambda/(1+lambda)`. Slot `j` at site `x` is a pure function of
//! `(seed, x, j)`, so different topple orders — and different runs — can
//! re-read the same tape without storing it. A neutral instruction never
//! comes out of sampling; it exists only through the enforced-activation
//! view, which rewrites a chosen subset of sleep slots.

use super::EngineError;
use crate::drift::JumpDistribution;
use crate::lattice::Site;
use crate::rng::{hash3, to_unit_f64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    /// Move one particle by the given offset.
    Move(Site),
    /// Try to put the particle to sleep.
    Sleep,
    /// Do nothing (only via explicit sleep replacement).
    Neutral,
}

/// Anything that can serve instructions to the toppling engine.
pub trait InstructionSource {
    fn instruction(&self, site: Site, index: u64) -> Instruction;
}

impl<S: InstructionSource + ?Sized> InstructionSource for &S {
    fn instruction(&self, site: Site, index: u64) -> Instruction {
        (**self).instruction(site, index)
    }
}

/// The lazily materialized instruction array.
#[derive(Clone, Debug)]
pub struct TapeStore {
    seed: u64,
    lambda: f64,
    jumps: JumpDistribution,
    sleep_threshold: f64,
    // Cumulative thresholds over [sleep | moves...] in support order.
    move_thresholds: Vec<f64>,
}

impl TapeStore {
    /// `lambda = 0` is allowed: such tapes simply never sleep.
    pub fn new(seed: u64, lambda: f64, jumps: &JumpDistribution) -> Result<Self, EngineError> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(EngineError::InvalidLambda(lambda));
        }
        let sleep_threshold = lambda / (1.0 + lambda);
        let scale = 1.0 / (1.0 + lambda);
        let mut move_thresholds = Vec::with_capacity(jumps.support().len());
        let mut acc = sleep_threshold;
        for &(_, p) in jumps.support() {
            acc += p * scale;
            move_thresholds.push(acc);
        }
        Ok(TapeStore {
            seed,
            lambda,
            jumps: jumps.clone(),
            sleep_threshold,
            move_thresholds,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn jumps(&self) -> &JumpDistribution {
        &self.jumps
    }

    pub fn sleep_probability(&self) -> f64 {
        self.sleep_threshold
    }

    /// Sequential reader for one site's tape.
    pub fn tape(&self, site: Site) -> InstructionTape<'_> {
        InstructionTape {
            store: self,
            site,
            cursor: 0,
        }
    }

    /// View in which every sleep slot selected by `selector(site, index)`
    /// reads as neutral. Odometers can only grow under such a view.
    pub fn enforce_activation<F>(&self, selector: F) -> EnforcedActivation<'_, F>
    where
        F: Fn(Site, u64) -> bool,
    {
        EnforcedActivation {
            store: self,
            selector,
        }
    }
}

impl InstructionSource for TapeStore {
    #[inline]
    fn instruction(&self, site: Site, index: u64) -> Instruction {
        let word = hash3(self.seed, site.x as u64, site.y as u64, index);
        let u = to_unit_f64(word);
        if u < self.sleep_threshold {
            return Instruction::Sleep;
        }
        for (i, &t) in self.move_thresholds.iter().enumerate() {
            if u < t {
                return Instruction::Move(self.jumps.support()[i].0);
            }
        }
        Instruction::Move(self.jumps.support()[self.jumps.support().len() - 1].0)
    }
}

/// Cursor over one site's tape; `read` consumes slots in index order.
#[derive(Clone, Debug)]
pub struct InstructionTape<'a> {
    store: &'a TapeStore,
    site: Site,
    cursor: u64,
}

impl InstructionTape<'_> {
    pub fn site(&self) -> Site {
        self.site
    }

    /// Number of slots consumed so far.
    pub fn used(&self) -> u64 {
        self.cursor
    }

    /// Re-reads any slot without touching the cursor.
    pub fn peek(&self, index: u64) -> Instruction {
        self.store.instruction(self.site, index)
    }

    pub fn read(&mut self) -> Instruction {
        let ins = self.store.instruction(self.site, self.cursor);
        self.cursor += 1;
        ins
    }
}

/// Sleep-to-neutral rewriting view (the enforced-activation order on tapes).
#[derive(Clone, Debug)]
pub struct EnforcedActivation<'a, F> {
    store: &'a TapeStore,
    selector: F,
}

impl<F> InstructionSource for EnforcedActivation<'_, F>
where
    F: Fn(Site, u64) -> bool,
{
    #[inline]
    fn instruction(&self, site: Site, index: u64) -> Instruction {
        match self.store.instruction(site, index) {
            Instruction::Sleep if (self.selector)(site, index) => Instruction::Neutral,
            other => other,
        }
    }
}

pub mod testing {
    //! Deliberately broken sources for negative controls.

    use super::{Instruction, InstructionSource, TapeStore};
    use crate::lattice::Site;
    use std::sync::atomic::{AtomicU64, Ordering};

    /// Wraps a tape store but mutates its answers every few calls, breaking
    /// the purity that the order-independence contract relies on. Used by
    /// the verification harness to prove the abelian check can fail.
    pub struct CorruptTapes<'a> {
        inner: &'a TapeStore,
        calls: AtomicU64,
    }

    impl<'a> CorruptTapes<'a> {
        pub fn new(inner: &'a TapeStore) -> Self {
            CorruptTapes {
                inner,
                calls: AtomicU64::new(0),
            }
        }
    }

    impl InstructionSource for CorruptTapes<'_> {
        fn instruction(&self, site: Site, index: u64) -> Instruction {
            let n = self.calls.fetch_add(1, Ordering::Relaxed);
            let ins = self.inner.instruction(site, index);
            if n % 7 == 3 {
                // Flip sleeps and first-offset moves depending on call count.
                return match ins {
                    Instruction::Sleep => Instruction::Move(self.inner.jumps().support()[0].0),
                    _ => Instruction::Sleep,
                };
            }
            ins
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::JumpDistribution;

    fn store(seed: u64, lambda: f64, q: f64) -> TapeStore {
        TapeStore::new(seed, lambda, &JumpDistribution::bias_1d(q).unwrap()).unwrap()
    }

    #[test]
    fn rereading_a_slot_is_stable() {
        let tapes = store(42, 0.5, 0.3);
        let site = Site::line(-3);
        for j in 0..200 {
            assert_eq!(tapes.instruction(site, j), tapes.instruction(site, j));
        }
        let mut t1 = tapes.tape(site);
        let first: Vec<_> = (0..50).map(|_| t1.read()).collect();
        let mut t2 = tapes.tape(site);
        let second: Vec<_> = (0..50).map(|_| t2.read()).collect();
        assert_eq!(first, second);
    }

    #[test]
    fn sampling_never_yields_neutral() {
        let tapes = store(9, 1.0, 0.5);
        for j in 0..10_000 {
            assert_ne!(tapes.instruction(Site::line(0), j), Instruction::Neutral);
        }
    }

    #[test]
    fn sleep_frequency_matches_the_law() {
        // Empirical sleep rate within 4 standard errors at N = 1e5.
        for lambda in [0.25, 1.0, 4.0] {
            let tapes = store(7, lambda, 0.5);
            let n = 100_000u64;
            let sleeps = (0..n)
                .filter(|&j| tapes.instruction(Site::line(5), j) == Instruction::Sleep)
                .count() as f64;
            let p = lambda / (1.0 + lambda);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (sleeps / n as f64 - p).abs() < 4.0 * se,
                "lambda={lambda}: freq {} vs {p}",
                sleeps / n as f64
            );
        }
    }

    #[test]
    fn move_offsets_stay_in_support() {
        let jumps = JumpDistribution::new(
            2,
            vec![
                (Site::new(1, 0), 0.5),
                (Site::new(0, 1), 0.2),
                (Site::new(0, -1), 0.3),
            ],
        )
        .unwrap();
        let tapes = TapeStore::new(3, 0.2, &jumps).unwrap();
        let allowed: Vec<Site> = jumps.support().iter().map(|&(z, _)| z).collect();
        for j in 0..5_000 {
            match tapes.instruction(Site::new(2, -1), j) {
                Instruction::Move(z) => assert!(allowed.contains(&z)),
                Instruction::Sleep => {}
                Instruction::Neutral => panic!("neutral out of sampling"),
            }
        }
    }

    #[test]
    fn lambda_zero_never_sleeps() {
        let tapes = store(11, 0.0, 0.5);
        for j in 0..20_000 {
            assert_ne!(tapes.instruction(Site::line(1), j), Instruction::Sleep);
        }
    }

    #[test]
    fn empty_selection_view_is_identity() {
        let tapes = store(5, 0.7, 0.4);
        let view = tapes.enforce_activation(|_, _| false);
        for j in 0..1_000 {
            assert_eq!(
                view.instruction(Site::line(2), j),
                tapes.instruction(Site::line(2), j)
            );
        }
    }

    #[test]
    fn full_selection_view_has_no_sleeps() {
        let tapes = store(5, 0.7, 0.4);
        let view = tapes.enforce_activation(|_, _| true);
        for j in 0..5_000 {
            let ins = view.instruction(Site::line(2), j);
            assert_ne!(ins, Instruction::Sleep);
            match tapes.instruction(Site::line(2), j) {
                Instruction::Sleep => assert_eq!(ins, Instruction::Neutral),
                other => assert_eq!(ins, other),
            }
        }
    }
}
