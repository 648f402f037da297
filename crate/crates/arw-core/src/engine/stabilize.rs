//! The toppling operator and region stabilization.

use super::config::{Configuration, Odometer};
use super::state::SiteState;
use super::tape::{Instruction, InstructionSource};
use super::EngineError;
use crate::lattice::{BoundingBox, Site};
use crate::rng::Rng;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Default cap on the number of instruction uses in one stabilization run.
/// Termination is almost sure but has no deterministic bound, so runs fail
/// loudly instead of looping.
pub const DEFAULT_TOPPLE_BUDGET: u64 = 1_000_000_000;

/// Order in which unstable sites are chosen. Any legal order yields the same
/// odometer and final configuration; the seeded random policy exists to
/// exercise exactly that.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopplePolicy {
    /// FIFO queue, seeded with the region's unstable sites in lexicographic
    /// order; a popped site is toppled until it momentarily stabilizes.
    Fifo,
    /// Topple one instruction at a uniformly random unstable site each step.
    Random { seed: u64 },
}

/// Uses the next unused instruction at `x`: moves a particle, tries to put
/// one to sleep, or does nothing for a neutral slot. Exactly one tape slot is
/// consumed. Toppling a stable site is illegal and leaves nothing changed.
pub fn topple(
    config: &mut Configuration,
    odometer: &mut Odometer,
    tapes: &impl InstructionSource,
    x: Site,
) -> Result<(), EngineError> {
    let state = config.get(x);
    if !state.is_unstable() {
        return Err(EngineError::IllegalTopple { site: x });
    }
    let instruction = tapes.instruction(x, odometer.get(x));
    match instruction {
        Instruction::Sleep => {
            config.set(x, state.sleep_transform()?);
        }
        Instruction::Move(dz) => {
            let k = match state {
                SiteState::Active(k) => k,
                _ => unreachable!("unstable site must be active"),
            };
            let departed = if k == 1 {
                SiteState::Empty
            } else {
                SiteState::Active(k - 1)
            };
            config.set(x, departed);
            config.add_particle_at(x.offset(dz));
        }
        Instruction::Neutral => {}
    }
    odometer.increment(x);
    Ok(())
}

/// Result of stabilizing a region.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizeOutcome {
    pub odometer: Odometer,
    pub config: Configuration,
    pub topples: u64,
}

/// Topples legally until no site of `region` holds an active particle.
///
/// Particles may leave the region and come to rest outside it; such sites
/// are never toppled. The returned odometer equals the tape cursor at every
/// site and, by order independence, does not depend on `policy`.
pub fn stabilize(
    config: &Configuration,
    region: &BTreeSet<Site>,
    tapes: &impl InstructionSource,
    policy: TopplePolicy,
    budget: u64,
) -> Result<StabilizeOutcome, EngineError> {
    let mut scratch = DenseScratch::new(config, region);
    let topples = match policy {
        TopplePolicy::Fifo => scratch.run_fifo(tapes, budget)?,
        TopplePolicy::Random { seed } => scratch.run_random(tapes, budget, seed)?,
    };
    Ok(scratch.into_outcome(config.dimension(), topples))
}

/// Dense working grid over the bounding box of the region and the initial
/// particle support. Particles thrown beyond the box (large jump offsets)
/// spill into a sparse overflow map; they are outside the region and inert.
struct DenseScratch {
    bbox: BoundingBox,
    cells: Vec<i64>,
    in_region: Vec<bool>,
    used: Vec<u64>,
    overflow: BTreeMap<Site, i64>,
}

impl DenseScratch {
    fn new(config: &Configuration, region: &BTreeSet<Site>) -> Self {
        let mut bbox = BoundingBox {
            min: Site::ORIGIN,
            max: Site::ORIGIN,
        };
        let mut any = false;
        if let Some(bb) = BoundingBox::of(region.iter().copied()) {
            bbox = bb;
            any = true;
        }
        if let Some(bb) = config.bounding_box() {
            bbox = if any { bbox.merge(bb) } else { bb };
        }
        let area = bbox.area() as usize;
        let mut cells = vec![0i64; area];
        let mut in_region = vec![false; area];
        let used = vec![0u64; area];
        for (site, state) in config.occupied() {
            cells[bbox.index(site)] = state.to_cell();
        }
        for &site in region {
            in_region[bbox.index(site)] = true;
        }
        DenseScratch {
            bbox,
            cells,
            in_region,
            used,
            overflow: BTreeMap::new(),
        }
    }

    #[inline(always)]
    fn arrival(&mut self, dest: Site) -> Option<usize> {
        if self.bbox.contains(dest) {
            let idx = self.bbox.index(dest);
            let c = self.cells[idx];
            self.cells[idx] = if c == -1 { 2 } else { c + 1 };
            Some(idx)
        } else {
            let c = self.overflow.entry(dest).or_insert(0);
            *c = if *c == -1 { 2 } else { *c + 1 };
            None
        }
    }

    /// One instruction use at an unstable cell. Returns the index a particle
    /// arrived at inside the box, if any.
    #[inline(always)]
    fn topple_cell(&mut self, idx: usize, tapes: &impl InstructionSource) -> Option<usize> {
        let site = self.bbox.site_at(idx);
        let instruction = tapes.instruction(site, self.used[idx]);
        self.used[idx] += 1;
        match instruction {
            Instruction::Sleep => {
                if self.cells[idx] == 1 {
                    self.cells[idx] = -1;
                }
                None
            }
            Instruction::Neutral => None,
            Instruction::Move(dz) => {
                self.cells[idx] -= 1;
                self.arrival(site.offset(dz))
            }
        }
    }

    fn run_fifo(
        &mut self,
        tapes: &impl InstructionSource,
        budget: u64,
    ) -> Result<u64, EngineError> {
        let mut queued = vec![false; self.cells.len()];
        let mut queue = VecDeque::new();
        // Initial unstable sites in lexicographic order. The bbox scan order
        // is row-major (y, then x); collect and sort by site order.
        let mut initial: Vec<Site> = (0..self.cells.len())
            .filter(|&i| self.in_region[i] && self.cells[i] >= 1)
            .map(|i| self.bbox.site_at(i))
            .collect();
        initial.sort();
        for site in initial {
            let idx = self.bbox.index(site);
            queued[idx] = true;
            queue.push_back(idx);
        }
        let mut topples = 0u64;
        while let Some(idx) = queue.pop_front() {
            queued[idx] = false;
            while self.cells[idx] >= 1 {
                if topples == budget {
                    return Err(EngineError::BudgetExceeded { budget });
                }
                topples += 1;
                if let Some(dest) = self.topple_cell(idx, tapes) {
                    if dest != idx && self.in_region[dest] && self.cells[dest] >= 1 && !queued[dest]
                    {
                        queued[dest] = true;
                        queue.push_back(dest);
                    }
                }
            }
        }
        Ok(topples)
    }

    fn run_random(
        &mut self,
        tapes: &impl InstructionSource,
        budget: u64,
        seed: u64,
    ) -> Result<u64, EngineError> {
        let mut rng = Rng::new(seed);
        const NOT_LISTED: u32 = u32::MAX;
        let mut position = vec![NOT_LISTED; self.cells.len()];
        let mut unstable: Vec<usize> = Vec::new();
        let mut listed: Vec<Site> = (0..self.cells.len())
            .filter(|&i| self.in_region[i] && self.cells[i] >= 1)
            .map(|i| self.bbox.site_at(i))
            .collect();
        listed.sort();
        for site in listed {
            let idx = self.bbox.index(site);
            position[idx] = unstable.len() as u32;
            unstable.push(idx);
        }
        let mut topples = 0u64;
        while !unstable.is_empty() {
            if topples == budget {
                return Err(EngineError::BudgetExceeded { budget });
            }
            topples += 1;
            let pick = rng.below(unstable.len() as u64) as usize;
            let idx = unstable[pick];
            let dest = self.topple_cell(idx, tapes);
            if self.cells[idx] < 1 {
                let last = unstable.len() - 1;
                unstable.swap(pick, last);
                position[unstable[pick]] = pick as u32;
                unstable.pop();
                position[idx] = NOT_LISTED;
            }
            if let Some(d) = dest {
                if self.in_region[d] && self.cells[d] >= 1 && position[d] == NOT_LISTED {
                    position[d] = unstable.len() as u32;
                    unstable.push(d);
                }
            }
        }
        Ok(topples)
    }

    fn into_outcome(self, dimension: u8, topples: u64) -> StabilizeOutcome {
        let mut config = Configuration::new(dimension);
        for (idx, &c) in self.cells.iter().enumerate() {
            if c != 0 {
                config.set(self.bbox.site_at(idx), SiteState::from_cell(c));
            }
        }
        for (&site, &c) in &self.overflow {
            if c != 0 {
                config.set(site, SiteState::from_cell(c));
            }
        }
        let mut odometer = Odometer::new();
        for (idx, &h) in self.used.iter().enumerate() {
            if h > 0 {
                odometer.set(self.bbox.site_at(idx), h);
            }
        }
        StabilizeOutcome {
            odometer,
            config,
            topples,
        }
    }
}

/// Convenience: the sites of the 1-D interval `[-l, l]` (or `[lo, hi]`).
pub fn interval_region(lo: i64, hi: i64) -> BTreeSet<Site> {
    (lo..=hi).map(Site::line).collect()
}

/// Convenience: the sites of the 2-D box `[lo, hi]^2`.
pub fn box_region(lo: i64, hi: i64) -> BTreeSet<Site> {
    let mut set = BTreeSet::new();
    for x in lo..=hi {
        for y in lo..=hi {
            set.insert(Site::new(x, y));
        }
    }
    set
}
