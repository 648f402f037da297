//! The 2-D trapezoid construction with its coupled ghost process.
//!
//! A trapezoid `B_L` sits behind the drift: its long side `F` (length `4gL`)
//! lies on the line through the origin orthogonal to the drift, the short
//! side `D` (length `2gL`) sits at distance `L` behind it, and the slanted
//! sides `E` and `G` flare at slope `g` — the same slope as the forward cone
//! `C_g`, so any path from `z` in `B_L` that stays inside `z + C_g` can only
//! leave through `F`. Particles are moved one at a time, ordered so that
//! sites on lines closer to `F` come later, each until one of four events:
//!
//! 1. a sleep read at its start or in the ball-minus-cone collar,
//! 2. leaving the cone-plus-ball region around its start,
//! 3. arriving at a currently empty site strictly inside its cone,
//! 4. arriving at the inner boundary layer along `F`.
//!
//! Event 3 stops the real particle (it fills the hole) while its *ghost*
//! keeps walking under events 1, 2 and 4 without touching anything. The run
//! counts real arrivals at the origin (`G`), real-or-ghost arrivals (`W`),
//! ghost-only arrivals (`R = W - G`, exactly, by the coupling), and the
//! number `R~` of independent plain walks from initially empty sites that
//! hit the origin first — a stochastic upper bound for `R`.

use super::{invalid, ExperimentError, InitialLaw};
use crate::drift::{drift_vector, JumpDistribution};
use crate::lattice::{BoundingBox, Site};
use crate::rng::{hash3, hash64, Rng};
use serde::{Deserialize, Serialize};

/// Step cap for a single plain walk in the `R~` pass.
const RTILDE_STEP_CAP: u64 = 20_000_000;

/// Trapezoid, cone, and ball parameters tied to a drift direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidGeometry {
    l: i64,
    g: f64,
    ball_radius: i64,
    axis_u: [f64; 2],
    axis_v: [f64; 2],
}

impl TrapezoidGeometry {
    /// Validates the parameters against the drift of `p`. Each rejected
    /// inequality is named in the error.
    pub fn new(
        l: i64,
        g: f64,
        ball_radius: i64,
        p: &JumpDistribution,
    ) -> Result<Self, ExperimentError> {
        if p.dimension() != 2 {
            return Err(ExperimentError::InvalidGeometry(
                "jump distribution must be 2-dimensional".into(),
            ));
        }
        let m = drift_vector(p)?;
        if l < 1 {
            return Err(ExperimentError::InvalidGeometry(format!(
                "L >= 1 violated: L = {l}"
            )));
        }
        if !(g > 0.0) || !g.is_finite() {
            return Err(ExperimentError::InvalidGeometry(format!(
                "g > 0 violated: g = {g}"
            )));
        }
        if ball_radius < 1 {
            return Err(ExperimentError::InvalidGeometry(format!(
                "K >= 1 violated: K = {ball_radius}"
            )));
        }
        // The movable interior must be non-empty: the mid-axis site must sit
        // farther than K from D and from the slanted sides.
        if !(l as f64 / 2.0 > ball_radius as f64) {
            return Err(ExperimentError::InvalidGeometry(format!(
                "L/2 > K violated: L = {l}, K = {ball_radius}"
            )));
        }
        let slant_clearance = 1.5 * g * l as f64 / (1.0 + g * g).sqrt();
        if !(slant_clearance > ball_radius as f64) {
            return Err(ExperimentError::InvalidGeometry(format!(
                "3gL/(2*sqrt(1+g^2)) > K violated: lhs = {slant_clearance}, K = {ball_radius}"
            )));
        }
        let norm = (m[0] * m[0] + m[1] * m[1]).sqrt();
        let axis_u = [m[0] / norm, m[1] / norm];
        let axis_v = [-axis_u[1], axis_u[0]];
        Ok(TrapezoidGeometry {
            l,
            g,
            ball_radius,
            axis_u,
            axis_v,
        })
    }

    pub fn side_length(&self) -> i64 {
        self.l
    }

    pub fn flare(&self) -> f64 {
        self.g
    }

    pub fn ball_radius(&self) -> i64 {
        self.ball_radius
    }

    pub fn drift_axis(&self) -> [f64; 2] {
        self.axis_u
    }

    /// Coordinates along the drift (`a`) and across it (`b`).
    #[inline(always)]
    pub fn coords(&self, z: Site) -> (f64, f64) {
        (z.dot(self.axis_u), z.dot(self.axis_v))
    }

    /// Trapezoid membership (boundary inclusive).
    #[inline(always)]
    pub fn contains(&self, z: Site) -> bool {
        let (a, b) = self.coords(z);
        a >= -(self.l as f64) && a <= 0.0 && b.abs() <= 2.0 * self.g * self.l as f64 + self.g * a
    }

    /// Forward-cone membership of a relative displacement.
    #[inline(always)]
    pub fn in_cone(&self, w: Site) -> bool {
        let (a, b) = self.coords(w);
        a >= 0.0 && b.abs() <= self.g * a
    }

    /// Open-ball membership of a relative displacement.
    #[inline(always)]
    pub fn in_ball(&self, w: Site) -> bool {
        w.norm2() < self.ball_radius * self.ball_radius
    }

    fn point(&self, a: f64, b: f64) -> [f64; 2] {
        [
            a * self.axis_u[0] + b * self.axis_v[0],
            a * self.axis_u[1] + b * self.axis_v[1],
        ]
    }

    /// Euclidean distance from a site to the union of the sides D, E, G
    /// (the short side and the two slanted sides).
    pub fn distance_to_back_sides(&self, z: Site) -> f64 {
        let l = self.l as f64;
        let g = self.g;
        let d0 = self.point(-l, -g * l);
        let d1 = self.point(-l, g * l);
        let e1 = self.point(0.0, 2.0 * g * l);
        let g1 = self.point(0.0, -2.0 * g * l);
        let p = [z.x as f64, z.y as f64];
        segment_distance(p, d0, d1)
            .min(segment_distance(p, d1, e1))
            .min(segment_distance(p, d0, g1))
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let c = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt()
}

/// Counters from one trapezoid run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapezoidRun {
    /// Real particles whose stop site is the origin.
    pub g_hits: u64,
    /// Real-or-ghost walks whose final stop site is the origin.
    pub w_hits: u64,
    /// Ghost-only arrivals at the origin.
    pub r_hits: u64,
    /// Independent empty-site walks reaching the origin first.
    pub r_tilde: u64,
    /// Particles actually moved.
    pub moved: u64,
    /// Ghosts spawned (event-3 stops).
    pub ghosts: u64,
    /// Steps taken from a site outside the allowed cone-plus-ball region
    /// (must be zero; the walk stops on arrival there).
    pub confinement_violations: u64,
    /// `R~` walks cut off by the step cap (counted as misses).
    pub rtilde_capped: u64,
    /// Total particles in the sampled initial configuration.
    pub initial_particles: u64,
    /// Total occupancy after the run. Ghosts never touch the configuration,
    /// so this always equals `initial_particles`.
    pub final_particles: u64,
}

/// Precomputed site tables for a fixed geometry and jump distribution, so a
/// batch of runs shares the expensive enumeration and ordering.
pub struct TrapezoidPlan {
    geom: TrapezoidGeometry,
    jumps: JumpDistribution,
    bbox: BoundingBox,
    /// Inner boundary along F: can cross the F line in one jump.
    inner_front: Vec<bool>,
    /// Inner boundary on any side: can leave the trapezoid in one jump.
    inner_any: Vec<bool>,
    /// Farther than K from D, E and G: these particles get moved.
    movable: Vec<bool>,
    /// Farther than K from D only: eligible starts for the `R~` pass.
    rtilde_eligible: Vec<bool>,
    /// Trapezoid sites ordered back to front (lines closer to F later),
    /// lexicographic within a line.
    order: Vec<Site>,
}

impl TrapezoidPlan {
    pub fn new(geom: TrapezoidGeometry, p: &JumpDistribution) -> Result<Self, ExperimentError> {
        if p.dimension() != 2 {
            return Err(ExperimentError::InvalidGeometry(
                "jump distribution must be 2-dimensional".into(),
            ));
        }
        let l = geom.l as f64;
        let reach = (l * l + (2.0 * geom.g * l) * (2.0 * geom.g * l))
            .sqrt()
            .ceil() as i64
            + p.max_offset_norm()
            + 2;
        let bbox = BoundingBox {
            min: Site::new(-reach, -reach),
            max: Site::new(reach, reach),
        };
        let area = bbox.area() as usize;
        let mut members = Vec::new();
        for y in bbox.min.y..=bbox.max.y {
            for x in bbox.min.x..=bbox.max.x {
                let z = Site::new(x, y);
                if geom.contains(z) {
                    members.push(z);
                }
            }
        }
        let mut inner_front = vec![false; area];
        let mut inner_any = vec![false; area];
        let mut movable = vec![false; area];
        let mut rtilde_eligible = vec![false; area];
        let k = geom.ball_radius as f64;
        for &z in &members {
            let idx = bbox.index(z);
            for &(w, _) in p.support() {
                let t = z.offset(w);
                let (ta, _) = geom.coords(t);
                if ta > 0.0 {
                    inner_front[idx] = true;
                }
                if !geom.contains(t) {
                    inner_any[idx] = true;
                }
            }
            let back = geom.distance_to_back_sides(z);
            if back > k {
                movable[idx] = true;
            }
            // Distance to D alone for the R~ filter.
            let d0 = geom.point(-l, -geom.g * l);
            let d1 = geom.point(-l, geom.g * l);
            if segment_distance([z.x as f64, z.y as f64], d0, d1) > k {
                rtilde_eligible[idx] = true;
            }
        }
        // Back-to-front processing order: ascending drift coordinate, site
        // order within a line.
        let mut order = members;
        order.sort_by(|&p1, &p2| {
            let a1 = geom.coords(p1).0;
            let a2 = geom.coords(p2).0;
            a1.partial_cmp(&a2).unwrap().then_with(|| p1.cmp(&p2))
        });
        Ok(TrapezoidPlan {
            geom,
            jumps: p.clone(),
            bbox,
            inner_front,
            inner_any,
            movable,
            rtilde_eligible,
            order,
        })
    }

    pub fn site_count(&self) -> usize {
        self.order.len()
    }

    pub fn geometry(&self) -> &TrapezoidGeometry {
        &self.geom
    }

    #[inline(always)]
    fn mask(&self, mask: &[bool], z: Site) -> bool {
        self.bbox.contains(z) && mask[self.bbox.index(z)]
    }

    /// One seeded run. Initial occupancy is sampled per site exactly as
    /// [`super::sample_initial`] would.
    pub fn run(
        &self,
        law: &InitialLaw,
        lambda: f64,
        seed: u64,
    ) -> Result<TrapezoidRun, ExperimentError> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(invalid(
                "lambda",
                format!("must be >= 0 and finite, got {lambda}"),
            ));
        }
        let sleep_p = lambda / (1.0 + lambda);
        let area = self.bbox.area() as usize;
        let mut occupancy = vec![0i64; area];
        let mut initial = vec![0u32; area];
        let init_seed = hash64(seed, 0x11);
        let mut total_particles = 0u64;
        for &z in &self.order {
            let mut site_rng = Rng::new(hash3(init_seed, z.x as u64, z.y as u64, 0xA11CE));
            let count = law.sample_count(&mut site_rng);
            if count > 0 {
                let idx = self.bbox.index(z);
                occupancy[idx] = count as i64;
                initial[idx] = count;
                total_particles += count as u64;
            }
        }

        let mut rng = Rng::new(hash64(seed, 0x22));
        let mut run = TrapezoidRun {
            initial_particles: total_particles,
            ..Default::default()
        };

        for &z in &self.order {
            let idx = self.bbox.index(z);
            if !self.movable[idx] {
                continue;
            }
            for _ in 0..initial[idx] {
                occupancy[self.bbox.index(z)] -= 1;
                run.moved += 1;
                let (stop, was_ghost) =
                    self.walk_particle(z, sleep_p, &mut occupancy, &mut rng, &mut run);
                if !was_ghost {
                    occupancy[self.bbox.index(stop)] += 1;
                }
                if stop == Site::ORIGIN {
                    run.w_hits += 1;
                    if was_ghost {
                        run.r_hits += 1;
                    } else {
                        run.g_hits += 1;
                    }
                }
            }
        }

        run.final_particles = occupancy.iter().map(|&c| c.max(0) as u64).sum();

        // Independent plain walks from every initially empty site far enough
        // from D; they stop at the first inner-boundary site on any side.
        for &z in &self.order {
            let idx = self.bbox.index(z);
            if initial[idx] != 0 || !self.rtilde_eligible[idx] {
                continue;
            }
            let mut s = z;
            let mut steps = 0u64;
            loop {
                if self.mask(&self.inner_any, s) {
                    if s == Site::ORIGIN {
                        run.r_tilde += 1;
                    }
                    break;
                }
                if steps >= RTILDE_STEP_CAP {
                    run.rtilde_capped += 1;
                    break;
                }
                s = s.offset(self.jumps.sample(&mut rng));
                steps += 1;
            }
        }
        Ok(run)
    }

    /// Moves one particle from `z` until a stopping event; on an event-3
    /// stop the real particle fills the hole and the ghost keeps going.
    /// Returns the final stop site and whether it was reached as a ghost.
    fn walk_particle(
        &self,
        z: Site,
        sleep_p: f64,
        occupancy: &mut [i64],
        rng: &mut Rng,
        run: &mut TrapezoidRun,
    ) -> (Site, bool) {
        let mut s = z;
        let mut is_ghost = false;
        let mut first = true;
        loop {
            // Event 4: the inner boundary along F absorbs on arrival.
            if self.mask(&self.inner_front, s) {
                return (s, is_ghost);
            }
            let rel = Site::new(s.x - z.x, s.y - z.y);
            let in_cone = self.geom.in_cone(rel);
            let in_ball = self.geom.in_ball(rel);
            // Event 2: left the allowed region around the start.
            if !in_cone && !in_ball {
                return (s, is_ghost);
            }
            // Event 3 (real particles only): an empty site strictly inside
            // the cone is filled, and the ghost walks on.
            if !is_ghost
                && !first
                && in_cone
                && s != z
                && self.bbox.contains(s)
                && occupancy[self.bbox.index(s)] == 0
            {
                occupancy[self.bbox.index(s)] += 1;
                is_ghost = true;
                run.ghosts += 1;
            }
            // Event 1: a sleep read at the start site or in the collar.
            let marked = rng.bernoulli(sleep_p);
            if marked && (s == z || (in_ball && !in_cone)) {
                return (s, is_ghost);
            }
            if !in_cone && !in_ball {
                run.confinement_violations += 1;
            }
            s = s.offset(self.jumps.sample(rng));
            first = false;
        }
    }

    /// Per-line forward-confinement estimates: entry `i` estimates the
    /// probability that a sleeping walk from the origin stays in the
    /// cone-plus-ball region, with no sleep read at the origin or in the
    /// collar, until its drift coordinate first reaches `thresholds[i]`.
    pub fn layer_hit_estimates(
        &self,
        lambda: f64,
        thresholds: &[f64],
        trials: u64,
        seed: u64,
    ) -> Result<Vec<f64>, ExperimentError> {
        if thresholds.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("thresholds", "must be non-decreasing"));
        }
        let sleep_p = lambda / (1.0 + lambda);
        let mut hits = vec![0u64; thresholds.len()];
        for t in 0..trials {
            let mut rng = Rng::new(hash3(seed, t, 0, 0xF1));
            let mut s = Site::ORIGIN;
            let mut next = 0usize;
            loop {
                let (a, _) = self.geom.coords(s);
                while next < thresholds.len() && a >= thresholds[next] {
                    hits[next] += 1;
                    next += 1;
                }
                if next == thresholds.len() {
                    break;
                }
                let in_cone = self.geom.in_cone(s);
                let in_ball = self.geom.in_ball(s);
                if !in_cone && !in_ball {
                    break;
                }
                let marked = rng.bernoulli(sleep_p);
                if marked && (s == Site::ORIGIN || (in_ball && !in_cone)) {
                    break;
                }
                s = s.offset(self.jumps.sample(&mut rng));
            }
        }
        Ok(hits.iter().map(|&h| h as f64 / trials as f64).collect())
    }
}

/// Convenience wrapper: builds the plan and performs one run.
pub fn trapezoid_stabilize(
    law: &InitialLaw,
    lambda: f64,
    p: &JumpDistribution,
    geom: &TrapezoidGeometry,
    seed: u64,
) -> Result<TrapezoidRun, ExperimentError> {
    let plan = TrapezoidPlan::new(geom.clone(), p)?;
    plan.run(law, lambda, seed)
}

/// Pilot Monte Carlo for the ball radius: the smallest `K` such that a plain
/// walk from the origin stays inside the cone-plus-ball region for a long
/// drift-scaled horizon with probability above one half.
pub fn choose_ball_radius(p: &JumpDistribution, g: f64, seed: u64) -> Result<i64, ExperimentError> {
    let m = drift_vector(p)?;
    let speed = (m[0] * m[0] + m[1] * m[1]).sqrt();
    let norm = [m[0] / speed, m[1] / speed];
    let perp = [-norm[1], norm[0]];
    let trials = 2_000u64;
    for k in 1..=256i64 {
        let horizon = ((2 * k + 100) as f64 * 3.0 / speed).ceil() as u64;
        let mut stayed = 0u64;
        for t in 0..trials {
            let mut rng = Rng::new(hash3(seed, k as u64, t, 0xB0));
            let mut s = Site::ORIGIN;
            let mut ok = true;
            for _ in 0..horizon {
                let a = s.dot(norm);
                let b = s.dot(perp);
                let in_cone = a >= 0.0 && b.abs() <= g * a;
                let in_ball = s.norm2() < k * k;
                if !in_cone && !in_ball {
                    ok = false;
                    break;
                }
                s = s.offset(p.sample(&mut rng));
            }
            stayed += u64::from(ok);
        }
        if stayed as f64 / trials as f64 > 0.5 {
            return Ok(k);
        }
    }
    Err(ExperimentError::InvalidGeometry(
        "no ball radius up to 256 confines the walk; the drift may be too weak for g".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::stats::mean_and_se;

    fn biased_2d() -> JumpDistribution {
        JumpDistribution::new(
            2,
            vec![
                (Site::new(1, 0), 0.4),
                (Site::new(-1, 0), 0.1),
                (Site::new(0, 1), 0.25),
                (Site::new(0, -1), 0.25),
            ],
        )
        .unwrap()
    }

    #[test]
    fn geometry_membership() {
        let p = biased_2d();
        let geom = TrapezoidGeometry::new(20, 2.0, 4, &p).unwrap();
        // Drift is +x, so the trapezoid occupies -20 <= x <= 0.
        assert!(geom.contains(Site::new(0, 0)));
        assert!(geom.contains(Site::new(-20, 0)));
        assert!(!geom.contains(Site::new(1, 0)));
        assert!(!geom.contains(Site::new(-21, 0)));
        // Width 2gL at D, 4gL at F.
        assert!(geom.contains(Site::new(-20, 40)));
        assert!(!geom.contains(Site::new(-20, 41)));
        assert!(geom.contains(Site::new(0, 80)));
        assert!(!geom.contains(Site::new(0, 81)));
        // Cone: |b| <= g a for a relative displacement.
        assert!(geom.in_cone(Site::new(5, 10)));
        assert!(!geom.in_cone(Site::new(5, 11)));
        assert!(!geom.in_cone(Site::new(-1, 0)));
        // Ball is open.
        assert!(geom.in_ball(Site::new(3, 0)));
        assert!(!geom.in_ball(Site::new(4, 0)));
    }

    #[test]
    fn geometry_errors_name_the_violated_inequality() {
        let p = biased_2d();
        let err = TrapezoidGeometry::new(6, 2.0, 4, &p).unwrap_err();
        assert!(err.to_string().contains("L/2 > K"), "{err}");
        let err = TrapezoidGeometry::new(0, 2.0, 1, &p).unwrap_err();
        assert!(err.to_string().contains("L >= 1"), "{err}");
        let sym = JumpDistribution::new(
            2,
            vec![
                (Site::new(1, 0), 0.25),
                (Site::new(-1, 0), 0.25),
                (Site::new(0, 1), 0.25),
                (Site::new(0, -1), 0.25),
            ],
        )
        .unwrap();
        assert!(TrapezoidGeometry::new(20, 2.0, 4, &sym).is_err());
    }

    #[test]
    fn empty_law_yields_all_zero_counts() {
        let p = biased_2d();
        let geom = TrapezoidGeometry::new(20, 2.0, 4, &p).unwrap();
        let law = InitialLaw::bernoulli(0.0).unwrap();
        let run = trapezoid_stabilize(&law, 1.0, &p, &geom, 3).unwrap();
        assert_eq!(run.g_hits, 0);
        assert_eq!(run.w_hits, 0);
        assert_eq!(run.r_hits, 0);
        assert_eq!(run.moved, 0);
        // With no particles, every eligible site launches an independent
        // walk; at most one per inner-boundary line ends at the origin on
        // average, so the count stays far below the site count.
        assert!(run.r_tilde <= geom.side_length() as u64 * 2);
    }

    #[test]
    fn coupling_identity_and_confinement() {
        let p = biased_2d();
        let geom = TrapezoidGeometry::new(24, 2.0, 5, &p).unwrap();
        let plan = TrapezoidPlan::new(geom, &p).unwrap();
        let law = InitialLaw::bernoulli(0.3).unwrap();
        for seed in 0..25u64 {
            let run = plan.run(&law, 1.0, seed).unwrap();
            assert_eq!(run.g_hits, run.w_hits - run.r_hits, "seed {seed}");
            assert_eq!(run.confinement_violations, 0);
            assert_eq!(run.rtilde_capped, 0);
        }
    }

    #[test]
    fn ghost_walks_leave_the_configuration_alone() {
        // Ghosts never edit occupancy, so the particle count is conserved
        // through any number of event-3 transitions.
        let p = biased_2d();
        let geom = TrapezoidGeometry::new(24, 2.0, 5, &p).unwrap();
        let plan = TrapezoidPlan::new(geom, &p).unwrap();
        let law = InitialLaw::poisson(0.4).unwrap();
        for seed in 90..110u64 {
            let run = plan.run(&law, 0.8, seed).unwrap();
            assert_eq!(run.final_particles, run.initial_particles, "seed {seed}");
            assert!(run.ghosts >= run.r_hits);
            assert!(run.moved <= run.initial_particles);
        }
    }

    #[test]
    fn rtilde_dominates_r_on_average() {
        let p = biased_2d();
        let geom = TrapezoidGeometry::new(24, 2.0, 5, &p).unwrap();
        let plan = TrapezoidPlan::new(geom, &p).unwrap();
        let law = InitialLaw::bernoulli(0.3).unwrap();
        let runs: Vec<TrapezoidRun> = (0..60)
            .map(|s| plan.run(&law, 1.0, 1_000 + s).unwrap())
            .collect();
        let r: Vec<f64> = runs.iter().map(|r| r.r_hits as f64).collect();
        let rt: Vec<f64> = runs.iter().map(|r| r.r_tilde as f64).collect();
        let (mr, ser) = mean_and_se(&r);
        let (mrt, sert) = mean_and_se(&rt);
        let se = (ser * ser + sert * sert).sqrt();
        assert!(
            mrt >= mr - 1.96 * se,
            "mean R~ {mrt} vs mean R {mr} (se {se})"
        );
    }

    #[test]
    fn expected_w_matches_layer_sums() {
        // E[W] = mu * sum_i F^i over the lines far enough from D: checked
        // against the plan's own per-line confinement estimates.
        let p = biased_2d();
        let geom = TrapezoidGeometry::new(30, 2.0, 4, &p).unwrap();
        let plan = TrapezoidPlan::new(geom, &p).unwrap();
        let mu = 0.3;
        let law = InitialLaw::bernoulli(mu).unwrap();
        let lambda = 1.0;
        let runs: Vec<f64> = (0..400)
            .map(|s| plan.run(&law, lambda, 40_000 + s).unwrap().w_hits as f64)
            .collect();
        let (w_mean, w_se) = mean_and_se(&runs);

        // Drift is along +x and jumps are nearest-neighbour, so the lines
        // are x = -i with unit spacing; movable lines keep distance > K
        // from D at x = -30.
        let i_max = 30 - 4 - 1;
        let thresholds: Vec<f64> = (1..=i_max).map(|i| i as f64).collect();
        let f_hat = plan
            .layer_hit_estimates(lambda, &thresholds, 60_000, 7)
            .unwrap();
        let predicted = mu * (1.0 + f_hat.iter().sum::<f64>());
        let tol = (4.0 * w_se).max(0.08 * predicted);
        assert!(
            (w_mean - predicted).abs() < tol,
            "mean W {w_mean} vs predicted {predicted} (tol {tol})"
        );
    }

    #[test]
    fn runs_are_deterministic() {
        let p = biased_2d();
        let geom = TrapezoidGeometry::new(20, 2.0, 4, &p).unwrap();
        let plan = TrapezoidPlan::new(geom.clone(), &p).unwrap();
        let law = InitialLaw::bernoulli(0.25).unwrap();
        let a = plan.run(&law, 0.5, 42).unwrap();
        let b = plan.run(&law, 0.5, 42).unwrap();
        assert_eq!(a, b);
        let c = trapezoid_stabilize(&law, 0.5, &p, &geom, 42).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn pilot_ball_radius_is_small_for_wide_cones() {
        let p = biased_2d();
        let k = choose_ball_radius(&p, 4.0, 5).unwrap();
        assert!((1..=64).contains(&k), "k = {k}");
    }
}
