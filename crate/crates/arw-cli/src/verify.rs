//! The randomized contract suite behind `arw verify`.
//!
//! Each property runs a batch of seeded instances and reports a pass/fail
//! line with its trial count. On failure the line carries a minimal
//! reproducer: the property name, the instance index, and the master seed.

use arw_core::bounds::{conditional_passage_gf, passage_gf_dp};
use arw_core::drift::JumpDistribution;
use arw_core::engine::testing::CorruptTapes;
use arw_core::engine::{
    box_region, interval_region, stabilize, topple, Configuration, InstructionSource, Odometer,
    TapeStore, TopplePolicy, DEFAULT_TOPPLE_BUDGET,
};
use arw_core::experiments::{sample_initial, InitialLaw};
use arw_core::lattice::Site;
use arw_core::rng::{hash3, hash64, Rng};
use std::collections::BTreeSet;
use std::fmt::Write;

pub struct SuiteReport {
    pub text: String,
    pub all_passed: bool,
}

struct Outcome {
    name: &'static str,
    trials: u64,
    failure: Option<String>,
}

struct Instance {
    config: Configuration,
    region: BTreeSet<Site>,
    larger_region: BTreeSet<Site>,
    tapes: TapeStore,
}

fn build_instance(seed: u64, i: u64) -> Instance {
    let mu = if (i / 2) % 2 == 0 { 0.3 } else { 0.8 };
    let lambda = if (i / 4) % 2 == 0 { 0.1 } else { 1.0 };
    let law = if (i / 8) % 2 == 0 {
        InitialLaw::poisson(mu).unwrap()
    } else {
        InitialLaw::bernoulli(mu).unwrap()
    };
    let (region, larger_region, jumps) = if i % 2 == 0 {
        let q = [0.3, 0.5, 1.0][(i as usize / 16) % 3];
        (
            interval_region(-10, 10),
            interval_region(-12, 12),
            JumpDistribution::bias_1d(q).unwrap(),
        )
    } else {
        let jumps = JumpDistribution::new(
            2,
            vec![
                (Site::new(1, 0), 0.4),
                (Site::new(-1, 0), 0.1),
                (Site::new(0, 1), 0.25),
                (Site::new(0, -1), 0.25),
            ],
        )
        .unwrap();
        (box_region(-2, 2), box_region(-3, 3), jumps)
    };
    let config = sample_initial(&law, &region, hash3(seed, i, 1, 0));
    let tapes = TapeStore::new(hash3(seed, i, 2, 0), lambda, &jumps).unwrap();
    Instance {
        config,
        region,
        larger_region,
        tapes,
    }
}

fn reproducer(seed: u64, property: &str, instance: u64, detail: &str) -> String {
    format!(
        "{detail}; reproducer: rerun `arw verify --seed {seed}` and inspect {property} instance {instance}"
    )
}

fn check_order_independence(seed: u64, instances: u64, corrupt: bool) -> Outcome {
    let name = "order_independence";
    for i in 0..instances {
        let inst = build_instance(seed, i);
        let result = if corrupt {
            // The corrupt source shares one call counter across both runs,
            // so its answers drift and the equality must break somewhere.
            let impure = CorruptTapes::new(&inst.tapes);
            run_two_orders(&inst, &impure, seed, i)
        } else {
            run_two_orders(&inst, &inst.tapes, seed, i)
        };
        if let Err(detail) = result {
            return Outcome {
                name,
                trials: i + 1,
                failure: Some(reproducer(seed, name, i, &detail)),
            };
        }
    }
    Outcome {
        name,
        trials: instances,
        failure: None,
    }
}

fn run_two_orders(
    inst: &Instance,
    tapes: &impl InstructionSource,
    seed: u64,
    i: u64,
) -> Result<(), String> {
    let fifo = stabilize(
        &inst.config,
        &inst.region,
        tapes,
        TopplePolicy::Fifo,
        DEFAULT_TOPPLE_BUDGET,
    )
    .map_err(|e| e.to_string())?;
    let random = stabilize(
        &inst.config,
        &inst.region,
        tapes,
        TopplePolicy::Random {
            seed: hash3(seed, i, 3, 0),
        },
        DEFAULT_TOPPLE_BUDGET,
    )
    .map_err(|e| e.to_string())?;
    if fifo.odometer != random.odometer {
        return Err("odometers differ between topple orders".into());
    }
    if fifo.config != random.config {
        return Err("final configurations differ between topple orders".into());
    }
    Ok(())
}

fn check_least_action(seed: u64, instances: u64) -> Outcome {
    let name = "least_action";
    for i in 0..instances {
        let inst = build_instance(seed, i);
        let full = stabilize(
            &inst.config,
            &inst.region,
            &inst.tapes,
            TopplePolicy::Fifo,
            DEFAULT_TOPPLE_BUDGET,
        )
        .unwrap();
        let mut partial = inst.config.clone();
        let mut used = Odometer::new();
        let mut rng = Rng::new(hash3(seed, i, 4, 0));
        loop {
            let unstable: Vec<Site> = partial
                .unstable_sites()
                .filter(|s| inst.region.contains(s))
                .collect();
            if unstable.is_empty() || rng.bernoulli(0.03) {
                break;
            }
            let site = unstable[rng.below(unstable.len() as u64) as usize];
            topple(&mut partial, &mut used, &inst.tapes, site).unwrap();
        }
        if !used.pointwise_leq(&full.odometer) {
            return Outcome {
                name,
                trials: i + 1,
                failure: Some(reproducer(
                    seed,
                    name,
                    i,
                    "a legal partial order exceeded the stabilizing odometer",
                )),
            };
        }
    }
    Outcome {
        name,
        trials: instances,
        failure: None,
    }
}

fn check_monotonicity(seed: u64, instances: u64) -> Outcome {
    let name = "nested_monotonicity";
    for i in 0..instances {
        let inst = build_instance(seed, i);
        let base = stabilize(
            &inst.config,
            &inst.region,
            &inst.tapes,
            TopplePolicy::Fifo,
            DEFAULT_TOPPLE_BUDGET,
        )
        .unwrap();
        let mut bigger = inst.config.clone();
        let sites: Vec<Site> = inst.larger_region.iter().copied().collect();
        let mut rng = Rng::new(hash3(seed, i, 5, 0));
        for _ in 0..4 {
            bigger.add_particle_at(sites[rng.below(sites.len() as u64) as usize]);
        }
        let grown = stabilize(
            &bigger,
            &inst.larger_region,
            &inst.tapes,
            TopplePolicy::Fifo,
            DEFAULT_TOPPLE_BUDGET,
        )
        .unwrap();
        if !base.odometer.pointwise_leq(&grown.odometer) {
            return Outcome {
                name,
                trials: i + 1,
                failure: Some(reproducer(
                    seed,
                    name,
                    i,
                    "odometer shrank under a larger region and configuration",
                )),
            };
        }
    }
    Outcome {
        name,
        trials: instances,
        failure: None,
    }
}

fn check_enforced_activation(seed: u64, instances: u64) -> Outcome {
    let name = "enforced_activation";
    for i in 0..instances {
        let inst = build_instance(seed, i);
        let base = stabilize(
            &inst.config,
            &inst.region,
            &inst.tapes,
            TopplePolicy::Fifo,
            DEFAULT_TOPPLE_BUDGET,
        )
        .unwrap();
        let sel = hash3(seed, i, 6, 0);
        let view = inst.tapes.enforce_activation(move |site, j| {
            hash3(sel, site.x as u64, site.y as u64, j) % 2 == 0
        });
        let enforced = stabilize(
            &inst.config,
            &inst.region,
            &view,
            TopplePolicy::Fifo,
            DEFAULT_TOPPLE_BUDGET,
        )
        .unwrap();
        if !base.odometer.pointwise_leq(&enforced.odometer) {
            return Outcome {
                name,
                trials: i + 1,
                failure: Some(reproducer(
                    seed,
                    name,
                    i,
                    "neutralizing sleeps lowered the odometer",
                )),
            };
        }
    }
    Outcome {
        name,
        trials: instances,
        failure: None,
    }
}

fn check_tape_determinism(seed: u64) -> Outcome {
    let name = "tape_determinism";
    let jumps = JumpDistribution::bias_1d(0.4).unwrap();
    let tapes = TapeStore::new(hash64(seed, 0x70), 0.6, &jumps).unwrap();
    for site in [Site::line(-3), Site::line(0), Site::line(17)] {
        for j in 0..2_000u64 {
            if tapes.instruction(site, j) != tapes.instruction(site, j) {
                return Outcome {
                    name,
                    trials: j + 1,
                    failure: Some(reproducer(
                        seed,
                        name,
                        j,
                        "a tape slot changed between reads",
                    )),
                };
            }
        }
    }
    Outcome {
        name,
        trials: 6_000,
        failure: None,
    }
}

fn check_tape_law(seed: u64) -> Outcome {
    let name = "tape_sleep_frequency";
    let lambda = 0.7;
    let jumps = JumpDistribution::bias_1d(0.5).unwrap();
    let tapes = TapeStore::new(hash64(seed, 0x71), lambda, &jumps).unwrap();
    let n = 100_000u64;
    let sleeps = (0..n)
        .filter(|&j| {
            matches!(
                tapes.instruction(Site::line(2), j),
                arw_core::Instruction::Sleep
            )
        })
        .count() as f64;
    let p = lambda / (1.0 + lambda);
    let se = (p * (1.0 - p) / n as f64).sqrt();
    let freq = sleeps / n as f64;
    if (freq - p).abs() >= 4.0 * se {
        return Outcome {
            name,
            trials: n,
            failure: Some(reproducer(
                seed,
                name,
                0,
                &format!(
                    "sleep frequency {freq} vs expected {p} (4 SE = {})",
                    4.0 * se
                ),
            )),
        };
    }
    Outcome {
        name,
        trials: n,
        failure: None,
    }
}

fn check_oracle_agreement() -> Outcome {
    let name = "oracle_agreement";
    let mut trials = 0u64;
    for lambda in [0.5, 1.0] {
        let g = 1.0 / (1.0 + lambda);
        for q in [0.2, 0.35, 0.5] {
            for k in 1..=5u32 {
                trials += 1;
                let closed = conditional_passage_gf(k, q, g).unwrap();
                let (oracle, bound) = passage_gf_dp(k, q, g, 200).unwrap();
                if (closed - oracle).abs() > bound {
                    return Outcome {
                        name,
                        trials,
                        failure: Some(format!(
                            "closed form {closed} vs oracle {oracle} beyond bound {bound} at k={k}, q={q}, lambda={lambda}"
                        )),
                    };
                }
            }
        }
    }
    Outcome {
        name,
        trials,
        failure: None,
    }
}

pub fn run_suite(seed: u64, instances: u64, corrupt_tapes: bool) -> SuiteReport {
    let outcomes = vec![
        check_tape_determinism(seed),
        check_tape_law(seed),
        check_order_independence(seed, instances, corrupt_tapes),
        check_least_action(seed, instances),
        check_monotonicity(seed, instances),
        check_enforced_activation(seed, instances),
        check_oracle_agreement(),
    ];
    let mut text = String::new();
    let mut all_passed = true;
    for o in &outcomes {
        match &o.failure {
            None => writeln!(text, "property {}: {} trials: PASS", o.name, o.trials).unwrap(),
            Some(detail) => {
                all_passed = false;
                writeln!(
                    text,
                    "property {}: {} trials: FAIL — {detail}",
                    o.name, o.trials
                )
                .unwrap();
            }
        }
    }
    writeln!(
        text,
        "verify: {}/{} properties passed",
        outcomes.iter().filter(|o| o.failure.is_none()).count(),
        outcomes.len()
    )
    .unwrap();
    SuiteReport { text, all_passed }
}
