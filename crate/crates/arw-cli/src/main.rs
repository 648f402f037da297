//! `arw` — command-line front end for the activated random walk laboratory.
//!
//! Subcommands: `bound`, `estimate-f`, `phase`, `trapezoid`, `verify`.
//! Every run is determined by its seed and resolved parameters, which are
//! echoed as a `#`-comment header into each output file; rerunning the same
//! command with the same seed reproduces the file byte for byte.
//!
//! Exit codes: 0 success, 1 property failure (from `verify`), 2 invalid
//! input.

mod config;
mod verify;

use arw_core::bounds::{lower_bound, BoundParams, SeriesControl};
use arw_core::drift::{estimate_confinement, upper_bound_1d, upper_bound_d, JumpDistribution};
use arw_core::experiments::{
    choose_ball_radius, phase_sweep, InitialLaw, TrapezoidGeometry, TrapezoidPlan,
};
use arw_core::lattice::Site;
use arw_core::rng::hash64;
use clap::{Args, Parser, Subcommand};
use config::{resolve, resolve_required, FileConfig, Resolved};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing input: exit code 2.
    Invalid { name: String, msg: String },
    /// A verified property failed: exit code 1.
    Property { report: String },
}

impl CliError {
    fn invalid(name: impl Into<String>, msg: impl Into<String>) -> Self {
        CliError::Invalid {
            name: name.into(),
            msg: msg.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid { name, msg } => write!(f, "invalid input: {name}: {msg}"),
            CliError::Property { report } => write!(f, "property failure:\n{report}"),
        }
    }
}

impl From<arw_core::bounds::BoundsError> for CliError {
    fn from(e: arw_core::bounds::BoundsError) -> Self {
        match e {
            arw_core::bounds::BoundsError::Domain { name, msg } => CliError::Invalid {
                name: name.into(),
                msg,
            },
        }
    }
}

impl From<arw_core::drift::DriftError> for CliError {
    fn from(e: arw_core::drift::DriftError) -> Self {
        let name: &str = match &e {
            arw_core::drift::DriftError::InvalidParameter { name, .. } => name,
            arw_core::drift::DriftError::ZeroDrift
            | arw_core::drift::DriftError::DimensionMismatch(_)
            | arw_core::drift::DriftError::InvalidDistribution(_) => "dist",
            arw_core::drift::DriftError::UnboundedBound => "nu0",
        };
        CliError::invalid(name, e.to_string())
    }
}

impl From<arw_core::experiments::ExperimentError> for CliError {
    fn from(e: arw_core::experiments::ExperimentError) -> Self {
        match &e {
            arw_core::experiments::ExperimentError::InvalidParameter { name, .. } => {
                CliError::invalid(*name, e.to_string())
            }
            _ => CliError::invalid("parameters", e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "arw",
    version,
    about = "Activated random walk laboratory: analytic bounds and seeded Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed; all per-trial streams derive from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to available parallelism). Results do not
    /// depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic lower bound B for the critical density over a (lambda, q) grid.
    Bound(BoundArgs),
    /// Monte Carlo bracket for the forward-confinement probability F and the
    /// upper bounds built from it.
    #[command(name = "estimate-f")]
    EstimateF(EstimateFArgs),
    /// Fixation/activity phase sweep over particle densities and region sizes.
    Phase(PhaseArgs),
    /// 2-D trapezoid runs with the coupled ghost process.
    Trapezoid(TrapezoidArgs),
    /// Randomized verification of the engine contracts and the bound oracle.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BoundArgs {
    /// Comma-separated sleeping rates.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Comma-separated bias values; overrides the q grid flags.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    #[arg(long)]
    q_min: Option<f64>,
    #[arg(long)]
    q_max: Option<f64>,
    #[arg(long)]
    q_step: Option<f64>,
    /// Series term tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Series term cap.
    #[arg(long)]
    max_terms: Option<u32>,
}

#[derive(Args)]
struct EstimateFArgs {
    #[arg(long)]
    lambda: Option<f64>,
    /// 1-D shortcut: right-jump probability.
    #[arg(long)]
    q: Option<f64>,
    /// General jump distribution, e.g. "1,0:0.4;-1,0:0.1;0,1:0.25;0,-1:0.25".
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Empty-site probability of the initial law; adds the nu0/F bound.
    #[arg(long)]
    nu0: Option<f64>,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long)]
    lambda: Option<f64>,
    /// Right-jump probability of the 1-D walk.
    #[arg(long)]
    q: Option<f64>,
    /// Comma-separated densities; overrides the mu grid flags.
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    #[arg(long)]
    mu_min: Option<f64>,
    #[arg(long)]
    mu_max: Option<f64>,
    #[arg(long)]
    mu_step: Option<f64>,
    /// Comma-separated region half-lengths.
    #[arg(long, value_delimiter = ',')]
    l: Option<Vec<i64>>,
    #[arg(long)]
    trials: Option<u64>,
    /// Initial law family: poisson or bernoulli.
    #[arg(long)]
    law: Option<String>,
    /// Linear-growth fraction for the activity probe.
    #[arg(long)]
    activity_fraction: Option<f64>,
    /// Horizon for the confinement bracket in the summary.
    #[arg(long)]
    f_horizon: Option<u64>,
    /// Trials for the confinement bracket in the summary.
    #[arg(long)]
    f_trials: Option<u64>,
    /// Topple budget per trial.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct TrapezoidArgs {
    #[arg(long)]
    lambda: Option<f64>,
    /// 2-D jump distribution, e.g. "1,0:0.4;-1,0:0.1;0,1:0.25;0,-1:0.25".
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    mu: Option<f64>,
    /// Initial law family: poisson or bernoulli.
    #[arg(long)]
    law: Option<String>,
    /// Distance between the parallel sides.
    #[arg(long)]
    l: Option<i64>,
    /// Flare of the trapezoid and cone.
    #[arg(long)]
    g: Option<f64>,
    /// Ball radius K; chosen by a pilot run when omitted.
    #[arg(long)]
    ball: Option<i64>,
    #[arg(long)]
    runs: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Randomized instances per property.
    #[arg(long)]
    instances: Option<u64>,
    /// Test hook: serve deliberately impure tapes so the order-independence
    /// check fails and demonstrates a reproducer.
    #[arg(long, default_value_t = false)]
    corrupt_tapes: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Property { report }) => {
            eprintln!("{report}");
            ExitCode::from(1)
        }
        Err(err @ CliError::Invalid { .. }) => {
            eprintln!("arw: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = resolve(cli.seed, &file, "seed", 42u64)?;
    let workers = match cli.workers {
        Some(w) => w,
        None => match file.get("workers") {
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::invalid("workers", format!("cannot parse {raw:?}")))?,
            None => std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        },
    };
    if workers == 0 {
        return Err(CliError::invalid("workers", "must be >= 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::invalid("workers", e.to_string()))?;
    pool.install(|| dispatch(cli, &file, seed, workers))
}

fn dispatch(cli: Cli, file: &FileConfig, seed: u64, _workers: usize) -> Result<(), CliError> {
    // The worker count never appears in the header: results are independent
    // of it, and the default varies across machines.
    let mut resolved = Resolved::default();
    resolved.put("seed", seed);
    let out = cli.out.clone();
    match cli.command {
        Command::Bound(args) => cmd_bound(args, file, seed, resolved, out),
        Command::EstimateF(args) => cmd_estimate_f(args, file, seed, resolved, out),
        Command::Phase(args) => cmd_phase(args, file, seed, resolved, out),
        Command::Trapezoid(args) => cmd_trapezoid(args, file, seed, resolved, out),
        Command::Verify(args) => cmd_verify(args, file, seed, resolved, out),
    }
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::invalid("out", format!("cannot write {path:?}: {e}"))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) {
        return Err(CliError::invalid(
            "step",
            format!("must be positive, got {step}"),
        ));
    }
    if max < min {
        return Err(CliError::invalid(
            "grid",
            format!("max {max} below min {min}"),
        ));
    }
    let n = ((max - min) / step).round() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

fn parse_dist(spec: &str) -> Result<JumpDistribution, CliError> {
    let mut support = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (offset, prob) = part
            .rsplit_once(':')
            .ok_or_else(|| CliError::invalid("dist", format!("bad entry {part:?}")))?;
        let site = Site::parse_key(offset)
            .ok_or_else(|| CliError::invalid("dist", format!("bad offset {offset:?}")))?;
        let p: f64 = prob
            .trim()
            .parse()
            .map_err(|_| CliError::invalid("dist", format!("bad probability {prob:?}")))?;
        support.push((site, p));
    }
    let dimension = if support.iter().all(|(z, _)| z.y == 0) {
        1
    } else {
        2
    };
    Ok(JumpDistribution::new(dimension, support)?)
}

fn dist_spec(p: &JumpDistribution) -> String {
    p.support()
        .iter()
        .map(|(z, prob)| format!("{},{}:{}", z.x, z.y, prob))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_law(name: &str, mu: f64) -> Result<InitialLaw, CliError> {
    match name {
        "poisson" => Ok(InitialLaw::poisson(mu)?),
        "bernoulli" => Ok(InitialLaw::bernoulli(mu)?),
        other => Err(CliError::invalid(
            "law",
            format!("unknown family {other:?}"),
        )),
    }
}

fn cmd_bound(
    args: BoundArgs,
    file: &FileConfig,
    _seed: u64,
    mut resolved: Resolved,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let lambdas = match args.lambda {
        Some(v) => v,
        None => match file.get("lambda") {
            Some(raw) => parse_f64_list(raw, "lambda")?,
            None => return Err(CliError::invalid("lambda", "missing")),
        },
    };
    let qs = match args.q {
        Some(v) => v,
        None => match file.get("q") {
            Some(raw) => parse_f64_list(raw, "q")?,
            None => {
                let min = resolve(args.q_min, file, "q_min", 0.0)?;
                let max = resolve(args.q_max, file, "q_max", 1.0)?;
                let step = resolve(args.q_step, file, "q_step", 0.05)?;
                resolved.put("q_min", min);
                resolved.put("q_max", max);
                resolved.put("q_step", step);
                grid(min, max, step)?
            }
        },
    };
    let tolerance = resolve(args.tolerance, file, "tolerance", 1e-12)?;
    let max_terms = resolve(args.max_terms, file, "max_terms", 10_000u32)?;
    let ctl = SeriesControl {
        term_tolerance: tolerance,
        max_terms,
        ..SeriesControl::default()
    };
    ctl.validate()?;
    resolved.put("lambda", join_f64(&lambdas));
    resolved.put("q", join_f64(&qs));
    resolved.put("tolerance", tolerance);
    resolved.put("max_terms", max_terms);

    let mut body = String::new();
    body.push_str("lambda,q,B,terms,trunc_error\n");
    for &lambda in &lambdas {
        for &q in &qs {
            let v = lower_bound(BoundParams::new(lambda, q)?, ctl)?;
            writeln!(
                body,
                "{lambda},{q},{},{},{}",
                v.bound, v.terms, v.truncation_error
            )
            .unwrap();
        }
    }
    write_output(out.as_ref(), &format!("{}{body}", resolved.header("bound")))
}

fn cmd_estimate_f(
    args: EstimateFArgs,
    file: &FileConfig,
    seed: u64,
    mut resolved: Resolved,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let lambda = resolve_required(args.lambda, file, "lambda")?;
    let dist = resolve_dist(args.q, args.dist, file)?;
    let horizon = resolve(args.horizon, file, "horizon", 10_000u64)?;
    let trials = resolve(args.trials, file, "trials", 100_000u64)?;
    let nu0 = match args.nu0 {
        Some(v) => Some(v),
        None => match file.get("nu0") {
            Some(raw) => Some(
                raw.parse::<f64>()
                    .map_err(|_| CliError::invalid("nu0", format!("cannot parse {raw:?}")))?,
            ),
            None => None,
        },
    };
    let spec = dist_spec(&dist);
    resolved.put("lambda", lambda);
    resolved.put("dist", &spec);
    resolved.put("horizon", horizon);
    resolved.put("trials", trials);
    if let Some(v) = nu0 {
        resolved.put("nu0", v);
    }

    let est = estimate_confinement(lambda, &dist, horizon, trials, seed)?;
    let mut header = String::from("lambda,dist,horizon,trials,F_lower,F_upper,se_lower,se_upper");
    // The dist field carries commas, so it is quoted per RFC 4180.
    let mut row = format!(
        "{lambda},\"{spec}\",{horizon},{trials},{},{},{},{}",
        est.lower, est.upper, est.se_lower, est.se_upper
    );
    header.push_str(",bound_1d_lo,bound_1d_hi");
    if dist.dimension() == 1 {
        let b = upper_bound_1d(&dist, &est)?;
        write!(row, ",{},{}", b[0], b[1]).unwrap();
    } else {
        row.push_str(",,");
    }
    if let Some(nu0) = nu0 {
        header.push_str(",nu0,bound_d_lo,bound_d_hi");
        let b = upper_bound_d(nu0, &est)?;
        write!(row, ",{nu0},{},{}", b[0], b[1]).unwrap();
    }
    write_output(
        out.as_ref(),
        &format!("{}{header}\n{row}\n", resolved.header("estimate-f")),
    )
}

fn cmd_phase(
    args: PhaseArgs,
    file: &FileConfig,
    seed: u64,
    mut resolved: Resolved,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let lambda = resolve_required(args.lambda, file, "lambda")?;
    let q = resolve_required(args.q, file, "q")?;
    let mus = match args.mu {
        Some(v) => v,
        None => match file.get("mu") {
            Some(raw) => parse_f64_list(raw, "mu")?,
            None => {
                let min = resolve(args.mu_min, file, "mu_min", 0.1)?;
                let max = resolve(args.mu_max, file, "mu_max", 0.9)?;
                let step = resolve(args.mu_step, file, "mu_step", 0.05)?;
                grid(min, max, step)?
            }
        },
    };
    if mus.is_empty() {
        return Err(CliError::invalid("mu", "empty density grid"));
    }
    let ls = match args.l {
        Some(v) => v,
        None => match file.get("l") {
            Some(raw) => parse_i64_list(raw, "l")?,
            None => vec![250, 500, 1000],
        },
    };
    let trials = resolve(args.trials, file, "trials", 200u64)?;
    let law_name = resolve(args.law, file, "law", "poisson".to_string())?;
    let activity_fraction = resolve(args.activity_fraction, file, "activity_fraction", 0.05)?;
    let f_horizon = resolve(args.f_horizon, file, "f_horizon", 1_000u64)?;
    let f_trials = resolve(args.f_trials, file, "f_trials", 100_000u64)?;
    let budget = resolve(args.budget, file, "budget", arw_core::DEFAULT_TOPPLE_BUDGET)?;
    let dist = JumpDistribution::bias_1d(q)?;
    let family = parse_law(&law_name, mus[0])?;

    resolved.put("lambda", lambda);
    resolved.put("q", q);
    resolved.put("mu", join_f64(&mus));
    resolved.put(
        "l",
        ls.iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    resolved.put("trials", trials);
    resolved.put("law", &law_name);
    resolved.put("activity_fraction", activity_fraction);
    resolved.put("f_horizon", f_horizon);
    resolved.put("f_trials", f_trials);
    resolved.put("budget", budget);

    let table = phase_sweep(
        &family,
        lambda,
        &dist,
        &mus,
        &ls,
        trials,
        seed,
        budget,
        activity_fraction,
    )?;
    let mut body = String::from("mu,L,p_fix,ci_lo,ci_hi,p_act,budget_failures\n");
    for r in &table.rows {
        writeln!(
            body,
            "{},{},{},{},{},{},{}",
            r.mu, r.l, r.p_fix, r.ci_low, r.ci_high, r.p_act, r.budget_failures
        )
        .unwrap();
    }
    write_output(out.as_ref(), &format!("{}{body}", resolved.header("phase")))?;

    // Summary: crossing estimate plus the analytic bracket at the same
    // parameters.
    let bound = lower_bound(BoundParams::new(lambda, q)?, SeriesControl::default())?;
    let f = estimate_confinement(lambda, &dist, f_horizon, f_trials, hash64(seed, 0xF))?;
    let mut summary = serde_json::Map::new();
    summary.insert("command".into(), "phase".into());
    summary.insert(
        "crossing".into(),
        match table.crossing {
            Some(c) => serde_json::json!(c),
            None => serde_json::Value::Null,
        },
    );
    summary.insert("bracket_lower".into(), serde_json::json!(bound.bound));
    summary.insert("bracket_upper".into(), serde_json::json!(1.0 - f.lower));
    summary.insert("f_lower".into(), serde_json::json!(f.lower));
    summary.insert("f_upper".into(), serde_json::json!(f.upper));
    for (k, v) in resolved.entries() {
        summary.insert(format!("config_{k}"), serde_json::json!(v));
    }
    let summary_text = serde_json::to_string_pretty(&serde_json::Value::Object(summary)).unwrap();
    match out {
        Some(path) => {
            let spath = path.with_extension("summary.json");
            std::fs::write(&spath, summary_text)
                .map_err(|e| CliError::invalid("out", format!("cannot write {spath:?}: {e}")))?;
        }
        None => println!("{summary_text}"),
    }
    Ok(())
}

fn cmd_trapezoid(
    args: TrapezoidArgs,
    file: &FileConfig,
    seed: u64,
    mut resolved: Resolved,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let lambda = resolve_required(args.lambda, file, "lambda")?;
    let spec = match args.dist {
        Some(s) => s,
        None => match file.get("dist") {
            Some(raw) => raw.to_string(),
            None => return Err(CliError::invalid("dist", "missing 2-D jump distribution")),
        },
    };
    let dist = parse_dist(&spec)?;
    let mu = resolve_required(args.mu, file, "mu")?;
    let law_name = resolve(args.law, file, "law", "bernoulli".to_string())?;
    let law = parse_law(&law_name, mu)?;
    let l = resolve(args.l, file, "l", 50i64)?;
    let g = resolve(args.g, file, "g", 4.0)?;
    let runs = resolve(args.runs, file, "runs", 100u64)?;
    let ball = match args.ball {
        Some(k) => k,
        None => match file.get("ball") {
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::invalid("ball", format!("cannot parse {raw:?}")))?,
            None => choose_ball_radius(&dist, g, hash64(seed, 0xBA11))?,
        },
    };
    let geom = TrapezoidGeometry::new(l, g, ball, &dist)?;
    let plan = TrapezoidPlan::new(geom, &dist)?;

    resolved.put("lambda", lambda);
    resolved.put("dist", dist_spec(&dist));
    resolved.put("mu", mu);
    resolved.put("law", &law_name);
    resolved.put("l", l);
    resolved.put("g", g);
    resolved.put("ball", ball);
    resolved.put("runs", runs);

    use rayon::prelude::*;
    let results: Vec<_> = (0..runs)
        .into_par_iter()
        .map(|i| plan.run(&law, lambda, hash64(seed, i)))
        .collect::<Result<_, _>>()?;
    let mut body = String::from("run,G,W,R,Rtilde\n");
    for (i, r) in results.iter().enumerate() {
        writeln!(
            body,
            "{i},{},{},{},{}",
            r.g_hits, r.w_hits, r.r_hits, r.r_tilde
        )
        .unwrap();
    }
    write_output(
        out.as_ref(),
        &format!("{}{body}", resolved.header("trapezoid")),
    )
}

fn cmd_verify(
    args: VerifyArgs,
    file: &FileConfig,
    seed: u64,
    mut resolved: Resolved,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let instances = resolve(args.instances, file, "instances", 60u64)?;
    if instances == 0 {
        return Err(CliError::invalid("instances", "must be >= 1"));
    }
    resolved.put("instances", instances);
    resolved.put("corrupt_tapes", args.corrupt_tapes);
    let report = verify::run_suite(seed, instances, args.corrupt_tapes);
    let text = format!("{}{}", resolved.header("verify"), report.text);
    write_output(out.as_ref(), &text)?;
    if report.all_passed {
        Ok(())
    } else {
        Err(CliError::Property {
            report: report.text,
        })
    }
}

fn resolve_dist(
    q: Option<f64>,
    dist: Option<String>,
    file: &FileConfig,
) -> Result<JumpDistribution, CliError> {
    if let Some(q) = q {
        return Ok(JumpDistribution::bias_1d(q)?);
    }
    if let Some(spec) = dist {
        return parse_dist(&spec);
    }
    if let Some(raw) = file.get("q") {
        let q: f64 = raw
            .parse()
            .map_err(|_| CliError::invalid("q", format!("cannot parse {raw:?}")))?;
        return Ok(JumpDistribution::bias_1d(q)?);
    }
    if let Some(raw) = file.get("dist") {
        return parse_dist(raw);
    }
    Err(CliError::invalid("dist", "provide --q or --dist"))
}

fn parse_f64_list(raw: &str, name: &'static str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::invalid(name, format!("cannot parse {s:?}")))
        })
        .collect()
}

fn parse_i64_list(raw: &str, name: &'static str) -> Result<Vec<i64>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| CliError::invalid(name, format!("cannot parse {s:?}")))
        })
        .collect()
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
