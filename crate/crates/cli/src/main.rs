//! Single entry point for the laboratory: graph generation, the exact
//! solver, catalog enumeration, bound audits, two-round fragment
//! experiments, and Monte Carlo threshold grids.
//!
//! Every stochastic subcommand requires an explicit `--seed`; there is no
//! wall-clock default. A JSON file passed with `--config` fills in any
//! parameter not given as a flag (keys are the snake_case parameter
//! names; explicit flags win). Each output file starts with the fully
//! resolved configuration; `--no-timestamp` suppresses the wall-clock
//! header line and blanks wall-clock columns, making reruns byte
//! identical.
//!
//! Exit codes: 0 success, 1 a checked bound failed to hold, 2 usage or
//! runtime error.

mod out;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hamsq_core::copies::{CopyCatalog, CyclicOrdering};
use hamsq_core::fragments::{
    bad_pair_census, build_fragment_family, default_fragment_cutoff, second_moment,
    two_round_experiment, TwoRoundPlan,
};
use hamsq_core::graph::{complete_edge_count, sample_gnm, sample_gnp, sample_subset, EdgeSet, Graph};
use hamsq_core::rng::RngStream;
use hamsq_core::solver::{find_power_ham, SearchBudget, SearchStatus};
use hamsq_core::spread::{
    audit_component_edge_bound_exhaustive, audit_extension_bound_exhaustive,
    audit_subgraph_count_bound_all, check_overlap_fraction_bounds, check_overlap_ratio_identity,
    overlap_histogram, AuditReport, DEFAULT_ENUM_BUDGET,
};
use hamsq_core::threshold::{fit_crossing, run_grid, run_grid_coupled, CrossingFit, ThresholdGrid};

#[derive(Parser)]
#[command(name = "hamsq", version, about = "Laboratory for squares of Hamilton cycles in random graphs")]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON object supplying defaults for parameters not passed as flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Reproducible output: no timestamp header, blank wall-clock columns.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a random graph and write it as text.
    Gen(GenArgs),
    /// Decide whether a graph contains a spanning cycle power.
    Solve(SolveArgs),
    /// Count the copy catalog; optionally dump it as CSV.
    Copies(CopiesArgs),
    /// Exact bound audits; exit 1 if any checked instance fails.
    Audit(AuditArgs),
    /// Two-round fragment experiments.
    #[command(subcommand)]
    Fragments(FragSub),
    /// Monte Carlo success rates over a grid of C = p sqrt(n).
    Threshold(ThresholdArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Edge probability for G(n, p).
    #[arg(long)]
    p: Option<f64>,
    /// Exact edge count: sample G(n, m) instead of G(n, p).
    #[arg(long, conflicts_with = "p")]
    m: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Graph file in the text format `gen` writes.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Cycle power to search for.
    #[arg(long)]
    k: Option<u32>,
    /// Node budget for the search (default unlimited).
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the verdict as JSON here as well as printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CopiesArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Catalog enumeration budget (number of copies).
    #[arg(long)]
    budget: Option<u64>,
    /// Write the catalog rows as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Statement {
    /// Extension counts against 16^l (n - ceil((l+c)/2) - 1)!.
    ExtensionBound,
    /// Connected-subgraph counts against (8e)^l C(2h, c).
    SubgraphCount,
    /// Component edge bound l <= 2v - 3c.
    ComponentEdge,
    /// Overlap fractions against C(2n, i) q^i.
    OverlapFraction,
    /// High-overlap expectation ratio as an exact identity.
    RatioIdentity,
}

impl Statement {
    fn name(self) -> &'static str {
        match self {
            Statement::ExtensionBound => "extension-bound",
            Statement::SubgraphCount => "subgraph-count",
            Statement::ComponentEdge => "component-edge",
            Statement::OverlapFraction => "overlap-fraction",
            Statement::RatioIdentity => "ratio-identity",
        }
    }
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, value_enum)]
    statement: Option<Statement>,
    #[arg(long)]
    n: Option<u32>,
    /// Largest subset size for the exhaustive sweeps.
    #[arg(long)]
    max_edges: Option<u32>,
    /// Free-edge count for the ratio identity.
    #[arg(long)]
    w_prime: Option<u64>,
    /// Enumeration budget for sweeps.
    #[arg(long)]
    budget: Option<u64>,
    /// Write per-instance rows as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FragSub {
    /// Classify random (copy, fixed-size set) pairs.
    Census(CensusArgs),
    /// Full two-round runs cross-checked against the solver.
    TwoRound(TwoRoundArgs),
    /// Exact moments of the covering statistic for one seeded first round.
    SecondMoment(SecondMomentArgs),
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    n: Option<u32>,
    /// First-round constant (p0 = c0 / sqrt(n)).
    #[arg(long)]
    c0: Option<f64>,
    /// Second-round constant (p1 = big_c / sqrt(n)).
    #[arg(long)]
    big_c: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Fragment cutoff (default ceil(4 sqrt(n))).
    #[arg(long)]
    cutoff: Option<u32>,
    /// First-round size (default ceil(big_c n^1.5), clamped to K_n).
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TwoRoundArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    big_c: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    cutoff: Option<u32>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SecondMomentArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Edges in the seeded first-round set.
    #[arg(long)]
    w0_size: Option<u64>,
    #[arg(long)]
    cutoff: Option<u32>,
    /// Second-round constant (p1 = big_c / sqrt(n)).
    #[arg(long)]
    big_c: Option<f64>,
    /// Simulated second rounds for the tail estimate.
    #[arg(long)]
    sim_trials: Option<u64>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u32>>,
    /// Comma-separated C values, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    c_list: Option<Vec<f64>>,
    /// Trials per (n, C) cell.
    #[arg(long)]
    trials: Option<u64>,
    /// Share edge uniforms across C so per-trial outcomes are monotone.
    #[arg(long)]
    coupled: bool,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write logistic crossing fits (one per n) as JSON here.
    #[arg(long)]
    fit: Option<PathBuf>,
}

enum RunStatus {
    Clean,
    AuditViolation,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 0 for --help/--version and 2 for usage errors.
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(RunStatus::Clean) => ExitCode::SUCCESS,
        Ok(RunStatus::AuditViolation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Flag-over-config parameter resolution.
struct Params {
    cfg: serde_json::Map<String, Value>,
}

impl Params {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let cfg = match path {
            None => serde_json::Map::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                match serde_json::from_str::<Value>(&text)
                    .with_context(|| format!("parsing config {}", p.display()))?
                {
                    Value::Object(map) => map,
                    _ => bail!("config {} must be a JSON object", p.display()),
                }
            }
        };
        Ok(Self { cfg })
    }

    fn lookup<T: serde::de::DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.cfg.get(key) {
            None => Ok(None),
            Some(v) => Ok(Some(
                serde_json::from_value(v.clone())
                    .with_context(|| format!("config key `{key}`"))?,
            )),
        }
    }

    fn req<T: serde::de::DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(v) = self.lookup(key)? {
            return Ok(v);
        }
        bail!(
            "missing parameter `{key}`: pass --{} or set it in --config",
            key.replace('_', "-")
        )
    }

    fn opt<T: serde::de::DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.lookup(key)
    }

    fn or<T: serde::de::DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }
}

fn run(cli: Cli) -> Result<RunStatus> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("initializing the worker pool")?;
    }
    let params = Params::load(cli.config.as_ref())?;
    let stamp = !cli.no_timestamp;
    match &cli.cmd {
        Cmd::Gen(a) => cmd_gen(a, &params, stamp),
        Cmd::Solve(a) => cmd_solve(a, &params, stamp),
        Cmd::Copies(a) => cmd_copies(a, &params, stamp),
        Cmd::Audit(a) => cmd_audit(a, &params, stamp),
        Cmd::Fragments(FragSub::Census(a)) => cmd_census(a, &params, stamp),
        Cmd::Fragments(FragSub::TwoRound(a)) => cmd_two_round(a, &params, stamp),
        Cmd::Fragments(FragSub::SecondMoment(a)) => cmd_second_moment(a, &params, stamp),
        Cmd::Threshold(a) => cmd_threshold(a, &params, stamp),
    }
}

fn budget_from(node_limit: Option<u64>) -> SearchBudget {
    SearchBudget {
        node_limit: node_limit.unwrap_or(u64::MAX),
        time_limit: None,
    }
}

fn status_name(found: Option<bool>) -> &'static str {
    match found {
        Some(true) => "found",
        Some(false) => "exhausted_no",
        None => "unknown",
    }
}

fn verdict_name(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "unresolved",
    }
}

fn fmt<T: Display>(x: T) -> String {
    format!("{x}")
}

fn cmd_gen(a: &GenArgs, params: &Params, stamp: bool) -> Result<RunStatus> {
    let n: u32 = params.req(a.n, "n")?;
    let m: Option<u64> = params.opt(a.m, "m")?;
    let p: Option<f64> = params.opt(a.p, "p")?;
    let seed: u64 = params.req(a.seed, "seed")?;
    let out: PathBuf = params.req(a.out.clone(), "out")?;
    let stream = RngStream::new(seed, 0);
    let (g, config) = match (m, p) {
        (Some(m), None) => (
            sample_gnm(n, m, stream)?,
            json!({"n": n, "m": m, "seed": seed}),
        ),
        (None, Some(p)) => (
            sample_gnp(n, p, stream)?,
            json!({"n": n, "p": p, "seed": seed}),
        ),
        (None, None) => bail!("pass exactly one of --p or --m"),
        (Some(_), Some(_)) => bail!("--p and --m are mutually exclusive"),
    };
    let body = format!("{}{}", out::header("gen", &config, stamp), g.to_text());
    out::write_atomic(&out, body.as_bytes())?;
    println!("wrote {}: n={} edges={}", out.display(), g.n(), g.edge_count());
    Ok(RunStatus::Clean)
}

fn cmd_solve(a: &SolveArgs, params: &Params, stamp: bool) -> Result<RunStatus> {
    let input: PathBuf = params.req(a.input.clone(), "input")?;
    let k: u32 = params.or(a.k, "k", 2)?;
    let node_limit: Option<u64> = params.opt(a.node_limit, "node_limit")?;
    let seed: u64 = params.req(a.seed, "seed")?;
    let g = Graph::read_file(&input).with_context(|| format!("reading {}", input.display()))?;
    let budget = budget_from(node_limit);
    let started = Instant::now();
    let outcome = find_power_ham(&g, k, &budget, RngStream::new(seed, 0))?;
    let seconds = started.elapsed().as_secs_f64();
    let (found, witness) = match &outcome.status {
        SearchStatus::Found(order) => (
            Some(true),
            Value::from(order.as_slice().iter().map(|&v| u64::from(v)).collect::<Vec<_>>()),
        ),
        SearchStatus::ExhaustedNo => (Some(false), Value::Null),
        SearchStatus::BudgetUnknown => (None, Value::Null),
    };
    let config = json!({
        "input": input.display().to_string(),
        "k": k,
        "node_limit": node_limit,
        "seed": seed,
    });
    let doc = json!({
        "config": config,
        "generated_unix": out::stamp_value(stamp),
        "status": status_name(found),
        "witness": witness,
        "nodes": outcome.nodes_expanded,
        "seconds": out::seconds_value(seconds, stamp),
    });
    if let Some(path) = params.opt(a.out.clone(), "out")? {
        out::write_atomic(&path, format!("{:#}\n", doc).as_bytes())?;
    }
    println!("{}", status_name(found));
    Ok(RunStatus::Clean)
}

fn cmd_copies(a: &CopiesArgs, params: &Params, stamp: bool) -> Result<RunStatus> {
    let n: u32 = params.req(a.n, "n")?;
    let budget: u64 = params.or(a.budget, "budget", CopyCatalog::DEFAULT_BUDGET)?;
    let cat = CopyCatalog::enumerate(n, 2, budget)?;
    println!("{}", cat.len());
    if let Some(path) = params.opt(a.out.clone(), "out")? {
        let config = json!({"n": n, "budget": budget});
        let mut body = out::header("copies", &config, stamp);
        body.push_str("copy_index,ordering,edge_bitmask_hex\n");
        for i in 0..cat.len() {
            let ordering = cat
                .ordering(i)
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let mask = cat
                .edge_words_of(i)
                .iter()
                .map(|w| format!("{w:016x}"))
                .collect::<String>();
            body.push_str(&out::csv_row([fmt(i), ordering, mask]));
        }
        out::write_atomic(&path, body.as_bytes())?;
    }
    Ok(RunStatus::Clean)
}

/// Rows and tallies of one audit run. Exhaustive sweeps keep their clean
/// instances implicit and emit only violations; the per-instance
/// statements emit every row.
struct AuditRun {
    checked: u64,
    violations: u64,
    rows: Vec<AuditReport>,
}

fn cmd_audit(a: &AuditArgs, params: &Params, stamp: bool) -> Result<RunStatus> {
    let statement: Statement = match a.statement {
        Some(s) => s,
        None => bail!("missing parameter `statement`: pass --statement"),
    };
    let n: u32 = params.req(a.n, "n")?;
    let budget: u64 = params.or(a.budget, "budget", DEFAULT_ENUM_BUDGET)?;
    let run = match statement {
        Statement::ExtensionBound => {
            let max_edges: u32 = params.or(a.max_edges, "max_edges", 3)?;
            let cat = CopyCatalog::enumerate(n, 2, CopyCatalog::DEFAULT_BUDGET)?;
            let sweep = audit_extension_bound_exhaustive(&cat, max_edges, budget)?;
            AuditRun {
                checked: sweep.checked,
                violations: sweep.violations.len() as u64,
                rows: sweep.violations,
            }
        }
        Statement::ComponentEdge => {
            let max_edges: u32 = params.or(a.max_edges, "max_edges", 3)?;
            let sweep = audit_component_edge_bound_exhaustive(n, 2, max_edges, budget)?;
            AuditRun {
                checked: sweep.checked,
                violations: sweep.violations.len() as u64,
                rows: sweep.violations,
            }
        }
        Statement::SubgraphCount => {
            let f = CyclicOrdering::identity(n).power_edges(2);
            let rows = audit_subgraph_count_bound_all(&f, budget)?;
            tally(rows)
        }
        Statement::OverlapFraction => {
            let cat = CopyCatalog::enumerate(n, 2, CopyCatalog::DEFAULT_BUDGET)?;
            let hist = overlap_histogram(&cat);
            let rows = check_overlap_fraction_bounds(&hist)?
                .into_iter()
                .map(|b| b.report)
                .collect();
            tally(rows)
        }
        Statement::RatioIdentity => {
            let w_prime: u64 = params.req(a.w_prime, "w_prime")?;
            let mut rows = Vec::new();
            for i in 0..=2 * n {
                match check_overlap_ratio_identity(n, w_prime, i) {
                    Ok(report) => rows.push(report),
                    Err(hamsq_core::Error::OutsideHypothesis(_)) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
            if rows.is_empty() {
                bail!("no valid overlap size for n={n}, w_prime={w_prime}");
            }
            tally(rows)
        }
    };
    println!(
        "statement={} n={n} checked={} violations={}",
        statement.name(),
        run.checked,
        run.violations
    );
    if let Some(path) = params.opt(a.out.clone(), "out")? {
        let config = json!({
            "statement": statement.name(),
            "n": n,
            "max_edges": a.max_edges,
            "w_prime": a.w_prime,
            "budget": budget,
        });
        let mut body = out::header("audit", &config, stamp);
        body.push_str("statement,instance,lhs,rhs_lo,rhs_hi,holds\n");
        for r in &run.rows {
            body.push_str(&out::csv_row([
                r.statement.to_string(),
                r.instance.clone(),
                fmt(&r.lhs),
                fmt(&r.rhs.lo),
                fmt(&r.rhs.hi),
                fmt(r.holds),
            ]));
        }
        body.push_str(&format!(
            "# checked={} violations={}\n",
            run.checked, run.violations
        ));
        out::write_atomic(&path, body.as_bytes())?;
    }
    if run.violations > 0 {
        Ok(RunStatus::AuditViolation)
    } else {
        Ok(RunStatus::Clean)
    }
}

fn tally(rows: Vec<AuditReport>) -> AuditRun {
    AuditRun {
        checked: rows.len() as u64,
        violations: rows.iter().filter(|r| !r.holds).count() as u64,
        rows,
    }
}

fn cmd_census(a: &CensusArgs, params: &Params, stamp: bool) -> Result<RunStatus> {
    let n: u32 = params.req(a.n, "n")?;
    let c0: f64 = params.or(a.c0, "c0", 1.0)?;
    let big_c: f64 = params.req(a.big_c, "big_c")?;
    let trials: u64 = params.req(a.trials, "trials")?;
    let seed: u64 = params.req(a.seed, "seed")?;
    let cutoff: Option<u32> = params.opt(a.cutoff, "cutoff")?;
    let w: Option<u64> = params.opt(a.w, "w")?;
    let node_limit: Option<u64> = params.opt(a.node_limit, "node_limit")?;

    let mut plan = TwoRoundPlan::new(n, c0, big_c)?;
    if let Some(k) = cutoff {
        plan = plan.with_cutoff(k);
    }
    if let Some(w) = w {
        plan = plan.with_first_round_size(w);
    }
    let cat = CopyCatalog::enumerate(n, 2, CopyCatalog::DEFAULT_BUDGET)?;
    let report = bad_pair_census(
        &cat,
        &plan,
        trials,
        &budget_from(node_limit),
        RngStream::new(seed, 0),
    )?;
    println!(
        "trials={} w={} bad={} good={} unresolved={} fraction_bad={:.4}",
        report.trials, report.w_used, report.bad, report.good, report.unresolved, report.fraction_bad
    );
    if let Some(path) = params.opt(a.out.clone(), "out")? {
        let config = json!({
            "n": n, "c0": c0, "big_c": big_c, "trials": trials,
            "cutoff": plan.k, "w": plan.w, "node_limit": node_limit, "seed": seed,
        });
        let mut body = out::header("fragments census", &config, stamp);
        body.push_str(
            "trials,w_used,good,bad,unresolved,fraction_bad,ci_lo,ci_hi,reference_bound\n",
        );
        body.push_str(&out::csv_row([
            fmt(report.trials),
            fmt(report.w_used),
            fmt(report.good),
            fmt(report.bad),
            fmt(report.unresolved),
            fmt(report.fraction_bad),
            fmt(report.ci.0),
            fmt(report.ci.1),
            fmt(report.reference_bound),
        ]));
        out::write_atomic(&path, body.as_bytes())?;
    }
    Ok(RunStatus::Clean)
}

fn cmd_two_round(a: &TwoRoundArgs, params: &Params, stamp: bool) -> Result<RunStatus> {
    let n: u32 = params.req(a.n, "n")?;
    let c0: f64 = params.req(a.c0, "c0")?;
    let big_c: f64 = params.req(a.big_c, "big_c")?;
    let trials: u64 = params.req(a.trials, "trials")?;
    let seed: u64 = params.req(a.seed, "seed")?;
    let cutoff: Option<u32> = params.opt(a.cutoff, "cutoff")?;
    let node_limit: Option<u64> = params.opt(a.node_limit, "node_limit")?;

    let mut plan = TwoRoundPlan::new(n, c0, big_c)?;
    if let Some(k) = cutoff {
        plan = plan.with_cutoff(k);
    }
    let cat = CopyCatalog::enumerate(n, 2, CopyCatalog::DEFAULT_BUDGET)?;
    let records = two_round_experiment(
        &cat,
        &plan,
        trials,
        &budget_from(node_limit),
        RngStream::new(seed, 0),
    )?;
    let sound = records.iter().filter(|r| r.sound()).count();
    let covered = records.iter().filter(|r| r.x > 0).count();
    println!(
        "trials={} sound={} x_positive={} cutoff={}",
        records.len(),
        sound,
        covered,
        plan.k
    );
    if let Some(path) = params.opt(a.out.clone(), "out")? {
        let config = json!({
            "n": n, "c0": c0, "big_c": big_c, "trials": trials,
            "cutoff": plan.k, "node_limit": node_limit, "seed": seed,
        });
        let mut body = out::header("fragments two-round", &config, stamp);
        body.push_str("trial,w0_size,w0_successful,family_size,x,solver_status,seconds\n");
        for r in &records {
            body.push_str(&out::csv_row([
                fmt(r.trial),
                fmt(r.w0_size),
                verdict_name(r.w0_successful).to_string(),
                fmt(r.family_size),
                fmt(r.x),
                status_name(r.solver_found).to_string(),
                out::seconds_cell(r.seconds, stamp),
            ]));
        }
        out::write_atomic(&path, body.as_bytes())?;
    }
    Ok(RunStatus::Clean)
}

fn cmd_second_moment(a: &SecondMomentArgs, params: &Params, stamp: bool) -> Result<RunStatus> {
    let n: u32 = params.req(a.n, "n")?;
    let w0_size: u64 = params.req(a.w0_size, "w0_size")?;
    let big_c: f64 = params.req(a.big_c, "big_c")?;
    let sim_trials: u64 = params.req(a.sim_trials, "sim_trials")?;
    let seed: u64 = params.req(a.seed, "seed")?;
    let cutoff: u32 = params.or(a.cutoff, "cutoff", default_fragment_cutoff(n))?;
    let node_limit: Option<u64> = params.opt(a.node_limit, "node_limit")?;

    if w0_size > complete_edge_count(n) {
        bail!(
            "w0_size {w0_size} exceeds the {} edges of the complete graph",
            complete_edge_count(n)
        );
    }
    let p1 = big_c / (n as f64).sqrt();
    if !(0.0..=1.0).contains(&p1) {
        bail!("big_c {big_c} gives p1 {p1} outside [0, 1]");
    }
    let cat = CopyCatalog::enumerate(n, 2, CopyCatalog::DEFAULT_BUDGET)?;
    let stream = RngStream::new(seed, 0);
    let pool: Vec<_> = EdgeSet::complete(n).iter().collect();
    let mut rng = stream.rng();
    let w0 = sample_subset(n, &pool, w0_size as usize, &mut rng);
    let build = build_fragment_family(&cat, &w0, cutoff, &budget_from(node_limit))?;
    let report = second_moment(
        &build.family,
        hamsq_core::rng::Prob::from_f64(p1)?,
        sim_trials,
        stream.with_stream(1),
    )?;
    let consistent = report.chebyshev_consistent();
    println!(
        "members={} mu={} empirical_p_x0={:.4} chebyshev_consistent={}",
        report.members,
        report.mu,
        report.empirical_p_x0,
        verdict_name(consistent)
    );
    if let Some(path) = params.opt(a.out.clone(), "out")? {
        let config = json!({
            "n": n, "w0_size": w0_size, "cutoff": cutoff, "big_c": big_c,
            "sim_trials": sim_trials, "node_limit": node_limit, "seed": seed,
        });
        let doc = json!({
            "config": config,
            "generated_unix": out::stamp_value(stamp),
            "members": report.members,
            "good": build.good,
            "bad": build.bad,
            "unresolved": build.unresolved,
            "mu": fmt(&report.mu),
            "exact_mean": fmt(&report.exact_mean),
            "exact_variance": fmt(&report.exact_variance),
            "var_bound": fmt(&report.var_bound),
            "chebyshev_bound": report.chebyshev_bound.as_ref().map(fmt),
            "empirical_p_x0": report.empirical_p_x0,
            "empirical_ci": [report.empirical_ci.0, report.empirical_ci.1],
            "sim_trials": report.sim_trials,
            "chebyshev_consistent": consistent,
        });
        out::write_atomic(&path, format!("{:#}\n", doc).as_bytes())?;
    }
    Ok(RunStatus::Clean)
}

fn fit_flag(fit: &CrossingFit) -> String {
    if fit.degenerate {
        return "degenerate".into();
    }
    let mut flags = Vec::new();
    if fit.extrapolated {
        flags.push("extrapolated");
    }
    if fit.low_confidence {
        flags.push("low-confidence");
    }
    if flags.is_empty() {
        "ok".into()
    } else {
        flags.join("+")
    }
}

fn cmd_threshold(a: &ThresholdArgs, params: &Params, stamp: bool) -> Result<RunStatus> {
    let n_list: Vec<u32> = params.req(a.n_list.clone(), "n_list")?;
    let c_list: Vec<f64> = params.req(a.c_list.clone(), "c_list")?;
    let trials: u64 = params.req(a.trials, "trials")?;
    let seed: u64 = params.req(a.seed, "seed")?;
    let node_limit: Option<u64> = params.opt(a.node_limit, "node_limit")?;
    let coupled = a.coupled || params.or(None::<bool>, "coupled", false)?;

    let grid = ThresholdGrid::new(
        n_list.clone(),
        c_list.clone(),
        trials,
        budget_from(node_limit),
        RngStream::new(seed, 0),
    )?;
    let (cells, inversions) = if coupled {
        let run = run_grid_coupled(&grid);
        (run.cells, Some(run.inversions))
    } else {
        (run_grid(&grid), None)
    };
    match inversions {
        Some(i) => println!("cells={} inversions={i}", cells.len()),
        None => println!("cells={}", cells.len()),
    }

    let config = json!({
        "n_list": n_list, "c_list": c_list, "trials": trials,
        "coupled": coupled, "node_limit": node_limit, "seed": seed,
    });
    if let Some(path) = params.opt(a.out.clone(), "out")? {
        let mut body = out::header("threshold", &config, stamp);
        body.push_str("n,C,p,trials,successes,failures,unknowns,estimate,ci_lo,ci_hi\n");
        for c in &cells {
            body.push_str(&out::csv_row([
                fmt(c.n),
                fmt(c.big_c),
                fmt(c.p),
                fmt(c.trials),
                fmt(c.successes),
                fmt(c.failures),
                fmt(c.unknowns),
                fmt(c.estimate),
                fmt(c.ci.0),
                fmt(c.ci.1),
            ]));
        }
        if let Some(i) = inversions {
            body.push_str(&format!("# inversions={i}\n"));
        }
        out::write_atomic(&path, body.as_bytes())?;
    }
    if let Some(path) = params.opt(a.fit.clone(), "fit")? {
        let mut fits = Vec::new();
        for &n in &n_list {
            let for_n: Vec<_> = cells.iter().filter(|c| c.n == n).cloned().collect();
            let fit = fit_crossing(&for_n)?;
            fits.push(json!({
                "n": fit.n,
                "c_half": fit.c_half,
                "slope": fit.slope,
                "flag": fit_flag(&fit),
            }));
        }
        let doc = json!({
            "config": config,
            "generated_unix": out::stamp_value(stamp),
            "fits": fits,
        });
        out::write_atomic(&path, format!("{:#}\n", doc).as_bytes())?;
    }
    Ok(RunStatus::Clean)
}
