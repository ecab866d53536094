//! Configuration parsing, experiment dispatch, and bit-exact result
//! serialization.
//!
//! One TOML config file describes one run. Outputs per run: `results.csv`
//! (fixed header `n,total_weight,estimate,mc_stderr,target,abs_error`),
//! `plotdata.csv` (`n,estimate,target`), and `summary.json` (verdict,
//! metadata, manifest). The diagnostics subcommand writes `diagnostics.csv`
//! with its own documented header instead of results.csv; `selftest` prints a
//! pass-count report. Floats are written in Rust's shortest round-trip form,
//! so reruns with the same manifest are byte-identical.
//!
//! Exit codes: 0 success, 1 config error, 2 numerical refusal (divergent
//! moments or premium constants, unsupported measure), 3 invariant failure in
//! selftest.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use crate::distortion::DistortionFunction;
use crate::distributions::MarginalDistribution;
use crate::error::{Error, Result};
use crate::experiments::{
    run_experiment, ConvergenceRow, DiagnosticsReport, ExperimentConfig, ExperimentKind,
    ExperimentOutput, ExperimentResult,
};
use crate::orlicz::YoungFunction;
use crate::portfolio::{
    simulate_aggregate, CouplingKind, MarginalAssignment, SeedSpec, WeightScheme,
};
use crate::risk::RiskMeasure;

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: String,
    seed: Option<u64>,
    n_grid: Option<Vec<usize>>,
    replications: Option<usize>,
    tolerance: Option<f64>,
    epsilon: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    marginal: RawMarginal,
    z_marginal: Option<RawMarginal>,
    weights: RawWeights,
    measure: Option<RawMeasure>,
    young: Option<RawYoung>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarginal {
    family: String,
    p: Option<f64>,
    rate: Option<f64>,
    tail: Option<f64>,
    scale: Option<f64>,
    lo: Option<f64>,
    hi: Option<f64>,
    c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    scheme: String,
    beta: Option<f64>,
    r: Option<f64>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    kind: String,
    alpha: Option<f64>,
    #[serde(rename = "C")]
    load: Option<f64>,
    distortion: Option<RawDistortion>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistortion {
    family: String,
    gamma: Option<f64>,
    alpha: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawYoung {
    family: String,
    p: Option<f64>,
}

fn require<T>(value: Option<T>, what: &str, context: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("{context} requires `{what}`")))
}

fn forbid<T>(value: &Option<T>, what: &str, context: &str) -> Result<()> {
    if value.is_some() {
        return Err(Error::Config(format!(
            "`{what}` does not apply to {context}"
        )));
    }
    Ok(())
}

impl RawMarginal {
    fn build(&self) -> Result<MarginalDistribution> {
        let ctx = format!("marginal family `{}`", self.family);
        match self.family.as_str() {
            "bernoulli" => {
                forbid(&self.rate, "rate", &ctx)?;
                forbid(&self.tail, "tail", &ctx)?;
                forbid(&self.scale, "scale", &ctx)?;
                forbid(&self.lo, "lo", &ctx)?;
                forbid(&self.hi, "hi", &ctx)?;
                forbid(&self.c, "c", &ctx)?;
                MarginalDistribution::bernoulli(require(self.p, "p", &ctx)?)
            }
            "exponential" => {
                forbid(&self.p, "p", &ctx)?;
                forbid(&self.tail, "tail", &ctx)?;
                forbid(&self.scale, "scale", &ctx)?;
                forbid(&self.lo, "lo", &ctx)?;
                forbid(&self.hi, "hi", &ctx)?;
                forbid(&self.c, "c", &ctx)?;
                MarginalDistribution::exponential(require(self.rate, "rate", &ctx)?)
            }
            "pareto" => {
                forbid(&self.p, "p", &ctx)?;
                forbid(&self.rate, "rate", &ctx)?;
                forbid(&self.lo, "lo", &ctx)?;
                forbid(&self.hi, "hi", &ctx)?;
                forbid(&self.c, "c", &ctx)?;
                MarginalDistribution::pareto(
                    require(self.tail, "tail", &ctx)?,
                    require(self.scale, "scale", &ctx)?,
                )
            }
            "uniform" => {
                forbid(&self.p, "p", &ctx)?;
                forbid(&self.rate, "rate", &ctx)?;
                forbid(&self.tail, "tail", &ctx)?;
                forbid(&self.scale, "scale", &ctx)?;
                forbid(&self.c, "c", &ctx)?;
                MarginalDistribution::uniform(
                    require(self.lo, "lo", &ctx)?,
                    require(self.hi, "hi", &ctx)?,
                )
            }
            "pointmass" => {
                forbid(&self.p, "p", &ctx)?;
                forbid(&self.rate, "rate", &ctx)?;
                forbid(&self.tail, "tail", &ctx)?;
                forbid(&self.scale, "scale", &ctx)?;
                forbid(&self.lo, "lo", &ctx)?;
                forbid(&self.hi, "hi", &ctx)?;
                MarginalDistribution::point_mass(require(self.c, "c", &ctx)?)
            }
            other => Err(Error::Config(format!(
                "unknown marginal family `{other}` \
                 (expected bernoulli|exponential|pareto|uniform|pointmass)"
            ))),
        }
    }
}

impl RawWeights {
    fn build(&self) -> Result<WeightScheme> {
        let ctx = format!("weight scheme `{}`", self.scheme);
        let scheme = match self.scheme.as_str() {
            "constant" => {
                forbid(&self.beta, "beta", &ctx)?;
                forbid(&self.r, "r", &ctx)?;
                forbid(&self.values, "values", &ctx)?;
                WeightScheme::Constant
            }
            "power-growth" => {
                forbid(&self.r, "r", &ctx)?;
                forbid(&self.values, "values", &ctx)?;
                WeightScheme::PowerGrowth {
                    beta: require(self.beta, "beta", &ctx)?,
                }
            }
            "geometric" => {
                forbid(&self.beta, "beta", &ctx)?;
                forbid(&self.values, "values", &ctx)?;
                WeightScheme::Geometric {
                    r: require(self.r, "r", &ctx)?,
                }
            }
            "explicit" => {
                forbid(&self.beta, "beta", &ctx)?;
                forbid(&self.r, "r", &ctx)?;
                WeightScheme::Explicit {
                    values: require(self.values.clone(), "values", &ctx)?,
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown weight scheme `{other}` \
                     (expected constant|power-growth|geometric|explicit)"
                )))
            }
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

impl RawDistortion {
    fn build(&self) -> Result<DistortionFunction> {
        let ctx = format!("distortion family `{}`", self.family);
        let h = match self.family.as_str() {
            "identity" => {
                forbid(&self.gamma, "gamma", &ctx)?;
                forbid(&self.alpha, "alpha", &ctx)?;
                DistortionFunction::Identity
            }
            "power" => {
                forbid(&self.alpha, "alpha", &ctx)?;
                DistortionFunction::Power {
                    gamma: require(self.gamma, "gamma", &ctx)?,
                }
            }
            "proportional-hazard" => {
                forbid(&self.alpha, "alpha", &ctx)?;
                DistortionFunction::ProportionalHazard {
                    gamma: require(self.gamma, "gamma", &ctx)?,
                }
            }
            "var-indicator" => {
                forbid(&self.gamma, "gamma", &ctx)?;
                DistortionFunction::VarIndicator {
                    alpha: require(self.alpha, "alpha", &ctx)?,
                }
            }
            "es-clamp" => {
                forbid(&self.gamma, "gamma", &ctx)?;
                DistortionFunction::EsClamp {
                    alpha: require(self.alpha, "alpha", &ctx)?,
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown distortion family `{other}` \
                     (expected identity|power|proportional-hazard|var-indicator|es-clamp)"
                )))
            }
        };
        h.validate()?;
        Ok(h)
    }
}

impl RawMeasure {
    fn build(&self) -> Result<RiskMeasure> {
        let ctx = format!("measure kind `{}`", self.kind);
        let measure = match self.kind.as_str() {
            "mean" => {
                forbid(&self.alpha, "alpha", &ctx)?;
                forbid(&self.load, "C", &ctx)?;
                forbid(&self.distortion, "distortion", &ctx)?;
                RiskMeasure::Mean
            }
            "var" => {
                forbid(&self.load, "C", &ctx)?;
                forbid(&self.distortion, "distortion", &ctx)?;
                RiskMeasure::Var {
                    alpha: require(self.alpha, "alpha", &ctx)?,
                }
            }
            "es" => {
                forbid(&self.load, "C", &ctx)?;
                forbid(&self.distortion, "distortion", &ctx)?;
                RiskMeasure::Es {
                    alpha: require(self.alpha, "alpha", &ctx)?,
                }
            }
            "distortion" => {
                forbid(&self.alpha, "alpha", &ctx)?;
                let raw = self
                    .distortion
                    .as_ref()
                    .ok_or_else(|| Error::Config("measure kind `distortion` requires a [measure.distortion] table".into()))?;
                RiskMeasure::Distortion {
                    distortion: raw.build()?,
                    load: self.load.unwrap_or(1.0),
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown measure kind `{other}` (expected mean|var|es|distortion)"
                )))
            }
        };
        measure.validate()?;
        Ok(measure)
    }
}

impl RawYoung {
    fn build(&self) -> Result<YoungFunction> {
        let ctx = format!("young family `{}`", self.family);
        let y = match self.family.as_str() {
            "zero" => {
                forbid(&self.p, "p", &ctx)?;
                YoungFunction::Zero
            }
            "power" => YoungFunction::Power {
                p: require(self.p, "p", &ctx)?,
            },
            "exp-minus-one" => {
                forbid(&self.p, "p", &ctx)?;
                YoungFunction::ExpMinusOne
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown young family `{other}` (expected zero|power|exp-minus-one)"
                )))
            }
        };
        y.validate()?;
        Ok(y)
    }
}

fn parse_kind(kind: &str) -> Result<ExperimentKind> {
    Ok(match kind {
        "uel" => ExperimentKind::UelDecay,
        "premium" => ExperimentKind::PremiumConvergence,
        "ratio" => ExperimentKind::RiskRatio,
        "worst-case" => ExperimentKind::WorstCaseRatio,
        "diagnostics" => ExperimentKind::Diagnostics,
        other => {
            return Err(Error::Config(format!(
                "unknown experiment kind `{other}` \
                 (expected uel|premium|ratio|worst-case|diagnostics)"
            )))
        }
    })
}

/// Parses and validates a TOML config, filling documented defaults:
/// grid {100, 1000, 10000}, replications 2000 (4000 for uel), tolerance 0.10
/// relative for ratio-like targets and 0.01 absolute for the normalized
/// unexpected loss, epsilon 0.1, q 2.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let kind = parse_kind(&raw.kind)?;
    let marginal = raw.marginal.build()?;
    let weights = raw.weights.build()?;
    let measure = match (&raw.measure, kind) {
        (Some(m), _) => m.build()?,
        // Diagnostics default to the mean; every other kind names a measure.
        (None, ExperimentKind::Diagnostics) => RiskMeasure::Mean,
        (None, _) => {
            return Err(Error::Config(
                "config requires a [measure] table for this experiment kind".into(),
            ))
        }
    };
    let mut cfg = ExperimentConfig::new(kind, marginal, weights, measure, DEFAULT_SEED);
    if let Some(seed) = raw.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = raw.n_grid {
        cfg.n_grid = grid;
    }
    if let Some(m) = raw.replications {
        cfg.replications = m;
    }
    if let Some(t) = raw.tolerance {
        cfg.tolerance = t;
    }
    if let Some(e) = raw.epsilon {
        cfg.epsilon = e;
    }
    if let Some(q) = raw.q {
        cfg.dvp_q = q;
    }
    cfg.moment_p = raw.p;
    cfg.z_marginal = raw.z_marginal.as_ref().map(|m| m.build()).transpose()?;
    cfg.young = raw.young.as_ref().map(|y| y.build()).transpose()?;
    cfg.validate()?;
    Ok(cfg)
}

/// Float formatting for all CSV/console output: Rust's shortest
/// round-trip representation, bit-stable across runs.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn results_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,total_weight,estimate,mc_stderr,target,abs_error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            fmt_f64(r.total_weight),
            fmt_f64(r.estimate),
            fmt_f64(r.mc_stderr),
            fmt_f64(r.target),
            fmt_f64(r.abs_error)
        ));
    }
    out
}

fn plotdata_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,estimate,target\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.n,
            fmt_f64(r.estimate),
            fmt_f64(r.target)
        ));
    }
    out
}

fn diagnostics_csv(report: &DiagnosticsReport) -> String {
    let mut out = String::from("n,total_weight,toeplitz,wlln_tail,dvp_stat,moment_estimate\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            fmt_f64(r.total_weight),
            fmt_f64(r.toeplitz),
            fmt_f64(r.wlln_tail),
            fmt_f64(r.dvp_stat),
            fmt_f64(r.moment_estimate)
        ));
    }
    out
}

fn manifest_json(cfg: &ExperimentConfig, outputs: &[String], wall_ms: u64) -> serde_json::Value {
    json!({
        "config_digest": cfg.digest(),
        "master_seed": cfg.seed,
        "artifact_version": env!("CARGO_PKG_VERSION"),
        "outputs": outputs,
        "wall_ms": wall_ms,
    })
}

fn write_convergence_outputs(
    out_dir: &Path,
    cfg: &ExperimentConfig,
    result: &ExperimentResult,
) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let outputs = vec![
        "results.csv".to_string(),
        "plotdata.csv".to_string(),
        "summary.json".to_string(),
    ];
    fs::write(out_dir.join("results.csv"), results_csv(&result.rows))?;
    fs::write(out_dir.join("plotdata.csv"), plotdata_csv(&result.rows))?;
    let summary = json!({
        "kind": cfg.kind.as_str(),
        "measure": result.measure,
        "verdict": result.verdict,
        "tolerance_abs": result.tolerance_abs,
        "rows": result.rows,
        "worst_case_check": result.worst_case_check,
        "manifest": manifest_json(cfg, &outputs, result.wall_time_ms),
    });
    fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
    )?;
    Ok(())
}

fn write_diagnostics_outputs(
    out_dir: &Path,
    cfg: &ExperimentConfig,
    report: &DiagnosticsReport,
) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let outputs = vec!["diagnostics.csv".to_string(), "summary.json".to_string()];
    fs::write(out_dir.join("diagnostics.csv"), diagnostics_csv(report))?;
    let summary = json!({
        "kind": cfg.kind.as_str(),
        "flags": report.flags,
        "dvp_sup": report.dvp_sup,
        "rows": report.rows,
        "manifest": manifest_json(cfg, &outputs, report.wall_time_ms),
    });
    fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
    )?;
    Ok(())
}

fn dump_samples(out_dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
    // Debug aid: re-simulates the i.i.d. aggregate per grid point (same
    // substreams, so exactly the values the experiment consumed) and writes
    // one-column CSVs.
    for &n in &cfg.n_grid {
        let sim = simulate_aggregate(
            &MarginalAssignment::Shared(cfg.marginal),
            &cfg.weights,
            n,
            CouplingKind::Iid,
            cfg.replications,
            SeedSpec::new(cfg.seed),
        )?;
        let mut buf = Vec::new();
        sim.normalized_sample().write_csv(&mut buf)?;
        fs::write(out_dir.join(format!("sample_n{n}.csv")), buf)?;
    }
    Ok(())
}

/// Options common to the experiment subcommands.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for results.csv / plotdata.csv / summary.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for the replication loop; must not change outputs.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Also dump the simulated normalized aggregate per n as one-column CSVs.
    #[arg(long, default_value_t = false)]
    pub dump_samples: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Seed for the fuzzed invariant checks.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(
    name = "riskpool",
    version,
    about = "Monte Carlo experiments for risk measures on pooled portfolios"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unexpected-loss decay along the portfolio-size grid.
    Uel(RunArgs),
    /// Normalized distortion-premium convergence to C * mean.
    Premium(RunArgs),
    /// Co-monotonic over pooled risk ratio against its closed-form limit.
    Ratio(RunArgs),
    /// Worst-case aggregate risk ratio for coherent measures.
    WorstCase(RunArgs),
    /// Toeplitz, weak-law, and moment diagnostics with negative-control flags.
    Diagnostics(RunArgs),
    /// Runs the full invariant suite of all modules and reports pass counts.
    Selftest(SelftestArgs),
}

fn expected_kind(command: &Command) -> Option<ExperimentKind> {
    match command {
        Command::Uel(_) => Some(ExperimentKind::UelDecay),
        Command::Premium(_) => Some(ExperimentKind::PremiumConvergence),
        Command::Ratio(_) => Some(ExperimentKind::RiskRatio),
        Command::WorstCase(_) => Some(ExperimentKind::WorstCaseRatio),
        Command::Diagnostics(_) => Some(ExperimentKind::Diagnostics),
        Command::Selftest(_) => None,
    }
}

fn run_with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    match threads {
        Some(t) if t > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

fn execute_run(kind: ExperimentKind, args: &RunArgs) -> Result<()> {
    let mut cfg = parse_config(&args.config)?;
    if cfg.kind != kind {
        return Err(Error::Config(format!(
            "config kind `{}` does not match subcommand `{}`",
            cfg.kind.as_str(),
            kind.as_str()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let output = run_with_threads(args.threads, || run_experiment(&cfg))?;
    match &output {
        ExperimentOutput::Convergence(result) => {
            write_convergence_outputs(&args.out, &cfg, result)?;
            println!(
                "{}: verdict {:?}, {} grid points, results in {}",
                cfg.kind.as_str(),
                result.verdict,
                result.rows.len(),
                args.out.display()
            );
            for r in &result.rows {
                println!(
                    "  n={:<8} estimate={} target={} abs_error={} stderr={}",
                    r.n,
                    fmt_f64(r.estimate),
                    fmt_f64(r.target),
                    fmt_f64(r.abs_error),
                    fmt_f64(r.mc_stderr)
                );
            }
        }
        ExperimentOutput::Diagnostics(report) => {
            write_diagnostics_outputs(&args.out, &cfg, report)?;
            println!(
                "diagnostics: {} grid points, {} flag(s), results in {}",
                report.rows.len(),
                report.flags.len(),
                args.out.display()
            );
            for f in &report.flags {
                println!("  flag: {f:?}");
            }
        }
    }
    if args.dump_samples {
        dump_samples(&args.out, &cfg)?;
    }
    Ok(())
}

fn execute_selftest(args: &SelftestArgs) -> i32 {
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let outcomes = crate::selftest::run_all(seed);
    let mut passed = 0usize;
    for o in &outcomes {
        if o.passed {
            passed += 1;
            println!("PASS  {:<64} ({} cases)", o.name, o.cases);
        } else {
            println!("FAIL  {:<64} {}", o.name, o.detail);
        }
    }
    println!("selftest: {passed}/{} checks passed", outcomes.len());
    if passed == outcomes.len() {
        0
    } else {
        3
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> i32 {
    match &cli.command {
        Command::Selftest(args) => execute_selftest(args),
        command => {
            let kind = expected_kind(command).expect("experiment subcommand");
            let args = match command {
                Command::Uel(a)
                | Command::Premium(a)
                | Command::Ratio(a)
                | Command::WorstCase(a)
                | Command::Diagnostics(a) => a,
                Command::Selftest(_) => unreachable!(),
            };
            match execute_run(kind, args) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
    }
}
