//! Convergence experiments: unexpected-loss decay, premium convergence,
//! risk-ratio limits against co-monotonic alternatives, worst-case
//! aggregation ratios, and the diagnostics battery (Toeplitz ratios,
//! weak-law tail probabilities, moment diagnostics, negative controls).
//!
//! Every experiment walks a grid of portfolio sizes, simulates the weighted
//! aggregate, and compares a normalized estimate against its closed-form
//! limit. Standard errors are nonparametric batch means over 20 batches in
//! replication-index order, so results are bit-identical across thread
//! counts.

use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::distributions::MarginalDistribution;
use crate::empirical::EmpiricalSample;
use crate::error::{Error, Result};
use crate::orlicz::{self, Delta2Estimate, YoungFunction};
use crate::portfolio::{
    closed_form_risk, simulate_aggregate, simulate_aggregate_with_moment,
    worst_case_aggregate_risk, CouplingKind, MarginalAssignment, SeedSpec, WeightScheme,
};
use crate::risk::RiskMeasure;

/// Batches used for nonparametric Monte Carlo standard errors.
pub const BATCH_COUNT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[serde(rename = "uel")]
    UelDecay,
    #[serde(rename = "premium")]
    PremiumConvergence,
    #[serde(rename = "ratio")]
    RiskRatio,
    #[serde(rename = "worst-case")]
    WorstCaseRatio,
    #[serde(rename = "diagnostics")]
    Diagnostics,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::UelDecay => "uel",
            Self::PremiumConvergence => "premium",
            Self::RiskRatio => "ratio",
            Self::WorstCaseRatio => "worst-case",
            Self::Diagnostics => "diagnostics",
        }
    }

    /// Default replication count: UEL tail estimates get the larger budget.
    pub fn default_replications(&self) -> usize {
        match self {
            Self::UelDecay => 4000,
            _ => 2000,
        }
    }

    /// Default convergence tolerance: absolute for the normalized UEL
    /// (target 0), relative for ratio-like targets.
    pub fn default_tolerance(&self) -> f64 {
        match self {
            Self::UelDecay => 0.01,
            _ => 0.10,
        }
    }
}

/// A fully validated experiment description. Serialization order is fixed by
/// the struct, so the config digest is stable under key reordering in the
/// source file.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub marginal: MarginalDistribution,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_marginal: Option<MarginalDistribution>,
    pub weights: WeightScheme,
    pub measure: RiskMeasure,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub epsilon: f64,
    #[serde(rename = "p", skip_serializing_if = "Option::is_none")]
    pub moment_p: Option<f64>,
    #[serde(rename = "q")]
    pub dvp_q: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub young: Option<YoungFunction>,
}

impl ExperimentConfig {
    pub fn new(
        kind: ExperimentKind,
        marginal: MarginalDistribution,
        weights: WeightScheme,
        measure: RiskMeasure,
        seed: u64,
    ) -> Self {
        Self {
            kind,
            marginal,
            z_marginal: None,
            weights,
            measure,
            n_grid: vec![100, 1000, 10_000],
            replications: kind.default_replications(),
            seed,
            epsilon: 0.1,
            moment_p: None,
            dvp_q: 2.0,
            tolerance: kind.default_tolerance(),
            young: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.marginal.validate()?;
        if let Some(z) = &self.z_marginal {
            z.validate()?;
        }
        self.weights.validate()?;
        self.measure.validate()?;
        if let Some(y) = &self.young {
            y.validate()?;
        }
        if self.n_grid.is_empty() {
            return Err(Error::Config("n_grid must be nonempty".into()));
        }
        if self.n_grid[0] < 1 {
            return Err(Error::Config("portfolio sizes must be >= 1".into()));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(format!(
                "n_grid must be strictly increasing, got {:?}",
                self.n_grid
            )));
        }
        let min_reps = if self.kind == ExperimentKind::Diagnostics {
            2
        } else {
            100
        };
        if self.replications < min_reps {
            return Err(Error::Config(format!(
                "{} experiments need at least {min_reps} replications, got {}",
                self.kind.as_str(),
                self.replications
            )));
        }
        if self.tolerance <= 0.0 || self.tolerance.is_nan() {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.epsilon <= 0.0 || self.epsilon.is_nan() {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.dvp_q <= 1.0 || self.dvp_q.is_nan() {
            return Err(Error::Config(
                "uniform-integrability exponent q must exceed 1".into(),
            ));
        }
        if let Some(p) = self.moment_p {
            if p < 1.0 || p.is_nan() {
                return Err(Error::Config(format!(
                    "moment order p must satisfy p >= 1, got {p}"
                )));
            }
        }
        if self.kind == ExperimentKind::PremiumConvergence {
            if !matches!(self.measure, RiskMeasure::Distortion { .. }) {
                return Err(Error::Config(
                    "premium experiments require a distortion measure".into(),
                ));
            }
            if self.moment_p.is_none() {
                return Err(Error::Config(
                    "premium experiments require the moment order p".into(),
                ));
            }
        }
        if self.z_marginal.is_some() && self.kind != ExperimentKind::WorstCaseRatio {
            return Err(Error::Config(
                "z_marginal applies to worst-case experiments only".into(),
            ));
        }
        Ok(())
    }

    /// Content hash of the canonicalized config (stable JSON field order).
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex::encode(hasher.finalize())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converging,
    Inconclusive,
    Diverging,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub total_weight: f64,
    pub estimate: f64,
    pub mc_stderr: f64,
    pub target: f64,
    pub abs_error: f64,
}

/// Per-n cross-check of the worst-case experiment: a simulated co-monotonic
/// copy portfolio must reproduce the closed-form worst case within Monte
/// Carlo error for co-monotonically additive measures.
#[derive(Debug, Clone, Serialize)]
pub struct WorstCaseCheckRow {
    pub n: usize,
    pub simulated: f64,
    pub closed_form: f64,
    pub mc_stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub kind: ExperimentKind,
    pub measure: String,
    pub rows: Vec<ConvergenceRow>,
    pub verdict: Verdict,
    /// Absolute error threshold the verdict uses (relative tolerances are
    /// resolved against the target here).
    pub tolerance_abs: f64,
    pub seed: u64,
    pub config_digest: String,
    pub wall_time_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_case_check: Option<Vec<WorstCaseCheckRow>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsRow {
    pub n: usize,
    pub total_weight: f64,
    pub toeplitz: f64,
    pub wlln_tail: f64,
    pub dvp_stat: f64,
    pub moment_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "flag", rename_all = "kebab-case")]
pub enum DiagnosticFlag {
    /// Toeplitz ratio failed to decay across the grid (no pooling).
    ToeplitzNonVanishing { first: f64, last: f64 },
    /// Raw q-th moment estimate of the individual draws keeps growing; the
    /// uniform moment bound fails (heavy tails).
    MomentGrowing { q: f64, first: f64, last: f64 },
    /// The configured distortion/moment pair has an infinite premium
    /// constant.
    DistortionNotIntegrable { p: f64 },
    /// The configured Young function fails the doubling condition.
    Delta2Violation { at: f64, ratio: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub rows: Vec<DiagnosticsRow>,
    pub flags: Vec<DiagnosticFlag>,
    /// Sup over the grid of the de la Vallee-Poussin statistic.
    pub dvp_sup: f64,
    pub seed: u64,
    pub config_digest: String,
    pub wall_time_ms: u64,
}

#[derive(Debug)]
pub enum ExperimentOutput {
    Convergence(ExperimentResult),
    Diagnostics(DiagnosticsReport),
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::UelDecay => run_uel_decay(cfg).map(ExperimentOutput::Convergence),
        ExperimentKind::PremiumConvergence => {
            run_premium_convergence(cfg).map(ExperimentOutput::Convergence)
        }
        ExperimentKind::RiskRatio => run_risk_ratio(cfg).map(ExperimentOutput::Convergence),
        ExperimentKind::WorstCaseRatio => {
            run_worst_case_ratio(cfg).map(ExperimentOutput::Convergence)
        }
        ExperimentKind::Diagnostics => run_diagnostics(cfg).map(ExperimentOutput::Diagnostics),
    }
}

fn batch_values(values: &[f64], estimator: impl Fn(&EmpiricalSample) -> Result<f64>) -> Result<Vec<f64>> {
    let m = values.len();
    let b = BATCH_COUNT.min(m / 2).max(2);
    (0..b)
        .map(|k| {
            let lo = k * m / b;
            let hi = (k + 1) * m / b;
            estimator(&EmpiricalSample::from_raw(&values[lo..hi])?)
        })
        .collect()
}

fn stderr_of(batches: &[f64]) -> f64 {
    let b = batches.len() as f64;
    let mean = batches.iter().sum::<f64>() / b;
    let var = batches.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
    (var / b).sqrt()
}

fn verdict_for(rows: &[ConvergenceRow], tol_abs: f64, guard_tripped: bool) -> Verdict {
    if guard_tripped || rows.iter().any(|r| !r.abs_error.is_finite()) {
        return Verdict::Inconclusive;
    }
    let tail = &rows[rows.len().saturating_sub(3)..];
    let nonincreasing = tail.windows(2).all(|w| w[1].abs_error <= w[0].abs_error);
    let increasing = tail.windows(2).all(|w| w[1].abs_error > w[0].abs_error);
    let final_ok = rows.last().is_some_and(|r| r.abs_error <= tol_abs);
    if nonincreasing && final_ok {
        Verdict::Converging
    } else if increasing && !final_ok && tail.len() >= 2 {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    }
}

fn require_finite_mean(dist: &MarginalDistribution) -> Result<f64> {
    let m = dist.mean();
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Divergent(format!(
            "first moment of {} diverges; the weak law has no finite benchmark",
            dist.family_name()
        )))
    }
}

fn require_positive_mean(dist: &MarginalDistribution) -> Result<f64> {
    let m = require_finite_mean(dist)?;
    if m > 0.0 {
        Ok(m)
    } else {
        Err(Error::InvalidParameter(format!(
            "ratio experiments require a positive common mean, got E[X] = {m}"
        )))
    }
}

/// Whether `E[X^p]` is finite; only the Pareto family can lose moments.
fn moment_is_finite(dist: &MarginalDistribution, p: f64) -> bool {
    match *dist {
        MarginalDistribution::Pareto { tail, .. } => tail > p,
        _ => true,
    }
}

/// Unexpected-loss decay: the normalized excess of the risk measure over the
/// weighted expected loss must vanish along the grid (target 0).
pub fn run_uel_decay(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mean = require_finite_mean(&cfg.marginal)?;
    if matches!(cfg.measure, RiskMeasure::Distortion { .. }) && !cfg.marginal.is_nonnegative() {
        return Err(Error::InvalidParameter(
            "distortion premia act on nonnegative losses".into(),
        ));
    }
    // Benchmark per unit weight: C*m for premium measures, m otherwise.
    let benchmark = cfg.measure.cash_slope() * mean;
    let marginals = MarginalAssignment::Shared(cfg.marginal);
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let sim = simulate_aggregate(
            &marginals,
            &cfg.weights,
            n,
            CouplingKind::Iid,
            cfg.replications,
            SeedSpec::new(cfg.seed),
        )?;
        // Unexpected loss per unit of total weight. Positive homogeneity
        // (required of the measure) moves the evaluation to the normalized
        // scale, which stays finite where raw geometric aggregates overflow.
        let estimate = cfg.measure.evaluate(&sim.normalized_sample())? - benchmark;
        let batches = batch_values(&sim.normalized, |s| {
            Ok(cfg.measure.evaluate(s)? - benchmark)
        })?;
        rows.push(ConvergenceRow {
            n,
            total_weight: sim.total_weight,
            estimate,
            mc_stderr: stderr_of(&batches),
            target: 0.0,
            abs_error: estimate.abs(),
        });
    }
    let verdict = verdict_for(&rows, cfg.tolerance, false);
    Ok(ExperimentResult {
        kind: cfg.kind,
        measure: cfg.measure.name(),
        rows,
        verdict,
        tolerance_abs: cfg.tolerance,
        seed: cfg.seed,
        config_digest: cfg.digest(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        worst_case_check: None,
    })
}

/// Premium convergence: the normalized distortion premium of the aggregate
/// approaches `C * m` provided the integrability constant and the p-th
/// moment are finite; otherwise the run is refused.
pub fn run_premium_convergence(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let (distortion, load) = match cfg.measure {
        RiskMeasure::Distortion { distortion, load } => (distortion, load),
        _ => unreachable!("validated above"),
    };
    let p = cfg.moment_p.expect("validated above");
    let constant = distortion.integrability_constant(p);
    if !constant.is_finite() {
        return Err(Error::NotIntegrable(format!(
            "integral of h(1/x^p) over [1,inf) diverges for {distortion:?} at p = {p}; \
             premium values on p-integrable losses are not guaranteed finite"
        )));
    }
    if !moment_is_finite(&cfg.marginal, p) {
        return Err(Error::Divergent(format!(
            "moment bound fails: E[X^{p}] diverges for {:?}",
            cfg.marginal
        )));
    }
    if !cfg.marginal.is_nonnegative() {
        return Err(Error::InvalidParameter(
            "premium experiments require nonnegative losses".into(),
        ));
    }
    let mean = require_finite_mean(&cfg.marginal)?;
    let target = load * mean;
    let marginals = MarginalAssignment::Shared(cfg.marginal);
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let sim = simulate_aggregate(
            &marginals,
            &cfg.weights,
            n,
            CouplingKind::Iid,
            cfg.replications,
            SeedSpec::new(cfg.seed),
        )?;
        let estimate = cfg.measure.evaluate(&sim.normalized_sample())?;
        let batches = batch_values(&sim.normalized, |s| cfg.measure.evaluate(s))?;
        rows.push(ConvergenceRow {
            n,
            total_weight: sim.total_weight,
            estimate,
            mc_stderr: stderr_of(&batches),
            target,
            abs_error: (estimate - target).abs(),
        });
    }
    let tol_abs = cfg.tolerance * target.abs();
    let verdict = verdict_for(&rows, tol_abs, false);
    Ok(ExperimentResult {
        kind: cfg.kind,
        measure: cfg.measure.name(),
        rows,
        verdict,
        tolerance_abs: tol_abs,
        seed: cfg.seed,
        config_digest: cfg.digest(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        worst_case_check: None,
    })
}

/// Closed-form limit of the co-monotonic-over-pooled ratio: `R(Z_1)/E[X_1]`,
/// with the Bernoulli/exponential VaR and ES values in closed form and the
/// distortion limit via the distorted-survival integral (the load cancels).
pub fn closed_form_ratio(measure: &RiskMeasure, marginal: &MarginalDistribution) -> Result<f64> {
    measure.validate()?;
    marginal.validate()?;
    let mean = require_positive_mean(marginal)?;
    match *measure {
        RiskMeasure::Mean => Ok(1.0),
        RiskMeasure::Var { alpha } => {
            if let MarginalDistribution::Bernoulli { p } = *marginal {
                if alpha <= 1.0 - p {
                    return Err(Error::InvalidParameter(format!(
                        "VaR ratio for bernoulli({p}) is derived for levels alpha in (1-p, 1); \
                         got alpha = {alpha} <= {}",
                        1.0 - p
                    )));
                }
            }
            Ok(marginal.closed_form_var(alpha) / mean)
        }
        RiskMeasure::Es { alpha } => Ok(marginal.closed_form_es(alpha)? / mean),
        RiskMeasure::Distortion { distortion, .. } => {
            let premium = crate::distortion::marginal_premium(&distortion, marginal)?;
            if premium.is_finite() {
                Ok(premium / mean)
            } else {
                Err(Error::Divergent(format!(
                    "distorted survival integral diverges for {distortion:?} on {marginal:?}"
                )))
            }
        }
    }
}

/// Risk-ratio limit: measure of the co-monotonic aggregate over the measure
/// of the i.i.d. aggregate, per portfolio size, against the closed-form
/// limit.
pub fn run_risk_ratio(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    require_positive_mean(&cfg.marginal)?;
    let target = closed_form_ratio(&cfg.measure, &cfg.marginal)?;
    let marginals = MarginalAssignment::Shared(cfg.marginal);
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    let mut guard_tripped = false;
    for &n in &cfg.n_grid {
        let com = simulate_aggregate(
            &marginals,
            &cfg.weights,
            n,
            CouplingKind::Comonotonic,
            cfg.replications,
            SeedSpec::new(cfg.seed),
        )?;
        let iid = simulate_aggregate(
            &marginals,
            &cfg.weights,
            n,
            CouplingKind::Iid,
            cfg.replications,
            SeedSpec::new(cfg.seed),
        )?;
        let numerator = cfg.measure.evaluate(&com.normalized_sample())?;
        let denominator = cfg.measure.evaluate(&iid.normalized_sample())?;
        let den_batches = batch_values(&iid.normalized, |s| cfg.measure.evaluate(s))?;
        let den_se = stderr_of(&den_batches);
        // No division against a denominator statistically indistinguishable
        // from zero; the verdict downgrades to Inconclusive instead.
        if denominator.abs() <= 3.0 * den_se {
            guard_tripped = true;
            rows.push(ConvergenceRow {
                n,
                total_weight: iid.total_weight,
                estimate: f64::NAN,
                mc_stderr: f64::NAN,
                target,
                abs_error: f64::NAN,
            });
            continue;
        }
        let num_batches = batch_values(&com.normalized, |s| cfg.measure.evaluate(s))?;
        let ratio_batches: Vec<f64> = num_batches
            .iter()
            .zip(&den_batches)
            .map(|(nb, db)| nb / db)
            .collect();
        let estimate = numerator / denominator;
        rows.push(ConvergenceRow {
            n,
            total_weight: iid.total_weight,
            estimate,
            mc_stderr: stderr_of(&ratio_batches),
            target,
            abs_error: (estimate - target).abs(),
        });
    }
    let tol_abs = cfg.tolerance * target.abs();
    let verdict = verdict_for(&rows, tol_abs, guard_tripped);
    Ok(ExperimentResult {
        kind: cfg.kind,
        measure: cfg.measure.name(),
        rows,
        verdict,
        tolerance_abs: tol_abs,
        seed: cfg.seed,
        config_digest: cfg.digest(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        worst_case_check: None,
    })
}

/// Worst-case aggregation ratio under a coherent, law-invariant,
/// co-monotonically additive measure: `(n mean-lambda) R(Z)` over the
/// measure of the pooled X-aggregate, with target `R(Z)/E[X_1]`. Also
/// simulates the co-monotonic copy portfolio and records how closely it
/// attains the closed-form worst case.
pub fn run_worst_case_ratio(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    match cfg.measure {
        RiskMeasure::Var { .. } => {
            return Err(Error::Unsupported(
                "worst-case aggregation under VaR is out of scope \
                 (VaR is not coherent; its sharp dependence bounds are a separate construction)"
                    .into(),
            ))
        }
        RiskMeasure::Distortion { load, .. } if load != 1.0 => {
            return Err(Error::Unsupported(format!(
                "coherent risk measures are cash-additive; a distortion premium with C = {load} \
                 is not. Use C = 1 for worst-case experiments"
            )));
        }
        _ => {}
    }
    let z = cfg.z_marginal.unwrap_or(cfg.marginal);
    let mean_x = require_positive_mean(&cfg.marginal)?;
    let risk_z = closed_form_risk(&cfg.measure, &z)?;
    let target = risk_z / mean_x;
    let x_marginals = MarginalAssignment::Shared(cfg.marginal);
    let z_marginals = MarginalAssignment::Shared(z);
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    let mut checks = Vec::with_capacity(cfg.n_grid.len());
    let mut guard_tripped = false;
    for &n in &cfg.n_grid {
        let wc = worst_case_aggregate_risk(&cfg.measure, &z, &cfg.weights, n)?;
        let iid = simulate_aggregate(
            &x_marginals,
            &cfg.weights,
            n,
            CouplingKind::Iid,
            cfg.replications,
            SeedSpec::new(cfg.seed),
        )?;
        let denominator = cfg.measure.evaluate(&iid.normalized_sample())?;
        let den_batches = batch_values(&iid.normalized, |s| cfg.measure.evaluate(s))?;
        let den_se = stderr_of(&den_batches);

        // Simulated co-monotonic copies of Z must attain the worst case for
        // co-monotonically additive measures.
        let com = simulate_aggregate(
            &z_marginals,
            &cfg.weights,
            n,
            CouplingKind::Comonotonic,
            cfg.replications,
            SeedSpec::new(cfg.seed),
        )?;
        let sim_normalized = cfg.measure.evaluate(&com.normalized_sample())?;
        let sim_batches = batch_values(&com.normalized, |s| cfg.measure.evaluate(s))?;
        checks.push(WorstCaseCheckRow {
            n,
            simulated: sim_normalized * com.total_weight,
            closed_form: wc,
            mc_stderr: stderr_of(&sim_batches) * com.total_weight,
        });

        if denominator.abs() <= 3.0 * den_se {
            guard_tripped = true;
            rows.push(ConvergenceRow {
                n,
                total_weight: iid.total_weight,
                estimate: f64::NAN,
                mc_stderr: f64::NAN,
                target,
                abs_error: f64::NAN,
            });
            continue;
        }
        // wc / (total * denominator) = risk_z / denominator.
        let estimate = risk_z / denominator;
        let ratio_batches: Vec<f64> = den_batches.iter().map(|db| risk_z / db).collect();
        rows.push(ConvergenceRow {
            n,
            total_weight: iid.total_weight,
            estimate,
            mc_stderr: stderr_of(&ratio_batches),
            target,
            abs_error: (estimate - target).abs(),
        });
    }
    let tol_abs = cfg.tolerance * target.abs();
    let verdict = verdict_for(&rows, tol_abs, guard_tripped);
    Ok(ExperimentResult {
        kind: cfg.kind,
        measure: cfg.measure.name(),
        rows,
        verdict,
        tolerance_abs: tol_abs,
        seed: cfg.seed,
        config_digest: cfg.digest(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        worst_case_check: Some(checks),
    })
}

/// Diagnostics battery: Toeplitz column, weak-law tail probabilities,
/// de la Vallee-Poussin statistics of the centered normalized averages, raw
/// moment estimates of the individual draws, and violation flags for the
/// configured negative controls. Diagnostics report; they never fail.
pub fn run_diagnostics(cfg: &ExperimentConfig) -> Result<DiagnosticsReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mean = cfg.marginal.mean();
    let marginals = MarginalAssignment::Shared(cfg.marginal);
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    let mut centered_samples = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let sim = simulate_aggregate_with_moment(
            &marginals,
            &cfg.weights,
            n,
            CouplingKind::Iid,
            cfg.replications,
            SeedSpec::new(cfg.seed),
            cfg.dvp_q,
        )?;
        let toeplitz = cfg.weights.toeplitz_ratio(n)?;
        let (wlln_tail, dvp_stat) = if mean.is_finite() {
            let sample = sim.normalized_sample();
            let tail = orlicz::wlln_diagnostic(&[sample], &[mean], cfg.epsilon)[0];
            let centered: Vec<f64> = sim.normalized.iter().map(|a| a - mean).collect();
            let centered_sample = EmpiricalSample::from_raw(&centered)?;
            let dvp = orlicz::phi_moment(&centered_sample, cfg.dvp_q);
            centered_samples.push(centered_sample);
            (tail, dvp)
        } else {
            (f64::NAN, f64::NAN)
        };
        rows.push(DiagnosticsRow {
            n,
            total_weight: sim.total_weight,
            toeplitz,
            wlln_tail,
            dvp_stat,
            moment_estimate: sim.component_moment.expect("moment requested"),
        });
    }
    let dvp_sup = if centered_samples.is_empty() {
        f64::NAN
    } else {
        orlicz::ui_diagnostic(&centered_samples, cfg.dvp_q)
    };

    let mut flags = Vec::new();
    let first = rows.first().expect("nonempty grid");
    let last = rows.last().expect("nonempty grid");
    if last.toeplitz > 0.5 * first.toeplitz {
        flags.push(DiagnosticFlag::ToeplitzNonVanishing {
            first: first.toeplitz,
            last: last.toeplitz,
        });
    }
    if !last.moment_estimate.is_finite()
        || last.moment_estimate > 1.5 * first.moment_estimate
    {
        flags.push(DiagnosticFlag::MomentGrowing {
            q: cfg.dvp_q,
            first: first.moment_estimate,
            last: last.moment_estimate,
        });
    }
    if let (RiskMeasure::Distortion { distortion, .. }, Some(p)) = (cfg.measure, cfg.moment_p) {
        if !distortion.integrability_constant(p).is_finite() {
            flags.push(DiagnosticFlag::DistortionNotIntegrable { p });
        }
    }
    if let Some(young) = &cfg.young {
        if let Delta2Estimate::Violation { at, ratio } =
            orlicz::delta2_estimate(young, &orlicz::default_delta2_grid())
        {
            flags.push(DiagnosticFlag::Delta2Violation { at, ratio });
        }
    }

    Ok(DiagnosticsReport {
        rows,
        flags,
        dvp_sup,
        seed: cfg.seed,
        config_digest: cfg.digest(),
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::DistortionFunction;

    fn quick_cfg(
        kind: ExperimentKind,
        marginal: MarginalDistribution,
        measure: RiskMeasure,
    ) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(kind, marginal, WeightScheme::Constant, measure, 123);
        cfg.n_grid = vec![50, 200];
        cfg.replications = 400;
        cfg
    }

    #[test]
    fn closed_form_ratio_examples() {
        let bern = MarginalDistribution::bernoulli(0.1).unwrap();
        let exp = MarginalDistribution::exponential(1.0).unwrap();
        assert_eq!(
            closed_form_ratio(&RiskMeasure::var(0.95).unwrap(), &bern).unwrap(),
            10.0
        );
        assert!(
            (closed_form_ratio(
                &RiskMeasure::es(0.5).unwrap(),
                &MarginalDistribution::bernoulli(0.6).unwrap()
            )
            .unwrap()
                - 1.0 / 0.6)
                .abs()
                < 1e-15
        );
        assert_eq!(
            closed_form_ratio(
                &RiskMeasure::distortion(DistortionFunction::Identity, 1.0).unwrap(),
                &exp
            )
            .unwrap(),
            1.0
        );
        assert!(
            (closed_form_ratio(&RiskMeasure::var(0.95).unwrap(), &exp).unwrap()
                - 2.995732273553991)
                .abs()
                < 1e-12
        );
        assert!(
            (closed_form_ratio(&RiskMeasure::es(0.95).unwrap(), &exp).unwrap()
                - 3.995732273553991)
                .abs()
                < 1e-12
        );
        // out of regime: alpha <= 1-p
        assert!(closed_form_ratio(&RiskMeasure::var(0.5).unwrap(), &bern).is_err());
    }

    #[test]
    fn mean_measure_uel_control() {
        for (marginal, weights) in [
            (
                MarginalDistribution::bernoulli(0.2).unwrap(),
                WeightScheme::Constant,
            ),
            (
                MarginalDistribution::exponential(2.0).unwrap(),
                WeightScheme::PowerGrowth { beta: 1.0 },
            ),
            (
                MarginalDistribution::uniform(0.0, 4.0).unwrap(),
                WeightScheme::PowerGrowth { beta: -0.5 },
            ),
        ] {
            let mut cfg = quick_cfg(ExperimentKind::UelDecay, marginal, RiskMeasure::Mean);
            cfg.weights = weights;
            let res = run_uel_decay(&cfg).unwrap();
            for row in &res.rows {
                assert!(
                    row.estimate.abs() <= 3.0 * row.mc_stderr + 1e-12,
                    "{marginal:?}: UEL {} vs stderr {}",
                    row.estimate,
                    row.mc_stderr
                );
            }
        }
    }

    #[test]
    fn point_mass_uel_is_identically_zero() {
        let cfg = quick_cfg(
            ExperimentKind::UelDecay,
            MarginalDistribution::point_mass(1.5).unwrap(),
            RiskMeasure::es(0.95).unwrap(),
        );
        let res = run_uel_decay(&cfg).unwrap();
        for row in &res.rows {
            // zero up to the last-ulp rounding of the tail average
            assert!(row.estimate.abs() <= 1e-13, "estimate {}", row.estimate);
        }
        assert_ne!(res.verdict, Verdict::Diverging);
    }

    #[test]
    fn uel_estimate_matches_the_raw_scale_op() {
        let cfg = quick_cfg(
            ExperimentKind::UelDecay,
            MarginalDistribution::exponential(1.0).unwrap(),
            RiskMeasure::es(0.9).unwrap(),
        );
        let res = run_uel_decay(&cfg).unwrap();
        for (row, &n) in res.rows.iter().zip(&cfg.n_grid) {
            let sim = crate::portfolio::simulate_aggregate(
                &MarginalAssignment::Shared(cfg.marginal),
                &cfg.weights,
                n,
                CouplingKind::Iid,
                cfg.replications,
                SeedSpec::new(cfg.seed),
            )
            .unwrap();
            let uel = crate::risk::unexpected_loss(
                &cfg.measure,
                &sim.aggregate_sample(),
                sim.total_weight * cfg.marginal.mean(),
                n,
                sim.total_weight,
            )
            .unwrap();
            assert!(
                (uel.normalized - row.estimate).abs() <= 1e-12 * row.estimate.abs().max(1.0),
                "n={n}: op {} vs experiment {}",
                uel.normalized,
                row.estimate
            );
        }
    }

    #[test]
    fn uel_refuses_divergent_mean() {
        let cfg = quick_cfg(
            ExperimentKind::UelDecay,
            MarginalDistribution::pareto(0.9, 1.0).unwrap(),
            RiskMeasure::Mean,
        );
        assert!(matches!(run_uel_decay(&cfg), Err(Error::Divergent(_))));
    }

    #[test]
    fn premium_identity_distortion_tracks_mean() {
        let mut cfg = quick_cfg(
            ExperimentKind::PremiumConvergence,
            MarginalDistribution::exponential(1.0).unwrap(),
            RiskMeasure::distortion(DistortionFunction::Identity, 2.0).unwrap(),
        );
        cfg.moment_p = Some(2.0);
        let res = run_premium_convergence(&cfg).unwrap();
        for row in &res.rows {
            assert!((row.estimate - row.target).abs() <= 3.0 * row.mc_stderr + 1e-12);
            assert_eq!(row.target, 2.0);
        }
    }

    #[test]
    fn premium_refuses_divergent_constant_and_moment() {
        let mut cfg = quick_cfg(
            ExperimentKind::PremiumConvergence,
            MarginalDistribution::exponential(1.0).unwrap(),
            RiskMeasure::distortion(DistortionFunction::Power { gamma: 0.5 }, 1.0).unwrap(),
        );
        cfg.moment_p = Some(2.0);
        assert!(matches!(
            run_premium_convergence(&cfg),
            Err(Error::NotIntegrable(_))
        ));
        cfg.moment_p = Some(3.0);
        cfg.marginal = MarginalDistribution::pareto(2.0, 1.0).unwrap();
        assert!(matches!(
            run_premium_convergence(&cfg),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn worst_case_rejects_var_and_loaded_distortions() {
        let cfg = quick_cfg(
            ExperimentKind::WorstCaseRatio,
            MarginalDistribution::exponential(1.0).unwrap(),
            RiskMeasure::var(0.95).unwrap(),
        );
        assert!(matches!(
            run_worst_case_ratio(&cfg),
            Err(Error::Unsupported(_))
        ));
        let cfg = quick_cfg(
            ExperimentKind::WorstCaseRatio,
            MarginalDistribution::exponential(1.0).unwrap(),
            RiskMeasure::distortion(DistortionFunction::EsClamp { alpha: 0.9 }, 2.0).unwrap(),
        );
        assert!(matches!(
            run_worst_case_ratio(&cfg),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn worst_case_mean_targets_one() {
        let cfg = quick_cfg(
            ExperimentKind::WorstCaseRatio,
            MarginalDistribution::uniform(0.5, 1.5).unwrap(),
            RiskMeasure::Mean,
        );
        let res = run_worst_case_ratio(&cfg).unwrap();
        assert_eq!(res.rows[0].target, 1.0);
        let last = res.rows.last().unwrap();
        assert!((last.estimate - 1.0).abs() < 0.05, "estimate {}", last.estimate);
        for check in res.worst_case_check.as_ref().unwrap() {
            assert!((check.simulated - check.closed_form).abs() <= 3.0 * check.mc_stderr + 1e-9);
        }
    }

    #[test]
    fn experiments_are_deterministic() {
        let cfg = quick_cfg(
            ExperimentKind::RiskRatio,
            MarginalDistribution::bernoulli(0.1).unwrap(),
            RiskMeasure::es(0.9).unwrap(),
        );
        let a = run_risk_ratio(&cfg).unwrap();
        let b = run_risk_ratio(&cfg).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.estimate, rb.estimate);
            assert_eq!(ra.mc_stderr, rb.mc_stderr);
        }
        assert_eq!(a.config_digest, b.config_digest);
    }

    #[test]
    fn uniform_inverse_power_premium_identity() {
        // U^(-1/p) is pareto(p, 1); its unit-load power premium equals
        // 1 + integrability constant, in closed form and by Monte Carlo.
        // The empirical premium converges at rate M^(-(p*gamma-1)/p), so the
        // Monte Carlo check uses p*gamma comfortably above 1; gamma near the
        // divergence threshold would need millions of draws.
        let p = 3.0;
        let gamma = 0.9;
        let h = DistortionFunction::Power { gamma };
        let constant = h.integrability_constant(p);
        let pareto = MarginalDistribution::pareto(p, 1.0).unwrap();
        let closed = crate::distortion::marginal_premium(&h, &pareto).unwrap();
        assert!((closed - (1.0 + constant)).abs() < 1e-12);

        let seed = SeedSpec::new(77);
        let draws: Vec<f64> = (0..60_000)
            .map(|j| pareto.quantile(seed.uniform_at(j, 0)))
            .collect();
        let sample = EmpiricalSample::from_raw(&draws).unwrap();
        let measure = RiskMeasure::distortion(h, 1.0).unwrap();
        let estimate = measure.evaluate(&sample).unwrap();
        assert!(
            (estimate - closed).abs() < 0.02 * closed,
            "MC premium {estimate} vs closed {closed}"
        );
    }

    #[test]
    fn diagnostics_statistics_track_their_oracles() {
        // Bernoulli(0.1): the centered second moment of the mean is
        // Var/n = 0.09/n, nonincreasing and below 0.09 from n=100 on.
        let mut cfg = ExperimentConfig::new(
            ExperimentKind::Diagnostics,
            MarginalDistribution::bernoulli(0.1).unwrap(),
            WeightScheme::Constant,
            RiskMeasure::Mean,
            42,
        );
        cfg.replications = 1000;
        let report = run_diagnostics(&cfg).unwrap();
        assert!(report.rows.windows(2).all(|w| w[1].dvp_stat <= w[0].dvp_stat));
        assert!(report.rows[0].dvp_stat <= 0.09);
        assert!(report.flags.is_empty(), "{:?}", report.flags);
        assert!((report.dvp_sup - report.rows[0].dvp_stat).abs() < 1e-15);

        // Exponential(1): Chebyshev gives P(|A_n - 1| > 0.1) <= 1/(n eps^2),
        // i.e. below 0.01 at n = 10^4.
        let mut cfg = ExperimentConfig::new(
            ExperimentKind::Diagnostics,
            MarginalDistribution::exponential(1.0).unwrap(),
            WeightScheme::Constant,
            RiskMeasure::Mean,
            42,
        );
        cfg.replications = 1000;
        let report = run_diagnostics(&cfg).unwrap();
        assert!(report.rows.windows(2).all(|w| w[1].wlln_tail <= w[0].wlln_tail));
        assert!(report.rows.last().unwrap().wlln_tail < 0.01);
    }

    #[test]
    fn ratio_guard_reports_inconclusive_instead_of_dividing() {
        // Mean close to zero relative to its Monte Carlo error trips the
        // denominator guard.
        let mut cfg = quick_cfg(
            ExperimentKind::RiskRatio,
            MarginalDistribution::uniform(-0.99, 1.01).unwrap(),
            RiskMeasure::Mean,
        );
        cfg.n_grid = vec![10, 20];
        cfg.replications = 200;
        let res = run_risk_ratio(&cfg).unwrap();
        assert_eq!(res.verdict, Verdict::Inconclusive);
        assert!(res.rows.iter().any(|r| r.estimate.is_nan()));
    }

    #[test]
    fn verdict_rules() {
        let row = |abs_error: f64| ConvergenceRow {
            n: 1,
            total_weight: 1.0,
            estimate: 0.0,
            mc_stderr: 0.0,
            target: 0.0,
            abs_error,
        };
        let rows = vec![row(0.5), row(0.2), row(0.05)];
        assert_eq!(verdict_for(&rows, 0.1, false), Verdict::Converging);
        assert_eq!(verdict_for(&rows, 0.01, false), Verdict::Inconclusive);
        let rows = vec![row(0.05), row(0.2), row(0.5)];
        assert_eq!(verdict_for(&rows, 0.1, false), Verdict::Diverging);
        let rows = vec![row(0.5), row(0.6), row(0.05)];
        assert_eq!(verdict_for(&rows, 0.1, false), Verdict::Inconclusive);
        let rows = vec![row(0.5), row(0.2), row(0.05)];
        assert_eq!(verdict_for(&rows, 0.1, true), Verdict::Inconclusive);
    }

    #[test]
    fn config_validation() {
        let mut cfg = quick_cfg(
            ExperimentKind::RiskRatio,
            MarginalDistribution::bernoulli(0.1).unwrap(),
            RiskMeasure::es(0.9).unwrap(),
        );
        cfg.n_grid = vec![100, 100];
        assert!(cfg.validate().is_err());
        cfg.n_grid = vec![100, 1000];
        cfg.replications = 50;
        assert!(cfg.validate().is_err());
        cfg.replications = 200;
        assert!(cfg.validate().is_ok());
        cfg.z_marginal = Some(MarginalDistribution::exponential(1.0).unwrap());
        assert!(cfg.validate().is_err()); // z_marginal only for worst-case
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let cfg = quick_cfg(
            ExperimentKind::RiskRatio,
            MarginalDistribution::bernoulli(0.1).unwrap(),
            RiskMeasure::es(0.9).unwrap(),
        );
        let mut other = cfg.clone();
        assert_eq!(cfg.digest(), other.digest());
        other.seed = 124;
        assert_ne!(cfg.digest(), other.digest());
    }
}
