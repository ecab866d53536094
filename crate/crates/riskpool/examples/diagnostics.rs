//! Pooling diagnostics and negative controls.
//!
//! Reports the Toeplitz column (no single weight may dominate), weak-law
//! tail probabilities, the uniform-integrability statistic of the centered
//! averages, and raw moment estimates of the individual draws. Three
//! controls must be flagged: geometric weights (non-vanishing Toeplitz
//! ratio), infinite-variance Pareto losses (growing second moment), and the
//! exponential Young function (doubling violation).
//!
//! Run with: `cargo run --release --example diagnostics`

use riskpool::distributions::MarginalDistribution;
use riskpool::experiments::{run_diagnostics, ExperimentConfig, ExperimentKind};
use riskpool::orlicz::YoungFunction;
use riskpool::portfolio::WeightScheme;
use riskpool::risk::RiskMeasure;

fn print_report(label: &str, cfg: &ExperimentConfig) -> riskpool::Result<()> {
    println!("{label}");
    let report = run_diagnostics(cfg)?;
    println!("  n        toeplitz     wlln_tail  dvp_stat     moment_est");
    for r in &report.rows {
        println!(
            "  {:<8} {:<12.6} {:<10.4} {:<12.3e} {:.4}",
            r.n, r.toeplitz, r.wlln_tail, r.dvp_stat, r.moment_estimate
        );
    }
    if report.flags.is_empty() {
        println!("  flags: none\n");
    } else {
        for f in &report.flags {
            println!("  flag: {f:?}");
        }
        println!();
    }
    Ok(())
}

fn main() -> riskpool::Result<()> {
    // Healthy pooling: constant weights, bounded losses.
    let cfg = ExperimentConfig::new(
        ExperimentKind::Diagnostics,
        MarginalDistribution::bernoulli(0.1)?,
        WeightScheme::Constant,
        RiskMeasure::Mean,
        42,
    );
    print_report("bernoulli(0.1), constant weights (healthy control)", &cfg)?;

    // Geometric weights: the Toeplitz ratio stays above (r-1)/r = 0.5.
    let mut cfg = ExperimentConfig::new(
        ExperimentKind::Diagnostics,
        MarginalDistribution::bernoulli(0.1)?,
        WeightScheme::Geometric { r: 2.0 },
        RiskMeasure::Mean,
        42,
    );
    cfg.n_grid = vec![50, 200, 800];
    print_report("bernoulli(0.1), geometric(2) weights (no pooling)", &cfg)?;

    // Infinite variance: the raw second moment keeps growing with the
    // sample size instead of settling.
    let cfg = ExperimentConfig::new(
        ExperimentKind::Diagnostics,
        MarginalDistribution::pareto(1.5, 1.0)?,
        WeightScheme::Constant,
        RiskMeasure::Mean,
        42,
    );
    print_report("pareto(1.5, 1), constant weights (infinite variance)", &cfg)?;

    // Young-function doubling control.
    let mut cfg = ExperimentConfig::new(
        ExperimentKind::Diagnostics,
        MarginalDistribution::exponential(1.0)?,
        WeightScheme::Constant,
        RiskMeasure::Mean,
        42,
    );
    cfg.young = Some(YoungFunction::ExpMinusOne);
    print_report("exponential(1) with Phi(t) = e^t - 1 (doubling violation)", &cfg)?;
    Ok(())
}
