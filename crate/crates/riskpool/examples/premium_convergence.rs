//! Distortion-premium convergence for pooled nonnegative losses.
//!
//! The normalized premium `H(sum lambda_i X_i) / (n mean-lambda_n)` tends to
//! `C * E[X_1]` whenever the distortion's integrability constant
//! `int_1^inf h(1/x^p) dx` and the p-th moment are finite. A divergent
//! constant is refused up front rather than producing unstable numbers.
//!
//! Run with: `cargo run --release --example premium_convergence`

use riskpool::distortion::DistortionFunction;
use riskpool::distributions::MarginalDistribution;
use riskpool::experiments::{run_premium_convergence, ExperimentConfig, ExperimentKind};
use riskpool::portfolio::WeightScheme;
use riskpool::risk::RiskMeasure;

fn main() -> riskpool::Result<()> {
    let h = DistortionFunction::Power { gamma: 0.5 };
    let marginal = MarginalDistribution::exponential(1.0)?;

    println!("square-root distortion, C = 1, exponential(1) losses");
    println!(
        "  integrability constant at p=3: {}",
        h.integrability_constant(3.0)
    );
    let mut cfg = ExperimentConfig::new(
        ExperimentKind::PremiumConvergence,
        marginal,
        WeightScheme::Constant,
        RiskMeasure::distortion(h, 1.0)?,
        42,
    );
    cfg.moment_p = Some(3.0);
    cfg.tolerance = 0.02;
    let result = run_premium_convergence(&cfg)?;
    for row in &result.rows {
        println!(
            "  n={:<6} premium={:<10.5} target={} stderr={:.5}",
            row.n, row.estimate, row.target, row.mc_stderr
        );
    }
    println!("  verdict: {:?}\n", result.verdict);

    println!("same distortion at p=2: constant diverges, the run is refused");
    cfg.moment_p = Some(2.0);
    match run_premium_convergence(&cfg) {
        Err(e) => println!("  refused: {e}"),
        Ok(_) => println!("  unexpected success"),
    }
    Ok(())
}
