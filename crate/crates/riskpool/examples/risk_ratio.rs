//! Risk ratios of co-monotonic versus pooled aggregates.
//!
//! Simulates `R(sum lambda_i Z_i) / R(sum lambda_i X_i)` where the Z's are
//! perfectly dependent (one shared uniform) and the X's are independent,
//! both with the same marginal, and compares each ratio against its
//! closed-form limit `R(Z_1)/E[X_1]`.
//!
//! Run with: `cargo run --release --example risk_ratio`

use riskpool::distributions::MarginalDistribution;
use riskpool::experiments::{closed_form_ratio, run_risk_ratio, ExperimentConfig, ExperimentKind};
use riskpool::portfolio::WeightScheme;
use riskpool::risk::RiskMeasure;

fn main() -> riskpool::Result<()> {
    let cases = [
        (
            "ES(0.95) on bernoulli(0.1)  [limit 1/max{p, 1-alpha} = 10]",
            MarginalDistribution::bernoulli(0.1)?,
            RiskMeasure::es(0.95)?,
        ),
        (
            "VaR(0.95) on exponential(1) [limit -log(0.05) = 2.9957]",
            MarginalDistribution::exponential(1.0)?,
            RiskMeasure::var(0.95)?,
        ),
        (
            "ES(0.95) on exponential(1)  [limit 1-log(0.05) = 3.9957]",
            MarginalDistribution::exponential(1.0)?,
            RiskMeasure::es(0.95)?,
        ),
    ];

    for (label, marginal, measure) in cases {
        let cfg = ExperimentConfig::new(
            ExperimentKind::RiskRatio,
            marginal,
            WeightScheme::Constant,
            measure,
            42,
        );
        let target = closed_form_ratio(&measure, &marginal)?;
        println!("{label}");
        println!("  closed-form limit: {target:.6}");
        let result = run_risk_ratio(&cfg)?;
        for row in &result.rows {
            println!(
                "  n={:<6} ratio={:<9.5} abs_error={:<10.5} stderr={:.5}",
                row.n, row.estimate, row.abs_error, row.mc_stderr
            );
        }
        println!("  verdict: {:?} (tolerance {:.3})\n", result.verdict, result.tolerance_abs);
    }
    Ok(())
}
