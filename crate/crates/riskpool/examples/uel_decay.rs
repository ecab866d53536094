//! Unexpected-loss decay of pooled portfolios.
//!
//! The unexpected loss is the excess of the risk measure over the sum of
//! weighted expected losses. For positively homogeneous measures it vanishes
//! per unit of total weight as the portfolio grows; geometric weights break
//! the pooling condition and serve as the negative control.
//!
//! Run with: `cargo run --release --example uel_decay`

use riskpool::distributions::MarginalDistribution;
use riskpool::experiments::{run_uel_decay, ExperimentConfig, ExperimentKind};
use riskpool::portfolio::WeightScheme;
use riskpool::risk::RiskMeasure;

fn main() -> riskpool::Result<()> {
    let marginal = MarginalDistribution::bernoulli(0.1)?;
    let measure = RiskMeasure::es(0.95)?;

    for (label, weights, n_grid) in [
        ("constant weights", WeightScheme::Constant, vec![100, 1000, 10_000]),
        (
            "power-growth weights (lambda_i = i)",
            WeightScheme::PowerGrowth { beta: 1.0 },
            vec![100, 1000, 10_000],
        ),
        (
            "geometric weights (lambda_i = 2^i, negative control)",
            WeightScheme::Geometric { r: 2.0 },
            vec![50, 200, 800],
        ),
    ] {
        let mut cfg = ExperimentConfig::new(
            ExperimentKind::UelDecay,
            marginal,
            weights,
            measure,
            42,
        );
        cfg.n_grid = n_grid;
        println!("ES(0.95), bernoulli(0.1), {label}");
        let result = run_uel_decay(&cfg)?;
        for row in &result.rows {
            println!(
                "  n={:<6} normalized UEL={:<12.6} stderr={:.6}",
                row.n, row.estimate, row.mc_stderr
            );
        }
        println!("  verdict: {:?} (tolerance {})\n", result.verdict, result.tolerance_abs);
    }
    Ok(())
}
