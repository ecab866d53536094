//! Full invariant suite: axiom fuzzing, estimator dualities, norm bounds,
//! quadrature oracles, and stream determinism. Same checks as
//! `riskpool selftest`.
//!
//! Run with: `cargo run --release --example axiom_suite`

fn main() {
    let mut failed = 0;
    for outcome in riskpool::selftest::run_all(42) {
        if outcome.passed {
            println!("PASS  {:<64} ({} cases)", outcome.name, outcome.cases);
        } else {
            failed += 1;
            println!("FAIL  {:<64} {}", outcome.name, outcome.detail);
        }
    }
    if failed > 0 {
        std::process::exit(3);
    }
}
