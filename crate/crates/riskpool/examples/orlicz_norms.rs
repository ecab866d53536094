//! Luxemburg norms and the doubling condition.
//!
//! The Luxemburg norm is the smallest scale k making the mean of
//! Phi(|X|/k) at most one. Under Phi(t) = t^p it coincides with the p-norm,
//! which serves as the independent oracle for the bisection. The doubling
//! estimate sup Phi(2t)/Phi(t) is 2^p for powers and blows up for
//! Phi(t) = e^t - 1.
//!
//! Run with: `cargo run --release --example orlicz_norms`

use riskpool::empirical::EmpiricalSample;
use riskpool::orlicz::{
    default_delta2_grid, delta2_estimate, luxemburg_norm, YoungFunction, LUXEMBURG_RTOL,
};

fn main() -> riskpool::Result<()> {
    let sample = EmpiricalSample::from_raw(&[0.25, -1.5, 3.0, 0.0, 2.2, -0.7])?;
    println!("sample: {:?}", sample.values());
    println!("  p      luxemburg norm    p-norm");
    for p in [1.0, 1.5, 2.0, 3.0] {
        let phi = YoungFunction::power(p)?;
        let lux = luxemburg_norm(&sample, &phi, LUXEMBURG_RTOL)?;
        println!("  {p:<6} {lux:<17.12} {:.12}", sample.p_norm(p));
    }

    let exp_norm = luxemburg_norm(&sample, &YoungFunction::ExpMinusOne, LUXEMBURG_RTOL)?;
    println!("  exp-minus-one norm: {exp_norm:.12}\n");

    let grid = default_delta2_grid();
    for phi in [
        YoungFunction::power(1.0)?,
        YoungFunction::power(2.0)?,
        YoungFunction::power(3.0)?,
        YoungFunction::Zero,
        YoungFunction::ExpMinusOne,
    ] {
        println!("doubling estimate for {phi:?}: {:?}", delta2_estimate(&phi, &grid));
    }
    Ok(())
}
