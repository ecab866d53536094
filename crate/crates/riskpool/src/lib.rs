//! Monte Carlo laboratory for risk measures on pooled portfolios.
//!
//! The crate simulates large weighted portfolios of losses and measures how
//! nonlinear risk functionals behave as the portfolio grows: how fast the
//! unexpected loss (the capital buffer above the expected loss) vanishes per
//! unit of exposure, where distortion premia converge, and by which factor a
//! co-monotonic or worst-case dependence scenario exceeds a pooled one.
//!
//! Building blocks:
//! - [`distributions`]: parametric marginals with exact quantiles, moments,
//!   and closed-form VaR/ES oracles.
//! - [`empirical`]: sorted-sample empirical laws all estimators act on.
//! - [`risk`]: mean, VaR, expected shortfall, distortion premium, signed
//!   Choquet integral, unexpected losses, and fuzzed axiom checkers.
//! - [`distortion`]: distortion families and the integrability constant that
//!   gates premium experiments.
//! - [`orlicz`]: Young functions, Luxemburg norms, doubling estimates, and
//!   weak-law diagnostics.
//! - [`portfolio`]: weight schemes, Toeplitz ratios, and the deterministic
//!   inverse-CDF simulation engine with counter-addressable uniform streams.
//! - [`experiments`]: the convergence experiments and diagnostics battery.
//! - [`cli`]: config parsing and bit-exact result serialization behind the
//!   `riskpool` binary.
//!
//! Runnable walkthroughs for each capability live under `examples/`.
//!
//! ```
//! use riskpool::distributions::MarginalDistribution;
//! use riskpool::empirical::EmpiricalSample;
//! use riskpool::risk::RiskMeasure;
//!
//! let losses = EmpiricalSample::from_raw(&[0.0, 1.0, 0.0, 4.0]).unwrap();
//! let es = RiskMeasure::es(0.75).unwrap().evaluate(&losses).unwrap();
//! assert_eq!(es, 4.0);
//!
//! let exp = MarginalDistribution::exponential(1.0).unwrap();
//! assert!((exp.closed_form_es(0.95).unwrap() - 3.9957322735539913).abs() < 1e-12);
//! ```

pub mod cli;
pub mod distortion;
pub mod distributions;
pub mod empirical;
pub mod error;
pub mod experiments;
pub mod orlicz;
pub mod portfolio;
pub mod risk;
pub mod selftest;

mod quad;

pub use error::{Error, Result};
