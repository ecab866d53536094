//! Parametric marginal loss distributions with exact quantile functions,
//! moments, and closed-form VaR/expected-shortfall values used as oracles by
//! the simulation experiments.
//!
//! Conventions: VaR is the lower (left-continuous) quantile, so
//! `closed_form_var(alpha) == quantile(alpha)` for every family. Divergent
//! moments are reported as `f64::INFINITY` rather than errors, so heavy-tail
//! negative controls can be expressed in configs; only expected shortfall of
//! an infinite-mean tail is a hard error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A marginal loss distribution from one of five parametric families.
///
/// Pareto uses the survival parameterization `P(X > x) = (scale/x)^tail`
/// for `x >= scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum MarginalDistribution {
    Bernoulli { p: f64 },
    Exponential { rate: f64 },
    Pareto { tail: f64, scale: f64 },
    Uniform { lo: f64, hi: f64 },
    PointMass { c: f64 },
}

impl MarginalDistribution {
    pub fn bernoulli(p: f64) -> Result<Self> {
        let d = Self::Bernoulli { p };
        d.validate()?;
        Ok(d)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let d = Self::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn pareto(tail: f64, scale: f64) -> Result<Self> {
        let d = Self::Pareto { tail, scale };
        d.validate()?;
        Ok(d)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let d = Self::Uniform { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn point_mass(c: f64) -> Result<Self> {
        let d = Self::PointMass { c };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Bernoulli { p } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "bernoulli p must lie in (0,1), got {p}"
                    )));
                }
            }
            Self::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "exponential rate must be positive, got {rate}"
                    )));
                }
            }
            Self::Pareto { tail, scale } => {
                if !(tail > 0.0 && tail.is_finite()) || !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "pareto requires tail > 0 and scale > 0, got tail={tail}, scale={scale}"
                    )));
                }
            }
            Self::Uniform { lo, hi } => {
                let ordered = lo.is_finite() && hi.is_finite() && lo < hi;
                if !ordered {
                    return Err(Error::InvalidParameter(format!(
                        "uniform requires lo < hi, got lo={lo}, hi={hi}"
                    )));
                }
            }
            Self::PointMass { c } => {
                if !c.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "point mass must be finite, got {c}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Lower generalized inverse `inf {x : F(x) >= u}` for `u` in (0,1).
    pub fn quantile(&self, u: f64) -> f64 {
        assert!(u > 0.0 && u < 1.0, "quantile level must lie in (0,1), got {u}");
        match *self {
            Self::Bernoulli { p } => {
                if u <= 1.0 - p {
                    0.0
                } else {
                    1.0
                }
            }
            // -ln(1-u) via ln_1p for accuracy at small u.
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
            Self::Pareto { tail, scale } => scale * (1.0 - u).powf(-1.0 / tail),
            Self::Uniform { lo, hi } => lo + u * (hi - lo),
            Self::PointMass { c } => c,
        }
    }

    /// Quantile at `u = 1 - srv`, parameterized by the survival probability
    /// so deep right-tail values stay accurate where `1 - srv` would round
    /// to 1.
    pub fn quantile_survival(&self, srv: f64) -> f64 {
        assert!(srv > 0.0 && srv < 1.0, "survival level must lie in (0,1), got {srv}");
        match *self {
            Self::Bernoulli { p } => {
                if srv < p {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Exponential { rate } => -srv.ln() / rate,
            Self::Pareto { tail, scale } => scale * srv.powf(-1.0 / tail),
            Self::Uniform { lo, hi } => hi - srv * (hi - lo),
            Self::PointMass { c } => c,
        }
    }

    /// First moment; `f64::INFINITY` when it diverges (Pareto with tail <= 1).
    pub fn mean(&self) -> f64 {
        match *self {
            Self::Bernoulli { p } => p,
            Self::Exponential { rate } => 1.0 / rate,
            Self::Pareto { tail, scale } => {
                if tail > 1.0 {
                    tail * scale / (tail - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::PointMass { c } => c,
        }
    }

    /// Raw moment `E[X^k]`; `f64::INFINITY` when it diverges.
    pub fn raw_moment(&self, k: u32) -> f64 {
        assert!(k >= 1, "moment order must be a positive integer");
        match *self {
            Self::Bernoulli { p } => p,
            Self::Exponential { rate } => {
                (1..=k).fold(1.0, |acc, j| acc * j as f64) / rate.powi(k as i32)
            }
            Self::Pareto { tail, scale } => {
                if tail > k as f64 {
                    tail * scale.powi(k as i32) / (tail - k as f64)
                } else {
                    f64::INFINITY
                }
            }
            Self::Uniform { lo, hi } => {
                let kp = k as i32 + 1;
                (hi.powi(kp) - lo.powi(kp)) / (kp as f64 * (hi - lo))
            }
            Self::PointMass { c } => c.powi(k as i32),
        }
    }

    /// Value at Risk at confidence `alpha`: the lower quantile.
    pub fn closed_form_var(&self, alpha: f64) -> f64 {
        self.quantile(alpha)
    }

    /// Expected shortfall `(1/(1-alpha)) * integral of the quantile over
    /// [alpha, 1]`, in closed form per family.
    pub fn closed_form_es(&self, alpha: f64) -> Result<f64> {
        assert!(
            alpha > 0.0 && alpha < 1.0,
            "confidence level must lie in (0,1), got {alpha}"
        );
        match *self {
            Self::Bernoulli { p } => {
                if 1.0 - alpha <= p {
                    Ok(1.0)
                } else {
                    Ok(p / (1.0 - alpha))
                }
            }
            Self::Exponential { rate } => Ok((1.0 - (-alpha).ln_1p()) / rate),
            Self::Pareto { tail, .. } => {
                if tail > 1.0 {
                    Ok(self.quantile(alpha) * tail / (tail - 1.0))
                } else {
                    Err(Error::Divergent(format!(
                        "expected shortfall of pareto with tail {tail} <= 1 (infinite mean)"
                    )))
                }
            }
            Self::Uniform { lo, hi } => Ok(lo + 0.5 * (1.0 + alpha) * (hi - lo)),
            Self::PointMass { c } => Ok(c),
        }
    }

    /// Survival function `P(X > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            Self::Bernoulli { p } => {
                if x < 0.0 {
                    1.0
                } else if x < 1.0 {
                    p
                } else {
                    0.0
                }
            }
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Self::Pareto { tail, scale } => {
                if x <= scale {
                    1.0
                } else {
                    (scale / x).powf(tail)
                }
            }
            Self::Uniform { lo, hi } => {
                if x <= lo {
                    1.0
                } else if x >= hi {
                    0.0
                } else {
                    (hi - x) / (hi - lo)
                }
            }
            Self::PointMass { c } => {
                if x < c {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether the support is contained in `[0, inf)`; premium experiments
    /// require nonnegative losses.
    pub fn is_nonnegative(&self) -> bool {
        match *self {
            Self::Bernoulli { .. } | Self::Exponential { .. } | Self::Pareto { .. } => true,
            Self::Uniform { lo, .. } => lo >= 0.0,
            Self::PointMass { c } => c >= 0.0,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "bernoulli",
            Self::Exponential { .. } => "exponential",
            Self::Pareto { .. } => "pareto",
            Self::Uniform { .. } => "uniform",
            Self::PointMass { .. } => "pointmass",
        }
    }
}
