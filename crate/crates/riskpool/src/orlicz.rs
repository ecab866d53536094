//! Young functions, Luxemburg norms, the doubling (Delta-2) condition, and
//! the uniform-integrability / weak-law diagnostics for normalized weighted
//! averages.

use serde::{Deserialize, Serialize};

use crate::empirical::EmpiricalSample;
use crate::error::{Error, Result};

/// Ratio beyond which the doubling estimate is flagged as a violation. The
/// doubling condition itself is qualitative; every Power family stays at
/// 2^p, far below this cutoff, while exp(t)-1 blows through it.
pub const DELTA2_VIOLATION_THRESHOLD: f64 = 1e6;

/// Default Luxemburg-norm bisection tolerance (relative bracket width).
pub const LUXEMBURG_RTOL: f64 = 1e-10;

/// A convex Young function, `Phi(0) = 0`, nondecreasing on `[0, inf)`.
///
/// `Zero` is the degenerate case in which the norm is undefined and only the
/// weak-law diagnostics apply; `ExpMinusOne` violates the doubling condition
/// and serves as the negative control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum YoungFunction {
    Zero,
    Power { p: f64 },
    ExpMinusOne,
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        let y = Self::Power { p };
        y.validate()?;
        Ok(y)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Power { p } if !(p >= 1.0 && p.is_finite()) => Err(Error::InvalidParameter(
                format!("young power exponent must satisfy p >= 1, got {p}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "young functions are evaluated on [0,inf), got {t}");
        match *self {
            Self::Zero => 0.0,
            Self::Power { p } => t.powf(p),
            Self::ExpMinusOne => t.exp_m1(),
        }
    }

    /// `Phi(2t) / Phi(t)` where defined; the doubling quotient at one point.
    pub fn doubling_ratio(&self, t: f64) -> Option<f64> {
        let denom = self.evaluate(t);
        if denom > 0.0 {
            Some(self.evaluate(2.0 * t) / denom)
        } else {
            None
        }
    }
}

/// Outcome of scanning the doubling quotient over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delta2Estimate {
    /// Supremum of `Phi(2t)/Phi(t)` over the grid points with `Phi(t) > 0`.
    Bounded(f64),
    /// The quotient exceeded [`DELTA2_VIOLATION_THRESHOLD`] (or overflowed).
    Violation { at: f64, ratio: f64 },
}

impl Delta2Estimate {
    pub fn is_violation(&self) -> bool {
        matches!(self, Self::Violation { .. })
    }
}

/// Default log-spaced grid, integer powers of two so the Power-family
/// quotient is machine-exact.
pub fn default_delta2_grid() -> Vec<f64> {
    (-10..=10).map(|j| 2f64.powi(j)).collect()
}

/// Supremum of the doubling quotient over the grid; `Zero` returns 1 by
/// convention.
pub fn delta2_estimate(phi: &YoungFunction, grid: &[f64]) -> Delta2Estimate {
    assert!(!grid.is_empty(), "doubling grid must be nonempty");
    if matches!(phi, YoungFunction::Zero) {
        return Delta2Estimate::Bounded(1.0);
    }
    let mut sup = f64::NEG_INFINITY;
    for &t in grid {
        assert!(t > 0.0, "doubling grid points must be positive, got {t}");
        if let Some(ratio) = phi.doubling_ratio(t) {
            if !ratio.is_finite() || ratio > DELTA2_VIOLATION_THRESHOLD {
                return Delta2Estimate::Violation { at: t, ratio };
            }
            sup = sup.max(ratio);
        }
    }
    if sup.is_finite() {
        Delta2Estimate::Bounded(sup)
    } else {
        Delta2Estimate::Bounded(1.0)
    }
}

/// Luxemburg norm: the smallest `k > 0` with `mean Phi(|values|/k) <= 1`,
/// found by doubling/halving from `k0 = max |values|` and bisecting to
/// relative width `rel_tol`. The all-zero sample has norm 0.
pub fn luxemburg_norm(s: &EmpiricalSample, phi: &YoungFunction, rel_tol: f64) -> Result<f64> {
    if matches!(phi, YoungFunction::Zero) {
        return Err(Error::InvalidParameter(
            "luxemburg norm is undefined for the zero young function; \
             the metric topology of convergence in probability applies instead"
                .into(),
        ));
    }
    assert!(rel_tol > 0.0, "rel_tol must be positive");
    let objective = |k: f64| -> f64 {
        s.values()
            .iter()
            .map(|v| phi.evaluate(v.abs() / k))
            .sum::<f64>()
            / s.len() as f64
    };
    let k0 = s.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if k0 == 0.0 {
        return Ok(0.0);
    }
    // Establish the bracket objective(lo) > 1 >= objective(hi); Phi is
    // continuous with Phi(0) = 0, so finitely many doublings/halvings suffice.
    let (mut lo, mut hi);
    if objective(k0) <= 1.0 {
        hi = k0;
        lo = 0.5 * k0;
        while objective(lo) <= 1.0 {
            hi = lo;
            lo *= 0.5;
            if lo < f64::MIN_POSITIVE {
                return Ok(0.0);
            }
        }
    } else {
        lo = k0;
        hi = 2.0 * k0;
        while objective(hi) > 1.0 {
            lo = hi;
            hi *= 2.0;
        }
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if objective(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sample `phi`-moment `mean |v|^q`; the building block of the
/// de la Vallee-Poussin statistic.
pub fn phi_moment(s: &EmpiricalSample, q: f64) -> f64 {
    assert!(q > 1.0, "uniform-integrability exponent must exceed 1, got {q}");
    s.values().iter().map(|v| v.abs().powf(q)).sum::<f64>() / s.len() as f64
}

/// Supremum over the per-n samples of centered normalized averages of their
/// q-th absolute moment — the finite-grid uniform-integrability statistic.
pub fn ui_diagnostic(centered_aggregates: &[EmpiricalSample], q: f64) -> f64 {
    centered_aggregates
        .iter()
        .map(|s| phi_moment(s, q))
        .fold(0.0, f64::max)
}

/// Per-n tail probabilities `P(|A_n - mean_n| > eps)` estimated as the
/// fraction of replications outside the band — the weak-law diagnostic.
pub fn wlln_diagnostic(aggregates: &[EmpiricalSample], means: &[f64], eps: f64) -> Vec<f64> {
    assert!(eps > 0.0, "wlln tolerance must be positive");
    assert_eq!(
        aggregates.len(),
        means.len(),
        "one mean per aggregate sample required"
    );
    aggregates
        .iter()
        .zip(means)
        .map(|(s, &m)| {
            let outside = s.values().iter().filter(|&&v| (v - m).abs() > eps).count();
            outside as f64 / s.len() as f64
        })
        .collect()
}
