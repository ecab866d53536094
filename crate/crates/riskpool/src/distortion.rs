//! Distortion functions for premium principles: parametric families, the
//! integrability constant `int_1^inf h(1/x^p) dx` that governs finiteness of
//! premia on p-integrable losses, and closed-form distorted-survival
//! integrals of the marginal families.
//!
//! All families are nondecreasing on the unit interval with h(0+) = 0 and
//! h(1) = 1, and are extended by h(t) = 1 for t > 1. `VaRIndicator` and
//! `ESClamp` are the distortions whose Choquet integrals reproduce VaR and
//! expected shortfall.

use serde::{Deserialize, Serialize};

use crate::distributions::MarginalDistribution;
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DistortionFunction {
    /// h(u) = u; the premium degenerates to the expectation.
    Identity,
    /// h(u) = u^gamma with gamma in (0,1].
    Power { gamma: f64 },
    /// h(u) = 1 for u > 1-alpha, else 0; reproduces VaR at level alpha.
    VarIndicator { alpha: f64 },
    /// h(u) = min(u/(1-alpha), 1); reproduces expected shortfall.
    EsClamp { alpha: f64 },
    /// h(u) = u^gamma, the proportional-hazard transform.
    ProportionalHazard { gamma: f64 },
}

impl DistortionFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Identity => Ok(()),
            Self::Power { gamma } | Self::ProportionalHazard { gamma } => {
                if gamma > 0.0 && gamma <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "distortion exponent gamma must lie in (0,1], got {gamma}"
                    )))
                }
            }
            Self::VarIndicator { alpha } | Self::EsClamp { alpha } => {
                if alpha > 0.0 && alpha < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "distortion level alpha must lie in (0,1), got {alpha}"
                    )))
                }
            }
        }
    }

    /// Evaluates h at `u >= 0`, clamped to 1 for u >= 1.
    pub fn evaluate(&self, u: f64) -> f64 {
        assert!(u >= 0.0, "distortion argument must be nonnegative, got {u}");
        if u >= 1.0 {
            return 1.0;
        }
        match *self {
            Self::Identity => u,
            Self::Power { gamma } | Self::ProportionalHazard { gamma } => u.powf(gamma),
            Self::VarIndicator { alpha } => {
                if u > 1.0 - alpha {
                    1.0
                } else {
                    0.0
                }
            }
            Self::EsClamp { alpha } => (u / (1.0 - alpha)).min(1.0),
        }
    }

    /// `int_1^inf h(1/x^p) dx` in closed form; `f64::INFINITY` when the
    /// integral diverges, which premium experiments treat as a refusal.
    pub fn integrability_constant(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "integrability order must satisfy p >= 1, got {p}");
        match *self {
            Self::Identity => {
                if p > 1.0 {
                    1.0 / (p - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            Self::Power { gamma } | Self::ProportionalHazard { gamma } => {
                if p * gamma > 1.0 {
                    1.0 / (p * gamma - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            Self::VarIndicator { alpha } => (1.0 - alpha).powf(-1.0 / p) - 1.0,
            Self::EsClamp { alpha } => {
                if p > 1.0 {
                    (1.0 - alpha).powf(-1.0 / p) * p / (p - 1.0) - 1.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Quadrature route for the integrability constant: substitute
    /// `t = 1/x^p`, then `t = s^a` with `a` large enough to absorb the
    /// endpoint singularity, and integrate `h` over the bounded domain.
    /// Returns `f64::INFINITY` when the constant diverges. Serves as the
    /// independent oracle for the closed forms.
    pub fn integrability_constant_quadrature(&self, p: f64, abs_tol: f64) -> f64 {
        assert!(p >= 1.0);
        // Near zero, h(t) behaves like t^g with the effective exponent below;
        // the substituted integrand is s^(a*g - a/p - 1), divergent iff g <= 1/p.
        let g_eff = match *self {
            Self::Identity | Self::EsClamp { .. } => 1.0,
            Self::Power { gamma } | Self::ProportionalHazard { gamma } => gamma,
            Self::VarIndicator { .. } => f64::INFINITY, // h vanishes near 0
        };
        if g_eff <= 1.0 / p {
            return f64::INFINITY;
        }
        let a = if g_eff.is_finite() {
            (2.0 / (g_eff - 1.0 / p)).ceil().max(12.0)
        } else {
            12.0
        };
        adaptive_simpson(
            |s| {
                if s == 0.0 {
                    return 0.0;
                }
                let t = s.powf(a);
                (a / p) * self.evaluate(t) * s.powf(-a / p - 1.0)
            },
            0.0,
            1.0,
            abs_tol,
        )
    }

    /// `int_0^1 h(u) du`, used for uniform marginals.
    fn unit_integral(&self) -> f64 {
        match *self {
            Self::Identity => 0.5,
            Self::Power { gamma } | Self::ProportionalHazard { gamma } => 1.0 / (1.0 + gamma),
            Self::VarIndicator { alpha } => alpha,
            Self::EsClamp { alpha } => 0.5 * (1.0 + alpha),
        }
    }
}

/// Distorted-survival integral `int_0^inf h(P(X > x)) dx` of a nonnegative
/// marginal, in closed form. This is the unit-load premium of the marginal;
/// identity, VaR-indicator, and ES-clamp distortions reduce to the mean, VaR,
/// and expected shortfall. Returns `f64::INFINITY` when the premium diverges.
pub fn marginal_premium(h: &DistortionFunction, dist: &MarginalDistribution) -> Result<f64> {
    if !dist.is_nonnegative() {
        return Err(Error::InvalidParameter(format!(
            "distorted survival integral requires a nonnegative marginal, got {dist:?}"
        )));
    }
    Ok(match *h {
        DistortionFunction::Identity => dist.mean(),
        DistortionFunction::VarIndicator { alpha } => dist.closed_form_var(alpha),
        DistortionFunction::EsClamp { alpha } => match dist.closed_form_es(alpha) {
            Ok(v) => v,
            Err(Error::Divergent(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        },
        DistortionFunction::Power { gamma } | DistortionFunction::ProportionalHazard { gamma } => {
            match *dist {
                MarginalDistribution::Bernoulli { p } => p.powf(gamma),
                MarginalDistribution::Exponential { rate } => 1.0 / (gamma * rate),
                MarginalDistribution::Pareto { tail, scale } => {
                    let tg = tail * gamma;
                    if tg > 1.0 {
                        scale * tg / (tg - 1.0)
                    } else {
                        f64::INFINITY
                    }
                }
                MarginalDistribution::Uniform { lo, hi } => lo + (hi - lo) * h.unit_integral(),
                MarginalDistribution::PointMass { c } => c,
            }
        }
    })
}

/// Quadrature route for [`marginal_premium`] with a smooth power distortion:
/// `int_0^1 q(1-t) dh(t)` with `dh = gamma t^(gamma-1) dt` and `t = s^8` to
/// absorb the endpoint singularities. Oracle for the closed forms.
pub fn marginal_premium_quadrature(
    h: &DistortionFunction,
    dist: &MarginalDistribution,
    abs_tol: f64,
) -> Result<f64> {
    let gamma = match *h {
        DistortionFunction::Power { gamma } | DistortionFunction::ProportionalHazard { gamma } => {
            gamma
        }
        DistortionFunction::Identity => 1.0,
        _ => {
            return Err(Error::Unsupported(
                "premium quadrature oracle covers smooth power distortions only".into(),
            ))
        }
    };
    if !dist.is_nonnegative() {
        return Err(Error::InvalidParameter(
            "premium quadrature requires a nonnegative marginal".into(),
        ));
    }
    Ok(adaptive_simpson(
        |s| {
            if s == 0.0 {
                return 0.0;
            }
            let t = s.powi(8).min(1.0 - 1e-16);
            dist.quantile_survival(t) * 8.0 * gamma * s.powf(8.0 * gamma - 1.0)
        },
        0.0,
        1.0,
        abs_tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_families() -> Vec<DistortionFunction> {
        vec![
            DistortionFunction::Identity,
            DistortionFunction::Power { gamma: 0.5 },
            DistortionFunction::Power { gamma: 0.9 },
            DistortionFunction::VarIndicator { alpha: 0.95 },
            DistortionFunction::EsClamp { alpha: 0.5 },
            DistortionFunction::EsClamp { alpha: 0.95 },
            DistortionFunction::ProportionalHazard { gamma: 0.7 },
        ]
    }

    #[test]
    fn evaluate_examples() {
        let h = DistortionFunction::Power { gamma: 0.5 };
        assert_eq!(h.evaluate(0.25), 0.5);
        let h = DistortionFunction::EsClamp { alpha: 0.5 };
        assert_eq!(h.evaluate(0.75), 1.0); // 0.75/0.5 clamped
        for h in all_families() {
            assert_eq!(h.evaluate(1.7), 1.0, "{h:?} must clamp above 1");
            assert_eq!(h.evaluate(1.0), 1.0, "{h:?} must satisfy h(1)=1");
        }
    }

    #[test]
    fn evaluate_is_nondecreasing_on_unit_grid() {
        for h in all_families() {
            let mut prev = -1.0;
            for i in 0..=1000 {
                let v = h.evaluate(i as f64 / 1000.0);
                assert!(v >= prev, "{h:?} decreased at u={}", i as f64 / 1000.0);
                assert!((0.0..=1.0).contains(&v));
                prev = v;
            }
        }
    }

    #[test]
    fn integrability_constant_examples() {
        let h = DistortionFunction::Power { gamma: 0.5 };
        assert_eq!(h.integrability_constant(3.0), 2.0);
        assert!(h.integrability_constant(2.0).is_infinite());
        assert_eq!(DistortionFunction::Identity.integrability_constant(2.0), 1.0);
    }

    #[test]
    fn integrability_constant_nonincreasing_in_p() {
        for h in all_families() {
            let mut prev = f64::INFINITY;
            for p in [1.0, 1.5, 2.0, 3.0, 5.0, 8.0] {
                let c = h.integrability_constant(p);
                assert!(
                    c <= prev * (1.0 + 1e-12) || (c.is_infinite() && prev.is_infinite()),
                    "{h:?}: constant increased from {prev} to {c} at p={p}"
                );
                prev = c;
            }
        }
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        for h in all_families() {
            for p in [1.5, 2.0, 3.0, 4.0] {
                let closed = h.integrability_constant(p);
                let quad = h.integrability_constant_quadrature(p, 1e-10);
                if closed.is_finite() {
                    assert!(
                        (closed - quad).abs() <= 1e-8,
                        "{h:?} p={p}: closed {closed} vs quadrature {quad}"
                    );
                } else {
                    assert!(quad.is_infinite());
                }
            }
        }
    }

    #[test]
    fn marginal_premium_reduces_to_known_measures() {
        let dists = [
            MarginalDistribution::bernoulli(0.1).unwrap(),
            MarginalDistribution::exponential(1.3).unwrap(),
            MarginalDistribution::pareto(3.0, 2.0).unwrap(),
            MarginalDistribution::uniform(0.5, 2.0).unwrap(),
            MarginalDistribution::point_mass(4.0).unwrap(),
        ];
        for d in dists {
            assert_eq!(
                marginal_premium(&DistortionFunction::Identity, &d).unwrap(),
                d.mean()
            );
            for alpha in [0.5, 0.9, 0.95] {
                assert_eq!(
                    marginal_premium(&DistortionFunction::VarIndicator { alpha }, &d).unwrap(),
                    d.closed_form_var(alpha),
                    "{d:?} at {alpha}"
                );
                let es = marginal_premium(&DistortionFunction::EsClamp { alpha }, &d).unwrap();
                assert!(
                    (es - d.closed_form_es(alpha).unwrap()).abs() <= 1e-12 * es.abs().max(1.0),
                    "{d:?} at {alpha}"
                );
            }
        }
    }

    #[test]
    fn marginal_premium_power_matches_quadrature() {
        let cases = [
            (0.5, MarginalDistribution::exponential(1.0).unwrap()),
            (0.5, MarginalDistribution::pareto(3.0, 1.0).unwrap()),
            (0.7, MarginalDistribution::uniform(0.0, 2.0).unwrap()),
            (0.9, MarginalDistribution::bernoulli(0.3).unwrap()),
        ];
        for (gamma, d) in cases {
            let h = DistortionFunction::Power { gamma };
            let closed = marginal_premium(&h, &d).unwrap();
            let quad = marginal_premium_quadrature(&h, &d, 1e-10).unwrap();
            assert!(
                (closed - quad).abs() <= 1e-6 * closed.max(1.0),
                "gamma={gamma} {d:?}: closed {closed} vs quadrature {quad}"
            );
        }
    }

    #[test]
    fn divergent_premium_is_flagged() {
        let h = DistortionFunction::Power { gamma: 0.5 };
        // tail * gamma = 0.75 <= 1: divergent premium.
        let d = MarginalDistribution::pareto(1.5, 1.0).unwrap();
        assert!(marginal_premium(&h, &d).unwrap().is_infinite());
    }

    #[test]
    fn parameter_validation() {
        assert!(DistortionFunction::Power { gamma: 0.0 }.validate().is_err());
        assert!(DistortionFunction::Power { gamma: 1.5 }.validate().is_err());
        assert!(DistortionFunction::EsClamp { alpha: 1.0 }.validate().is_err());
        assert!(DistortionFunction::VarIndicator { alpha: 0.0 }.validate().is_err());
    }
}
