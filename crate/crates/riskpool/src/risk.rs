//! Risk functionals on empirical samples: mean, Value at Risk, expected
//! shortfall, distortion premium, and the signed Choquet integral, plus the
//! unexpected-loss computation and fuzzed axiom/bound checkers.
//!
//! Estimator conventions, chosen so the algebraic identities hold exactly on
//! sorted samples:
//! - VaR(alpha) is the `ceil(alpha*M)`-th order statistic.
//! - ES(alpha) is the fractional-weight tail average
//!   `[(k - alpha*M) v_k + sum_(j>k) v_j] / (M (1-alpha))` with
//!   `k = ceil(alpha*M)`, the exact Riemann sum of the quantile integral on
//!   the empirical law. This makes `ES(alpha) == Distortion(EsClamp(alpha))`
//!   an identity and keeps co-monotonic additivity exact on aligned samples.
//! - The distortion premium runs in one pass over sorted increments, weight
//!   `h((M-k+1)/M)` on the k-th increment, with sentinel value 0.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distortion::DistortionFunction;
use crate::distributions::MarginalDistribution;
use crate::empirical::EmpiricalSample;
use crate::error::{Error, Result};

/// Relative tolerance for fuzzed axiom checks.
pub const AXIOM_RTOL: f64 = 1e-10;
/// Relative tolerance for exact algebraic identities.
pub const EXACT_RTOL: f64 = 1e-12;

/// A positively homogeneous risk functional on empirical samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RiskMeasure {
    Mean,
    Var { alpha: f64 },
    Es { alpha: f64 },
    Distortion {
        distortion: DistortionFunction,
        #[serde(rename = "C")]
        load: f64,
    },
}

impl RiskMeasure {
    pub fn var(alpha: f64) -> Result<Self> {
        let m = Self::Var { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn es(alpha: f64) -> Result<Self> {
        let m = Self::Es { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn distortion(distortion: DistortionFunction, load: f64) -> Result<Self> {
        let m = Self::Distortion { distortion, load };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Mean => Ok(()),
            Self::Var { alpha } | Self::Es { alpha } => {
                if alpha > 0.0 && alpha < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "confidence level must lie in (0,1), got {alpha}"
                    )))
                }
            }
            Self::Distortion { distortion, load } => {
                distortion.validate()?;
                if load > 0.0 && load.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "distortion load C must be positive, got {load}"
                    )))
                }
            }
        }
    }

    /// Slope of the cash-additivity identity `R(X+m) = R(X) + slope * m`:
    /// the load C for distortion premia, 1 otherwise.
    pub fn cash_slope(&self) -> f64 {
        match *self {
            Self::Distortion { load, .. } => load,
            _ => 1.0,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Self::Mean => "mean".into(),
            Self::Var { alpha } => format!("var({alpha})"),
            Self::Es { alpha } => format!("es({alpha})"),
            Self::Distortion { distortion, load } => {
                format!("distortion({distortion:?}, C={load})")
            }
        }
    }

    /// Evaluates the functional on a sample. Distortion premia require a
    /// nonnegative sample; signed samples go through [`choquet_integral`].
    pub fn evaluate(&self, s: &EmpiricalSample) -> Result<f64> {
        match *self {
            Self::Mean => Ok(s.sample_mean()),
            Self::Var { alpha } => Ok(s.sample_quantile(alpha)),
            Self::Es { alpha } => Ok(expected_shortfall(s, alpha)),
            Self::Distortion { distortion, load } => {
                if s.min() < 0.0 {
                    return Err(Error::NegativeSample(format!("min {}", s.min())));
                }
                let vals = s.values();
                let m = vals.len() as f64;
                let mut acc = 0.0;
                let mut prev = 0.0;
                for (idx, &v) in vals.iter().enumerate() {
                    let surv = (vals.len() - idx) as f64 / m;
                    acc += distortion.evaluate(surv) * (v - prev);
                    prev = v;
                }
                Ok(load * acc)
            }
        }
    }
}

fn expected_shortfall(s: &EmpiricalSample, alpha: f64) -> f64 {
    let vals = s.values();
    let m = vals.len();
    let am = alpha * m as f64;
    let k = (am.ceil() as usize).min(m).max(1);
    let mut tail = (k as f64 - am) * vals[k - 1];
    for &v in &vals[k..] {
        tail += v;
    }
    // M(1-alpha) written as M - alpha*M: one rounding instead of two, which
    // makes ES of a constant sample exactly the constant.
    tail / (m as f64 - am)
}

/// Signed Choquet integral of a sample under the capacity `h(P(X > x))`,
/// scaled by `load`.
///
/// The defining two-sided integral over the piecewise-constant empirical
/// survival function collapses to `v_1 + sum_k h((M-k)/M) (v_(k+1) - v_k)`:
/// below the sample minimum the integrand `h(1) - 1` vanishes, and the
/// positive/negative parts recombine increment by increment. On nonnegative
/// samples this performs the same arithmetic as the distortion premium in
/// [`RiskMeasure::evaluate`], so the two agree exactly.
pub fn choquet_integral(h: &DistortionFunction, load: f64, s: &EmpiricalSample) -> f64 {
    let vals = s.values();
    let m = vals.len() as f64;
    let mut acc = vals[0];
    for (idx, w) in vals.windows(2).enumerate() {
        let surv = (vals.len() - idx - 1) as f64 / m;
        acc += h.evaluate(surv) * (w[1] - w[0]);
    }
    load * acc
}

/// Unexpected loss of an aggregate: the excess of the risk-measure value over
/// the weighted sum of expected losses, raw and normalized by `n * mean
/// weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnexpectedLoss {
    pub raw: f64,
    pub normalized: f64,
    pub n: usize,
    pub total_weight: f64,
}

pub fn unexpected_loss(
    measure: &RiskMeasure,
    aggregate: &EmpiricalSample,
    weighted_mean_sum: f64,
    n: usize,
    total_weight: f64,
) -> Result<UnexpectedLoss> {
    if total_weight <= 0.0 || total_weight.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "total weight must be positive, got {total_weight}"
        )));
    }
    let raw = measure.evaluate(aggregate)? - weighted_mean_sum;
    Ok(UnexpectedLoss {
        raw,
        normalized: raw / total_weight,
        n,
        total_weight,
    })
}

#[derive(Debug, Clone)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub cases: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub measure: String,
    pub checks: Vec<AxiomCheck>,
}

struct Fuzzer {
    rng: ChaCha8Rng,
}

impl Fuzzer {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn len(&mut self) -> usize {
        2 + (self.rng.next_u64() % 62) as usize
    }

    fn sample(&mut self, signed: bool) -> Vec<f64> {
        let n = self.len();
        let scale = if self.unit() < 0.2 { 10.0 } else { 1.0 };
        (0..n)
            .map(|_| {
                let v = self.range(0.0, 5.0) * scale;
                if signed && self.unit() < 0.5 {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }

    fn marginal(&mut self) -> MarginalDistribution {
        match self.rng.next_u64() % 5 {
            0 => MarginalDistribution::bernoulli(self.range(0.05, 0.95)).unwrap(),
            1 => MarginalDistribution::exponential(self.range(0.2, 3.0)).unwrap(),
            2 => MarginalDistribution::pareto(self.range(1.5, 4.0), self.range(0.5, 2.0)).unwrap(),
            3 => {
                let lo = self.range(0.0, 1.0);
                MarginalDistribution::uniform(lo, lo + self.range(0.1, 3.0)).unwrap()
            }
            _ => MarginalDistribution::point_mass(self.range(0.0, 3.0)).unwrap(),
        }
    }
}

fn residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
}

/// Fuzzes the risk-measure axioms over randomized samples: cash additivity
/// (`R(X+m) = R(X) + C m`, with C = 1 for all kinds except distortion
/// premia), monotonicity on order-statistic-dominated pairs, positive
/// homogeneity, and co-monotonic additivity for ES and distortion kinds via
/// aligned quantile transforms of a shared uniform sample. Each identity must
/// hold within relative `1e-10`; the first violation aborts with the axiom
/// name, offending inputs, and residual.
pub fn check_axioms(measure: &RiskMeasure, fuzz_budget: usize, seed: u64) -> Result<AxiomReport> {
    measure.validate()?;
    let mut fz = Fuzzer::new(seed);
    let signed = !matches!(measure, RiskMeasure::Distortion { .. });
    let slope = measure.cash_slope();
    let mut checks = Vec::new();

    let mut worst_cash = 0.0_f64;
    for _ in 0..fuzz_budget {
        let raw = fz.sample(signed);
        let m = if signed {
            fz.range(-3.0, 3.0)
        } else {
            fz.range(0.0, 3.0)
        };
        let x = EmpiricalSample::from_raw(&raw)?;
        let shifted: Vec<f64> = raw.iter().map(|v| v + m).collect();
        let xm = EmpiricalSample::from_raw(&shifted)?;
        let lhs = measure.evaluate(&xm)?;
        let rhs = measure.evaluate(&x)? + slope * m;
        let r = residual(lhs, rhs);
        worst_cash = worst_cash.max(r);
        if r > AXIOM_RTOL {
            return Err(Error::AxiomViolation {
                axiom: "cash additivity".into(),
                details: format!("{} on X={raw:?}, m={m}", measure.name()),
                residual: r,
            });
        }
    }
    checks.push(AxiomCheck {
        axiom: "cash additivity",
        cases: fuzz_budget,
        max_residual: worst_cash,
    });

    let mut worst_mono = 0.0_f64;
    for _ in 0..fuzz_budget {
        let raw = fz.sample(signed);
        let dominated = EmpiricalSample::from_raw(&raw)?;
        let bigger: Vec<f64> = raw.iter().map(|v| v + fz.range(0.0, 2.0)).collect();
        let dominating = EmpiricalSample::from_raw(&bigger)?;
        let lo = measure.evaluate(&dominated)?;
        let hi = measure.evaluate(&dominating)?;
        let slack = AXIOM_RTOL * lo.abs().max(hi.abs()).max(1.0);
        worst_mono = worst_mono.max(lo - hi);
        if lo > hi + slack {
            return Err(Error::AxiomViolation {
                axiom: "monotonicity".into(),
                details: format!("{} on X={raw:?} vs Y={bigger:?}", measure.name()),
                residual: lo - hi,
            });
        }
    }
    checks.push(AxiomCheck {
        axiom: "monotonicity",
        cases: fuzz_budget,
        max_residual: worst_mono.max(0.0),
    });

    let mut worst_hom = 0.0_f64;
    for _ in 0..fuzz_budget {
        let raw = fz.sample(signed);
        let c = fz.range(0.01, 4.0);
        let x = EmpiricalSample::from_raw(&raw)?;
        let scaled: Vec<f64> = raw.iter().map(|v| c * v).collect();
        let cx = EmpiricalSample::from_raw(&scaled)?;
        let lhs = measure.evaluate(&cx)?;
        let rhs = c * measure.evaluate(&x)?;
        let r = residual(lhs, rhs);
        worst_hom = worst_hom.max(r);
        if r > AXIOM_RTOL {
            return Err(Error::AxiomViolation {
                axiom: "positive homogeneity".into(),
                details: format!("{} on X={raw:?}, c={c}", measure.name()),
                residual: r,
            });
        }
    }
    checks.push(AxiomCheck {
        axiom: "positive homogeneity",
        cases: fuzz_budget,
        max_residual: worst_hom,
    });

    if matches!(
        measure,
        RiskMeasure::Es { .. } | RiskMeasure::Distortion { .. }
    ) {
        let mut worst_com = 0.0_f64;
        for _ in 0..fuzz_budget {
            let m = 4 + (fz.rng.next_u64() % 60) as usize;
            let us: Vec<f64> = (0..m).map(|_| fz.unit()).collect();
            let f = fz.marginal();
            let g = fz.marginal();
            let xs: Vec<f64> = us.iter().map(|&u| f.quantile(u)).collect();
            let ys: Vec<f64> = us.iter().map(|&u| g.quantile(u)).collect();
            let zs: Vec<f64> = xs.iter().zip(&ys).map(|(a, b)| a + b).collect();
            let rx = measure.evaluate(&EmpiricalSample::from_raw(&xs)?)?;
            let ry = measure.evaluate(&EmpiricalSample::from_raw(&ys)?)?;
            let rz = measure.evaluate(&EmpiricalSample::from_raw(&zs)?)?;
            let r = residual(rz, rx + ry);
            worst_com = worst_com.max(r);
            if r > AXIOM_RTOL {
                return Err(Error::AxiomViolation {
                    axiom: "co-monotonic additivity".into(),
                    details: format!("{} on F={f:?}, G={g:?}, M={m}", measure.name()),
                    residual: r,
                });
            }
        }
        checks.push(AxiomCheck {
            axiom: "co-monotonic additivity",
            cases: fuzz_budget,
            max_residual: worst_com,
        });
    }

    Ok(AxiomReport {
        measure: measure.name(),
        checks,
    })
}

#[derive(Debug, Clone)]
pub struct NormBoundReport {
    pub measure: String,
    pub bound_constant: f64,
    pub cases: usize,
    /// Largest observed |R(s)| / (C ||s||_1); at most 1 when the bound holds.
    pub max_ratio: f64,
}

/// Checks the norm bound `|R(s)| <= C ||s||_1` over fuzzed signed samples,
/// with `C = 1/(1-alpha)` for expected shortfall and `C = 1` for the mean.
pub fn norm_bound_check(
    measure: &RiskMeasure,
    fuzz_budget: usize,
    p: f64,
    seed: u64,
) -> Result<NormBoundReport> {
    let constant = match *measure {
        RiskMeasure::Es { alpha } if p == 1.0 => 1.0 / (1.0 - alpha),
        RiskMeasure::Mean if p == 1.0 => 1.0,
        _ => {
            return Err(Error::Unsupported(format!(
                "norm bound check covers ES and Mean with p = 1, got {} with p = {p}",
                measure.name()
            )))
        }
    };
    let mut fz = Fuzzer::new(seed);
    let mut max_ratio = 0.0_f64;
    for _ in 0..fuzz_budget {
        let raw = fz.sample(true);
        let s = EmpiricalSample::from_raw(&raw)?;
        let value = measure.evaluate(&s)?.abs();
        let bound = constant * s.p_norm(1.0);
        if bound > 0.0 {
            max_ratio = max_ratio.max(value / bound);
        }
        if value > bound * (1.0 + EXACT_RTOL) {
            return Err(Error::AxiomViolation {
                axiom: "norm bound".into(),
                details: format!(
                    "{}: |R| = {value} exceeds C||s||_1 = {bound} on {raw:?}",
                    measure.name()
                ),
                residual: value - bound,
            });
        }
    }
    Ok(NormBoundReport {
        measure: measure.name(),
        bound_constant: constant,
        cases: fuzz_budget,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(vals: &[f64]) -> EmpiricalSample {
        EmpiricalSample::from_raw(vals).unwrap()
    }

    #[test]
    fn es_examples() {
        let m = RiskMeasure::es(0.5).unwrap();
        assert_eq!(m.evaluate(&sample(&[1.0, 2.0, 3.0, 4.0])).unwrap(), 3.5);
        // alpha*M integer boundary
        let m = RiskMeasure::es(0.75).unwrap();
        assert_eq!(m.evaluate(&sample(&[1.0, 2.0, 3.0, 4.0])).unwrap(), 4.0);
    }

    #[test]
    fn distortion_examples() {
        let m = RiskMeasure::distortion(DistortionFunction::Power { gamma: 0.5 }, 1.0).unwrap();
        let v = m.evaluate(&sample(&[0.0, 1.0])).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);

        let m = RiskMeasure::distortion(DistortionFunction::Identity, 1.0).unwrap();
        let s = sample(&[0.5, 1.5, 2.0, 7.25]);
        assert!((m.evaluate(&s).unwrap() - s.sample_mean()).abs() < 1e-14);

        let m = RiskMeasure::distortion(DistortionFunction::Identity, 1.0).unwrap();
        assert!(matches!(
            m.evaluate(&sample(&[-1.0, 1.0])),
            Err(Error::NegativeSample(_))
        ));
    }

    #[test]
    fn choquet_examples() {
        let id = DistortionFunction::Identity;
        assert_eq!(choquet_integral(&id, 1.0, &sample(&[-1.0, 1.0])), 0.0);
        for h in [
            id,
            DistortionFunction::Power { gamma: 0.5 },
            DistortionFunction::EsClamp { alpha: 0.9 },
        ] {
            assert_eq!(choquet_integral(&h, 1.0, &sample(&[2.5, 2.5, 2.5])), 2.5);
            assert_eq!(choquet_integral(&h, 1.0, &sample(&[-1.5, -1.5])), -1.5);
        }
        let h = DistortionFunction::EsClamp { alpha: 0.5 };
        let v = choquet_integral(&h, 1.0, &sample(&[-1.0, 0.0, 0.0, 1.0]));
        assert!((v - 0.5).abs() < 1e-15);
        // equals ES^0.5 of the same sample
        let es = RiskMeasure::es(0.5).unwrap();
        assert!((v - es.evaluate(&sample(&[-1.0, 0.0, 0.0, 1.0])).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn choquet_equals_distortion_premium_exactly_on_nonnegative_samples() {
        let mut fz = Fuzzer::new(7);
        for _ in 0..500 {
            let raw = fz.sample(false);
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            let h = match fz.rng.next_u64() % 4 {
                0 => DistortionFunction::Identity,
                1 => DistortionFunction::Power { gamma: fz.range(0.1, 1.0) },
                2 => DistortionFunction::EsClamp { alpha: fz.range(0.1, 0.95) },
                _ => DistortionFunction::VarIndicator { alpha: fz.range(0.1, 0.95) },
            };
            let load = fz.range(0.5, 3.0);
            let premium = RiskMeasure::Distortion { distortion: h, load }
                .evaluate(&s)
                .unwrap();
            let choquet = choquet_integral(&h, load, &s);
            assert_eq!(premium, choquet, "h={h:?} load={load} raw={raw:?}");
        }
    }

    #[test]
    fn es_clamp_duality_holds_at_exact_tolerance() {
        let mut fz = Fuzzer::new(11);
        for _ in 0..500 {
            let raw = fz.sample(false);
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            let alpha = fz.range(0.05, 0.98);
            let es = RiskMeasure::es(alpha).unwrap().evaluate(&s).unwrap();
            let dual = RiskMeasure::distortion(DistortionFunction::EsClamp { alpha }, 1.0)
                .unwrap()
                .evaluate(&s)
                .unwrap();
            assert!(
                residual(es, dual) <= EXACT_RTOL,
                "alpha={alpha} raw={raw:?}: {es} vs {dual}"
            );
        }
    }

    #[test]
    fn var_indicator_duality_without_boundary_ties() {
        let mut fz = Fuzzer::new(13);
        let mut checked = 0;
        while checked < 300 {
            let raw = fz.sample(false);
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            let alpha = fz.range(0.05, 0.98);
            let k = (alpha * s.len() as f64).ceil() as usize;
            let vals = s.values();
            // skip draws with ties at the alpha-boundary order statistic
            if vals.iter().filter(|&&v| v == vals[k - 1]).count() > 1 {
                continue;
            }
            let var = s.sample_quantile(alpha);
            let dual = RiskMeasure::distortion(DistortionFunction::VarIndicator { alpha }, 1.0)
                .unwrap()
                .evaluate(&s)
                .unwrap();
            assert!(
                residual(var, dual) <= AXIOM_RTOL,
                "alpha={alpha} raw={raw:?}: {var} vs {dual}"
            );
            checked += 1;
        }
    }

    #[test]
    fn es_dominates_mean_and_grows_with_alpha() {
        let mut fz = Fuzzer::new(17);
        for _ in 0..300 {
            let raw = fz.sample(true);
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            let mean = s.sample_mean();
            let mut prev = f64::NEG_INFINITY;
            for alpha in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
                let es = RiskMeasure::es(alpha).unwrap().evaluate(&s).unwrap();
                let slack = 1e-12 * es.abs().max(mean.abs()).max(1.0);
                assert!(es >= mean - slack);
                assert!(es >= prev - slack);
                prev = es;
            }
        }
    }

    #[test]
    fn markov_premium_bound() {
        let pairs = [
            (DistortionFunction::Power { gamma: 0.5 }, 3.0),
            (DistortionFunction::Identity, 2.0),
            (DistortionFunction::EsClamp { alpha: 0.9 }, 2.0),
            (DistortionFunction::VarIndicator { alpha: 0.9 }, 1.0),
        ];
        let mut fz = Fuzzer::new(19);
        for _ in 0..300 {
            let raw = fz.sample(false);
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            for (h, p) in pairs {
                let c = h.integrability_constant(p);
                assert!(c.is_finite());
                let load = fz.range(0.5, 2.0);
                let premium = RiskMeasure::Distortion { distortion: h, load }
                    .evaluate(&s)
                    .unwrap();
                let bound = load * s.p_norm(p) * (1.0 + c);
                assert!(
                    premium <= bound * (1.0 + 1e-9),
                    "{h:?} p={p}: premium {premium} > bound {bound} on {raw:?}"
                );
            }
        }
    }

    #[test]
    fn unexpected_loss_examples() {
        let s = sample(&[1.0, 2.0, 3.0]);
        let uel = unexpected_loss(&RiskMeasure::Mean, &s, s.sample_mean(), 3, 3.0).unwrap();
        assert_eq!(uel.raw, 0.0);
        assert_eq!(uel.normalized, 0.0);

        let degenerate = sample(&[4.2; 16]);
        let uel =
            unexpected_loss(&RiskMeasure::es(0.95).unwrap(), &degenerate, 4.2, 16, 16.0).unwrap();
        assert_eq!(uel.raw, 0.0);

        let uel = unexpected_loss(&RiskMeasure::Mean, &s, 1.0, 3, 4.0).unwrap();
        assert!((uel.normalized * uel.total_weight - uel.raw).abs() <= 1e-12 * uel.raw.abs());
    }

    #[test]
    fn axiom_suite_passes_for_all_kinds() {
        let measures = [
            RiskMeasure::Mean,
            RiskMeasure::var(0.9).unwrap(),
            RiskMeasure::es(0.95).unwrap(),
            RiskMeasure::distortion(DistortionFunction::Power { gamma: 0.5 }, 1.0).unwrap(),
            RiskMeasure::distortion(DistortionFunction::EsClamp { alpha: 0.9 }, 2.0).unwrap(),
        ];
        for m in measures {
            let report = check_axioms(&m, 200, 23).unwrap();
            for c in &report.checks {
                assert!(c.max_residual <= AXIOM_RTOL, "{}: {c:?}", report.measure);
            }
        }
    }

    #[test]
    fn norm_bound_examples() {
        let es95 = RiskMeasure::es(0.95).unwrap();
        let s = sample(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(es95.evaluate(&s).unwrap(), 1.0);
        assert!(1.0 <= s.p_norm(1.0) / 0.05);

        let es50 = RiskMeasure::es(0.5).unwrap();
        let s = sample(&[-1.0, 1.0]);
        assert_eq!(es50.evaluate(&s).unwrap(), 1.0);
        assert!(1.0 <= s.p_norm(1.0) / 0.5);

        for m in [RiskMeasure::Mean, es95, es50] {
            let rep = norm_bound_check(&m, 400, 1.0, 29).unwrap();
            assert!(rep.max_ratio <= 1.0 + EXACT_RTOL);
        }
        assert!(norm_bound_check(&RiskMeasure::var(0.9).unwrap(), 10, 1.0, 1).is_err());
        assert!(norm_bound_check(&RiskMeasure::Mean, 10, 2.0, 1).is_err());
    }
}
