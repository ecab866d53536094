//! The full invariant suite behind the `selftest` subcommand: axiom fuzzing
//! for every measure kind, the estimator duality identities, norm bounds,
//! quadrature cross-checks, and determinism of the simulation streams.
//!
//! Test binaries assert on the same outcomes, so the suite is written once
//! here and consumed from both places.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distortion::{
    marginal_premium, marginal_premium_quadrature, DistortionFunction,
};
use crate::distributions::MarginalDistribution;
use crate::empirical::EmpiricalSample;
use crate::orlicz::{
    self, default_delta2_grid, delta2_estimate, luxemburg_norm, Delta2Estimate, YoungFunction,
};
use crate::portfolio::{
    simulate_aggregate, CouplingKind, MarginalAssignment, SeedSpec, WeightScheme,
};
use crate::risk::{check_axioms, choquet_integral, norm_bound_check, RiskMeasure};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, f: impl FnOnce() -> Result<usize, String>) -> CheckOutcome {
    match f() {
        Ok(cases) => CheckOutcome {
            name: name.to_string(),
            cases,
            passed: true,
            detail: String::new(),
        },
        Err(detail) => CheckOutcome {
            name: name.to_string(),
            cases: 0,
            passed: false,
            detail,
        },
    }
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
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

    fn sample(&mut self, signed: bool, max_len: usize) -> Vec<f64> {
        let n = 1 + (self.rng.next_u64() as usize) % max_len;
        (0..n)
            .map(|_| {
                let v = self.range(0.0, 5.0);
                if signed && self.unit() < 0.5 {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }
}

fn fuzz_measures() -> Vec<RiskMeasure> {
    vec![
        RiskMeasure::Mean,
        RiskMeasure::Var { alpha: 0.9 },
        RiskMeasure::Var { alpha: 0.95 },
        RiskMeasure::Es { alpha: 0.9 },
        RiskMeasure::Es { alpha: 0.95 },
        RiskMeasure::Distortion {
            distortion: DistortionFunction::Power { gamma: 0.5 },
            load: 1.0,
        },
        RiskMeasure::Distortion {
            distortion: DistortionFunction::EsClamp { alpha: 0.9 },
            load: 2.0,
        },
        RiskMeasure::Distortion {
            distortion: DistortionFunction::VarIndicator { alpha: 0.9 },
            load: 1.0,
        },
    ]
}

pub fn axiom_suite(seed: u64, budget: usize) -> CheckOutcome {
    check("risk-measure axioms (cash, monotone, homogeneous, co-monotone)", || {
        let mut cases = 0;
        for m in fuzz_measures() {
            let report = check_axioms(&m, budget, seed).map_err(|e| e.to_string())?;
            cases += report.checks.iter().map(|c| c.cases).sum::<usize>();
        }
        Ok(cases)
    })
}

pub fn norm_bound_suite(seed: u64, budget: usize) -> CheckOutcome {
    check("norm bound |R(s)| <= C ||s||_1", || {
        let mut cases = 0;
        for alpha in [0.5, 0.9, 0.95, 0.99] {
            let m = RiskMeasure::Es { alpha };
            let rep = norm_bound_check(&m, budget, 1.0, seed).map_err(|e| e.to_string())?;
            cases += rep.cases;
        }
        let rep =
            norm_bound_check(&RiskMeasure::Mean, budget, 1.0, seed).map_err(|e| e.to_string())?;
        Ok(cases + rep.cases)
    })
}

pub fn es_clamp_duality(seed: u64, budget: usize) -> CheckOutcome {
    check("ES(alpha) == Distortion(EsClamp(alpha)) at rel 1e-12", || {
        let mut gen = Gen::new(seed);
        for i in 0..budget {
            let raw = gen.sample(false, 64);
            let alpha = gen.range(0.02, 0.98);
            let s = EmpiricalSample::from_raw(&raw).map_err(|e| e.to_string())?;
            let es = RiskMeasure::Es { alpha }.evaluate(&s).unwrap();
            let dual = RiskMeasure::Distortion {
                distortion: DistortionFunction::EsClamp { alpha },
                load: 1.0,
            }
            .evaluate(&s)
            .unwrap();
            let denom = es.abs().max(dual.abs()).max(1.0);
            if (es - dual).abs() / denom > 1e-12 {
                return Err(format!(
                    "case {i}: alpha={alpha}, es={es}, dual={dual}, sample={raw:?}"
                ));
            }
        }
        Ok(budget)
    })
}

pub fn choquet_premium_equality(seed: u64, budget: usize) -> CheckOutcome {
    check("choquet integral == distortion premium on nonnegative samples (exact)", || {
        let mut gen = Gen::new(seed ^ 0xC0FFEE);
        for i in 0..budget {
            let raw = gen.sample(false, 64);
            let s = EmpiricalSample::from_raw(&raw).map_err(|e| e.to_string())?;
            let h = match i % 4 {
                0 => DistortionFunction::Identity,
                1 => DistortionFunction::Power { gamma: gen.range(0.1, 1.0) },
                2 => DistortionFunction::EsClamp { alpha: gen.range(0.1, 0.95) },
                _ => DistortionFunction::VarIndicator { alpha: gen.range(0.1, 0.95) },
            };
            let load = gen.range(0.5, 3.0);
            let premium = RiskMeasure::Distortion { distortion: h, load }
                .evaluate(&s)
                .unwrap();
            let choquet = choquet_integral(&h, load, &s);
            if premium != choquet {
                return Err(format!(
                    "case {i}: premium {premium} != choquet {choquet} for {h:?} on {raw:?}"
                ));
            }
        }
        Ok(budget)
    })
}

pub fn var_indicator_duality(seed: u64, budget: usize) -> CheckOutcome {
    check("VaR(alpha) == Distortion(VarIndicator(alpha)) off boundary ties", || {
        let mut gen = Gen::new(seed ^ 0xFEED);
        let mut done = 0;
        let mut tries = 0;
        while done < budget && tries < budget * 20 {
            tries += 1;
            let raw = gen.sample(false, 64);
            let alpha = gen.range(0.02, 0.98);
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            let k = (alpha * s.len() as f64).ceil() as usize;
            let vals = s.values();
            if vals.iter().filter(|&&v| v == vals[k - 1]).count() > 1 {
                continue;
            }
            let var = s.sample_quantile(alpha);
            let dual = RiskMeasure::Distortion {
                distortion: DistortionFunction::VarIndicator { alpha },
                load: 1.0,
            }
            .evaluate(&s)
            .unwrap();
            let denom = var.abs().max(dual.abs()).max(1.0);
            if (var - dual).abs() / denom > 1e-10 {
                return Err(format!("alpha={alpha}, var={var}, dual={dual}, sample={raw:?}"));
            }
            done += 1;
        }
        Ok(done)
    })
}

pub fn luxemburg_p_norm_identity(seed: u64, budget: usize) -> CheckOutcome {
    check("Luxemburg norm under Power(p) == p-norm at rel 1e-9", || {
        let mut gen = Gen::new(seed ^ 0xAB);
        let mut cases = 0;
        for _ in 0..budget {
            let raw = gen.sample(true, 48);
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            for p in [1.0, 1.5, 2.0, 3.0] {
                let phi = YoungFunction::Power { p };
                let lux = luxemburg_norm(&s, &phi, orlicz::LUXEMBURG_RTOL).unwrap();
                let pn = s.p_norm(p);
                if (lux - pn).abs() > 1e-9 * pn.max(1e-30) {
                    return Err(format!("p={p}: luxemburg {lux} vs p-norm {pn} on {raw:?}"));
                }
                cases += 1;
            }
        }
        Ok(cases)
    })
}

pub fn delta2_power_identity() -> CheckOutcome {
    check("doubling estimate of Power(p) == 2^p on every grid point", || {
        let grid = default_delta2_grid();
        let mut cases = 0;
        for p in [1.0, 1.5, 2.0, 3.0] {
            let phi = YoungFunction::Power { p };
            let expected = 2f64.powf(p);
            for &t in &grid {
                let ratio = phi.doubling_ratio(t).unwrap();
                if (ratio - expected).abs() > 2.0 * f64::EPSILON * expected {
                    return Err(format!("p={p}, t={t}: ratio {ratio} vs {expected}"));
                }
                cases += 1;
            }
            match delta2_estimate(&phi, &grid) {
                Delta2Estimate::Bounded(sup) if sup == expected => {}
                other => return Err(format!("p={p}: estimate {other:?}")),
            }
        }
        Ok(cases)
    })
}

pub fn delta2_negative_control() -> CheckOutcome {
    check("exp(t)-1 flagged as doubling violation", || {
        let grid: Vec<f64> = (0..=7).map(|j| 100.0 * 0.5f64.powi(7 - j)).collect();
        match delta2_estimate(&YoungFunction::ExpMinusOne, &grid) {
            Delta2Estimate::Violation { .. } => Ok(grid.len()),
            other => Err(format!("expected violation, got {other:?}")),
        }
    })
}

fn oracle_distributions() -> Vec<MarginalDistribution> {
    vec![
        MarginalDistribution::Bernoulli { p: 0.1 },
        MarginalDistribution::Bernoulli { p: 0.6 },
        MarginalDistribution::Exponential { rate: 1.0 },
        MarginalDistribution::Exponential { rate: 2.5 },
        MarginalDistribution::Pareto { tail: 2.0, scale: 1.0 },
        MarginalDistribution::Pareto { tail: 3.0, scale: 0.5 },
        MarginalDistribution::Uniform { lo: 0.0, hi: 1.0 },
        MarginalDistribution::Uniform { lo: 0.5, hi: 4.0 },
        MarginalDistribution::PointMass { c: 2.0 },
    ]
}

pub fn var_quantile_identity() -> CheckOutcome {
    check("closed-form VaR == quantile on the alpha grid", || {
        let mut cases = 0;
        for d in oracle_distributions() {
            for i in 1..100 {
                let a = i as f64 / 100.0;
                if d.closed_form_var(a) != d.quantile(a) {
                    return Err(format!("{d:?} at alpha={a}"));
                }
                cases += 1;
            }
        }
        Ok(cases)
    })
}

pub fn es_quadrature_oracle() -> CheckOutcome {
    check("closed-form ES == quantile quadrature at rel 1e-8", || {
        let mut cases = 0;
        for d in oracle_distributions() {
            if !d.mean().is_finite() {
                continue;
            }
            for a in [0.1, 0.5, 0.9, 0.95] {
                let w = 1.0 - a;
                let integral = crate::quad::adaptive_simpson(
                    |s| {
                        if s == 0.0 {
                            return 0.0;
                        }
                        d.quantile_survival(w * s.powi(4)) * 4.0 * w * s.powi(3)
                    },
                    0.0,
                    1.0,
                    1e-11,
                );
                let es = integral / w;
                let closed = d.closed_form_es(a).unwrap();
                if (es - closed).abs() > 1e-8 * closed.abs().max(1.0) {
                    return Err(format!("{d:?} alpha={a}: {es} vs {closed}"));
                }
                cases += 1;
            }
        }
        Ok(cases)
    })
}

pub fn integrability_quadrature_oracle() -> CheckOutcome {
    check("integrability constant: closed form == quadrature", || {
        let hs = [
            DistortionFunction::Identity,
            DistortionFunction::Power { gamma: 0.5 },
            DistortionFunction::Power { gamma: 0.8 },
            DistortionFunction::VarIndicator { alpha: 0.95 },
            DistortionFunction::EsClamp { alpha: 0.9 },
        ];
        let mut cases = 0;
        for h in hs {
            for p in [1.5, 2.0, 3.0, 4.0] {
                let closed = h.integrability_constant(p);
                let quad = h.integrability_constant_quadrature(p, 1e-10);
                if closed.is_finite() {
                    if (closed - quad).abs() > 1e-8 {
                        return Err(format!("{h:?} p={p}: {closed} vs {quad}"));
                    }
                } else if quad.is_finite() {
                    return Err(format!("{h:?} p={p}: divergence missed by quadrature"));
                }
                cases += 1;
            }
        }
        Ok(cases)
    })
}

pub fn premium_quadrature_oracle() -> CheckOutcome {
    check("distorted-survival integral: closed form == quadrature", || {
        let mut cases = 0;
        for gamma in [0.4, 0.6, 0.9, 1.0] {
            let h = DistortionFunction::Power { gamma };
            for d in [
                MarginalDistribution::Exponential { rate: 1.0 },
                MarginalDistribution::Pareto { tail: 4.0, scale: 1.0 },
                MarginalDistribution::Uniform { lo: 0.0, hi: 2.0 },
                MarginalDistribution::Bernoulli { p: 0.25 },
            ] {
                let closed = marginal_premium(&h, &d).unwrap();
                let quad = marginal_premium_quadrature(&h, &d, 1e-10).unwrap();
                if (closed - quad).abs() > 1e-6 * closed.max(1.0) {
                    return Err(format!("gamma={gamma} {d:?}: {closed} vs {quad}"));
                }
                cases += 1;
            }
        }
        Ok(cases)
    })
}

pub fn markov_premium_bound(seed: u64, budget: usize) -> CheckOutcome {
    check("premium <= C ||s||_p (1 + integrability constant)", || {
        let pairs = [
            (DistortionFunction::Power { gamma: 0.5 }, 3.0),
            (DistortionFunction::Identity, 2.0),
            (DistortionFunction::EsClamp { alpha: 0.9 }, 2.0),
            (DistortionFunction::VarIndicator { alpha: 0.9 }, 1.0),
        ];
        let mut gen = Gen::new(seed ^ 0x5151);
        let mut cases = 0;
        for _ in 0..budget {
            let raw = gen.sample(false, 48);
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            for (h, p) in pairs {
                let load = gen.range(0.5, 2.0);
                let premium = RiskMeasure::Distortion { distortion: h, load }
                    .evaluate(&s)
                    .unwrap();
                let bound = load * s.p_norm(p) * (1.0 + h.integrability_constant(p));
                if premium > bound * (1.0 + 1e-9) {
                    return Err(format!("{h:?} p={p}: premium {premium} > bound {bound}"));
                }
                cases += 1;
            }
        }
        Ok(cases)
    })
}

pub fn comonotonic_stream_identity(seed: u64) -> CheckOutcome {
    check("co-monotonic identical marginals == quantile transform (bitwise)", || {
        let dist = MarginalDistribution::Exponential { rate: 1.0 };
        let spec = SeedSpec::new(seed);
        let sim = simulate_aggregate(
            &MarginalAssignment::Shared(dist),
            &WeightScheme::PowerGrowth { beta: 1.0 },
            200,
            CouplingKind::Comonotonic,
            200,
            spec,
        )
        .map_err(|e| e.to_string())?;
        for (j, a) in sim.normalized.iter().enumerate() {
            let expected = dist.quantile(spec.uniform_at(j as u64, 0));
            if *a != expected {
                return Err(format!("replication {j}: {a} != {expected}"));
            }
        }
        Ok(sim.normalized.len())
    })
}

pub fn simulation_schedule_invariance(seed: u64) -> CheckOutcome {
    check("simulation output is independent of thread count", || {
        let dist = MarginalDistribution::Bernoulli { p: 0.2 };
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| e.to_string())?;
            pool.install(|| {
                simulate_aggregate(
                    &MarginalAssignment::Shared(dist),
                    &WeightScheme::Constant,
                    150,
                    CouplingKind::Iid,
                    250,
                    SeedSpec::new(seed),
                )
                .map(|s| s.normalized)
                .map_err(|e| e.to_string())
            })
        };
        let a = run(1)?;
        let b = run(4)?;
        if a != b {
            return Err("thread counts 1 and 4 disagree".into());
        }
        Ok(a.len())
    })
}

pub fn uniform_inverse_power_identity(seed: u64) -> CheckOutcome {
    check("premium of U^(-1/p) samples -> C (1 + integrability constant)", || {
        // U^(-1/p) is pareto(p, 1). The empirical premium reaches the limit
        // at rate M^(-(p*gamma - 1)/p), so keep p*gamma comfortably above 1.
        let p = 3.0;
        let h = DistortionFunction::Power { gamma: 0.9 };
        let pareto = MarginalDistribution::Pareto { tail: p, scale: 1.0 };
        let closed = 1.0 + h.integrability_constant(p);
        let spec = SeedSpec::new(seed ^ 0x77);
        let draws: Vec<f64> = (0..40_000)
            .map(|j| pareto.quantile(spec.uniform_at(j, 0)))
            .collect();
        let s = EmpiricalSample::from_raw(&draws).unwrap();
        let estimate = RiskMeasure::Distortion { distortion: h, load: 1.0 }
            .evaluate(&s)
            .unwrap();
        if (estimate - closed).abs() > 0.02 * closed {
            return Err(format!("MC premium {estimate} vs closed {closed}"));
        }
        Ok(draws.len())
    })
}

/// Runs every invariant check; the CLI prints one line per outcome and exits
/// nonzero if any failed.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        axiom_suite(seed, 1000),
        norm_bound_suite(seed, 1000),
        es_clamp_duality(seed, 1000),
        choquet_premium_equality(seed, 1000),
        var_indicator_duality(seed, 500),
        luxemburg_p_norm_identity(seed, 250),
        delta2_power_identity(),
        delta2_negative_control(),
        var_quantile_identity(),
        es_quadrature_oracle(),
        integrability_quadrature_oracle(),
        premium_quadrature_oracle(),
        markov_premium_bound(seed, 300),
        comonotonic_stream_identity(seed),
        simulation_schedule_invariance(seed),
        uniform_inverse_power_identity(seed),
    ]
}
