//! Portfolio weight schemes with Toeplitz diagnostics and deterministic
//! Monte Carlo generators for i.i.d. and co-monotonic weighted aggregates.
//!
//! All sampling is inverse-CDF from uniforms, so the co-monotonic coupling is
//! exactly the shared-uniform coupling. Uniform streams are counter
//! addressable: replication `j` reads stream `j` of a ChaCha cipher keyed by
//! the master seed, and component `i` occupies words `2i, 2i+1` of that
//! stream. Output is therefore bit-identical for a given seed regardless of
//! how replications are scheduled across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distortion::marginal_premium;
use crate::distributions::MarginalDistribution;
use crate::empirical::EmpiricalSample;
use crate::error::{Error, Result};
use crate::risk::RiskMeasure;

/// Portfolio weight sequence `lambda_i > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum WeightScheme {
    /// `lambda_i = 1`.
    Constant,
    /// `lambda_i = i^beta`, `beta > -1`.
    PowerGrowth { beta: f64 },
    /// `lambda_i = r^i`, `r > 1`; the Toeplitz ratio does not vanish, making
    /// this the negative control for pooling.
    Geometric { r: f64 },
    /// Explicit positive weights.
    Explicit { values: Vec<f64> },
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant => Ok(()),
            Self::PowerGrowth { beta } => {
                if *beta > -1.0 && beta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "power-growth exponent must exceed -1, got {beta}"
                    )))
                }
            }
            Self::Geometric { r } => {
                if *r > 1.0 && r.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "geometric ratio must exceed 1, got {r}"
                    )))
                }
            }
            Self::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidParameter(
                        "explicit weights must be nonempty".into(),
                    ));
                }
                if let Some(bad) = values.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
                    return Err(Error::InvalidParameter(format!(
                        "weights must be strictly positive and finite, got {bad}"
                    )));
                }
                Ok(())
            }
        }
    }

    fn lambda(&self, i: usize) -> f64 {
        debug_assert!(i >= 1);
        match self {
            Self::Constant => 1.0,
            Self::PowerGrowth { beta } => (i as f64).powf(*beta),
            Self::Geometric { r } => r.powi(i as i32),
            Self::Explicit { values } => values[i - 1],
        }
    }

    /// O(1)-per-query view of the first `n_max` weights.
    pub fn table(&self, n_max: usize) -> Result<WeightTable> {
        WeightTable::new(self, n_max)
    }

    /// `max_(i<=n) lambda_i / (n mean-lambda_n)`, the Toeplitz ratio.
    pub fn toeplitz_ratio(&self, n: usize) -> Result<f64> {
        Ok(self.table(n)?.toeplitz_ratio(n))
    }

    /// Weights normalized to sum to one over the first `n` components,
    /// computed in a form that stays finite even where the raw prefix sums
    /// overflow (geometric weights at large n).
    pub fn normalized_weights(&self, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if let Self::Explicit { values } = self {
            if values.len() < n {
                return Err(Error::InvalidParameter(format!(
                    "explicit weights provide {} entries but n = {n}",
                    values.len()
                )));
            }
        }
        if let Self::Geometric { r } = self {
            let head = (1.0 - 1.0 / r) / (1.0 - r.powi(-(n as i32)));
            return Ok((1..=n).map(|i| r.powi(i as i32 - n as i32) * head).collect());
        }
        let total: f64 = (1..=n).map(|i| self.lambda(i)).sum();
        Ok((1..=n).map(|i| self.lambda(i) / total).collect())
    }
}

/// Prefix-sum cache over a weight scheme: total weight, mean weight, and
/// Toeplitz ratio in O(1) per query after O(n) setup.
#[derive(Debug, Clone)]
pub struct WeightTable {
    scheme: WeightScheme,
    prefix: Vec<f64>,
    running_max: Vec<f64>,
}

impl WeightTable {
    pub fn new(scheme: &WeightScheme, n_max: usize) -> Result<Self> {
        scheme.validate()?;
        if n_max == 0 {
            return Err(Error::InvalidParameter("portfolio size must be >= 1".into()));
        }
        if let WeightScheme::Explicit { values } = scheme {
            if values.len() < n_max {
                return Err(Error::InvalidParameter(format!(
                    "explicit weights provide {} entries but n = {n_max}",
                    values.len()
                )));
            }
        }
        let mut prefix: Vec<f64> = Vec::with_capacity(n_max + 1);
        let mut running_max: Vec<f64> = Vec::with_capacity(n_max + 1);
        prefix.push(0.0);
        running_max.push(0.0);
        for i in 1..=n_max {
            let l = scheme.lambda(i);
            prefix.push(prefix[i - 1] + l);
            running_max.push(running_max[i - 1].max(l));
        }
        Ok(Self {
            scheme: scheme.clone(),
            prefix,
            running_max,
        })
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.scheme.lambda(i)
    }

    /// `n * mean-lambda_n = sum of the first n weights`. May overflow to
    /// infinity for geometric weights at very large n; normalized quantities
    /// stay finite.
    pub fn total_weight(&self, n: usize) -> f64 {
        self.prefix[n]
    }

    pub fn mean_weight(&self, n: usize) -> f64 {
        self.prefix[n] / n as f64
    }

    pub fn toeplitz_ratio(&self, n: usize) -> f64 {
        // Geometric has an overflow-proof closed form: (1 - 1/r)/(1 - r^-n).
        if let WeightScheme::Geometric { r } = self.scheme {
            return (1.0 - 1.0 / r) / (1.0 - r.powi(-(n as i32)));
        }
        self.running_max[n] / self.prefix[n]
    }
}

/// How components are coupled within one replication: independent uniforms
/// per component, or one shared uniform across all components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Iid,
    Comonotonic,
}

/// Marginals for the n portfolio components: one shared distribution (the
/// common-mean setting of the experiments) or one per component.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalAssignment {
    Shared(MarginalDistribution),
    PerComponent(Vec<MarginalDistribution>),
}

impl MarginalAssignment {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Self::Shared(d) => d.validate(),
            Self::PerComponent(ds) => {
                if ds.len() < n {
                    return Err(Error::InvalidParameter(format!(
                        "{} marginals provided but n = {n}",
                        ds.len()
                    )));
                }
                ds.iter().try_for_each(MarginalDistribution::validate)
            }
        }
    }

    fn at(&self, i: usize) -> &MarginalDistribution {
        match self {
            Self::Shared(d) => d,
            Self::PerComponent(ds) => &ds[i],
        }
    }
}

/// Master seed plus the derivation rule mapping (replication, component) to
/// an independent substream. Identical triples reproduce identical uniforms
/// regardless of execution order or parallelism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    fn base(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.master_seed)
    }

    /// Cipher stream for one replication, positioned at component 0.
    pub fn replication_stream(&self, replication: u64) -> ChaCha8Rng {
        let mut rng = self.base();
        rng.set_stream(replication);
        rng
    }

    /// Random-access form of the substream contract: the uniform any
    /// sequential consumer would see as the `component`-th draw of
    /// `replication`.
    pub fn uniform_at(&self, replication: u64, component: u64) -> f64 {
        let mut rng = self.replication_stream(replication);
        rng.set_word_pos(2 * component as u128);
        next_open_unit(&mut rng)
    }
}

/// Maps a 64-bit draw to the open interval (0,1); 53-bit resolution centered
/// away from both endpoints so quantile functions stay finite.
pub(crate) fn next_open_unit<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Monte Carlo sample of a weighted aggregate: per-replication normalized
/// averages in replication order, plus the scale factor back to the raw
/// aggregate.
#[derive(Debug, Clone)]
pub struct SimulatedAggregate {
    pub n: usize,
    pub total_weight: f64,
    /// `A_j = sum_i lambda_i X_ij / (n mean-lambda_n)`, replication order.
    pub normalized: Vec<f64>,
    /// Mean of `X^q` over all n*replications component draws, when requested.
    pub component_moment: Option<f64>,
}

impl SimulatedAggregate {
    pub fn normalized_sample(&self) -> EmpiricalSample {
        EmpiricalSample::from_raw(&self.normalized).expect("simulation output is finite")
    }

    /// Sample of the raw aggregates `sum_i lambda_i X_ij`.
    pub fn aggregate_sample(&self) -> EmpiricalSample {
        let scaled: Vec<f64> = self.normalized.iter().map(|a| a * self.total_weight).collect();
        EmpiricalSample::from_raw(&scaled).expect("simulation output is finite")
    }
}

/// Simulates `replications` draws of the weighted aggregate under the given
/// coupling. Aggregation streams over components, retaining only
/// per-replication scalars; replications run in parallel and are collected
/// in index order.
pub fn simulate_aggregate(
    marginals: &MarginalAssignment,
    weights: &WeightScheme,
    n: usize,
    coupling: CouplingKind,
    replications: usize,
    seed: SeedSpec,
) -> Result<SimulatedAggregate> {
    simulate(marginals, weights, n, coupling, replications, seed, None)
}

/// [`simulate_aggregate`] that additionally accumulates the raw q-th moment
/// of the individual component draws (the moment-bound diagnostic).
pub fn simulate_aggregate_with_moment(
    marginals: &MarginalAssignment,
    weights: &WeightScheme,
    n: usize,
    coupling: CouplingKind,
    replications: usize,
    seed: SeedSpec,
    q: f64,
) -> Result<SimulatedAggregate> {
    simulate(marginals, weights, n, coupling, replications, seed, Some(q))
}

fn simulate(
    marginals: &MarginalAssignment,
    weights: &WeightScheme,
    n: usize,
    coupling: CouplingKind,
    replications: usize,
    seed: SeedSpec,
    moment_q: Option<f64>,
) -> Result<SimulatedAggregate> {
    if replications < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 replications, got {replications}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("portfolio size must be >= 1".into()));
    }
    marginals.validate(n)?;
    let w = weights.normalized_weights(n)?;
    let total_weight = weights.table(n)?.total_weight(n);

    // Identical marginals under the shared uniform collapse exactly:
    // sum_i lambda_i F^-1(U) / (n mean-lambda) = F^-1(U), so the normalized
    // aggregate is the quantile transform itself (bitwise, not just in law).
    let shared_comonotonic = matches!(
        (coupling, marginals),
        (CouplingKind::Comonotonic, MarginalAssignment::Shared(_))
    );

    let rows: Vec<(f64, f64)> = (0..replications)
        .into_par_iter()
        .map(|j| {
            let mut rng = seed.replication_stream(j as u64);
            match coupling {
                CouplingKind::Comonotonic => {
                    let u = next_open_unit(&mut rng);
                    if shared_comonotonic {
                        let x = marginals.at(0).quantile(u);
                        let moment = moment_q.map_or(0.0, |q| x.abs().powf(q));
                        (x, moment)
                    } else {
                        let mut acc = 0.0;
                        let mut msum = 0.0;
                        for (i, wi) in w.iter().enumerate() {
                            let x = marginals.at(i).quantile(u);
                            acc += wi * x;
                            if let Some(q) = moment_q {
                                msum += x.abs().powf(q);
                            }
                        }
                        (acc, msum / n as f64)
                    }
                }
                CouplingKind::Iid => {
                    let mut acc = 0.0;
                    let mut msum = 0.0;
                    for (i, wi) in w.iter().enumerate() {
                        let u = next_open_unit(&mut rng);
                        let x = marginals.at(i).quantile(u);
                        acc += wi * x;
                        if let Some(q) = moment_q {
                            msum += x.abs().powf(q);
                        }
                    }
                    (acc, msum / n as f64)
                }
            }
        })
        .collect();

    let normalized: Vec<f64> = rows.iter().map(|(a, _)| *a).collect();
    let component_moment = moment_q
        .map(|_| rows.iter().map(|(_, m)| *m).sum::<f64>() / replications as f64);

    Ok(SimulatedAggregate {
        n,
        total_weight,
        normalized,
        component_moment,
    })
}

/// Worst-case aggregate risk over all joint laws with marginal `dist`:
/// `(n mean-lambda_n) * R(dist)`, attained by identical co-monotonic copies
/// for positively homogeneous law-invariant measures. VaR is out of scope
/// (its sharp dependence bounds are a different construction).
pub fn worst_case_aggregate_risk(
    measure: &RiskMeasure,
    dist: &MarginalDistribution,
    weights: &WeightScheme,
    n: usize,
) -> Result<f64> {
    measure.validate()?;
    dist.validate()?;
    let risk_of_marginal = closed_form_risk(measure, dist)?;
    let total = weights.table(n)?.total_weight(n);
    Ok(total * risk_of_marginal)
}

/// Closed-form value of the measure on a marginal distribution.
pub fn closed_form_risk(measure: &RiskMeasure, dist: &MarginalDistribution) -> Result<f64> {
    match *measure {
        RiskMeasure::Mean => {
            let m = dist.mean();
            if m.is_finite() {
                Ok(m)
            } else {
                Err(Error::Divergent(format!(
                    "mean of {} diverges",
                    dist.family_name()
                )))
            }
        }
        RiskMeasure::Var { .. } => Err(Error::Unsupported(
            "worst-case aggregation under VaR is out of scope \
             (sharp VaR dependence bounds are a separate construction)"
                .into(),
        )),
        RiskMeasure::Es { alpha } => dist.closed_form_es(alpha),
        RiskMeasure::Distortion { distortion, load } => {
            let premium = marginal_premium(&distortion, dist)?;
            if premium.is_finite() {
                Ok(load * premium)
            } else {
                Err(Error::Divergent(format!(
                    "distortion premium of {} diverges for {distortion:?}",
                    dist.family_name()
                )))
            }
        }
    }
}
