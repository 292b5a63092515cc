//! Monte Carlo ensembles over random initial phases: reproducible phase
//! sampling, batch trajectory execution, outcome statistics and the exact
//! sign-configuration oracle they are checked against.
//!
//! Trajectories are embarrassingly parallel. Each run derives its generator
//! from `(seed, run_index)`, so results are independent of execution order
//! and of the degree of parallelism; aggregation folds an ordered result
//! vector.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};
use crate::integrator::{integrate_outcome, IntegratorConfig, Law, OutcomeClass};
use crate::model::{coupling_vector, AlphaVector, ModelParams, PhaseMode, StateVector};
use crate::model::SINGULAR_TOLERANCE;

/// A draw is retried at most this many times before the sampler is declared
/// broken.
const MAX_REJECTIONS: u32 = 1000;

/// Distribution of the chaotic initial phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseDistribution {
    /// Uniform on [0, 2π); the maximum-entropy default.
    #[default]
    UniformCircle,
}

/// Reproducible sampler for initial phase vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSampler {
    pub mode: PhaseMode,
    pub distribution: PhaseDistribution,
    pub seed: u64,
}

impl PhaseSampler {
    pub fn new(mode: PhaseMode, seed: u64) -> Self {
        Self {
            mode,
            distribution: PhaseDistribution::UniformCircle,
            seed,
        }
    }

    /// Draws the phase vector for one run. Deterministic in
    /// `(seed, run_index)`: the per-run generator stream is derived from
    /// both, so any run is reproducible in isolation. Draws with
    /// |cos θ| ≤ 1e-12 are rejected and redrawn; the rejection count is
    /// returned alongside the angles.
    pub fn sample_phases(&self, n_states: usize, run_index: u64) -> Result<(Vec<f64>, u32)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(run_index);
        let mut rejected = 0u32;
        let mut draw = |rng: &mut ChaCha8Rng| -> Result<f64> {
            let mut attempts = 0u32;
            loop {
                let theta = match self.distribution {
                    PhaseDistribution::UniformCircle => rng.random_range(0.0..TAU),
                };
                if theta.cos().abs() > SINGULAR_TOLERANCE {
                    return Ok(theta);
                }
                rejected += 1;
                attempts += 1;
                if attempts >= MAX_REJECTIONS {
                    return Err(Error::SamplerExhausted(attempts));
                }
            }
        };
        let theta = match self.mode {
            PhaseMode::Common => {
                let shared = draw(&mut rng)?;
                vec![shared; n_states]
            }
            PhaseMode::Independent => {
                let mut out = Vec::with_capacity(n_states);
                for _ in 0..n_states {
                    out.push(draw(&mut rng)?);
                }
                out
            }
        };
        Ok((theta, rejected))
    }
}

/// Result of a single ensemble run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run_index: u64,
    pub outcome: OutcomeClass,
    pub collapse_time: Option<f64>,
    pub rejected: u32,
}

/// Aggregated ensemble statistics, self-describing for later audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub n_runs: u64,
    /// Outcome counts keyed by class label; collapse outcomes are broken
    /// down per target state. Counts sum to `n_runs`.
    pub counts: BTreeMap<String, u64>,
    pub frequencies: BTreeMap<String, f64>,
    /// Binomial 99% confidence interval [lo, hi] per class.
    pub ci99: BTreeMap<String, [f64; 2]>,
    /// Exact sign-configuration probabilities per class.
    pub oracle: BTreeMap<String, f64>,
    pub seed: u64,
    pub x0: Vec<f64>,
    pub params: ModelParams,
    pub cfg: IntegratorConfig,
    pub rejected_samples: u64,
    /// Seconds spent running the ensemble.
    pub wall_time: f64,
}

/// Pearson statistic and tail probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
}

/// Exact outcome probabilities from exhaustive enumeration of all sign
/// configurations, each weighted by the uniform phase measure (every sign
/// equiprobable; `Common` mode only reaches the two all-equal
/// configurations). The coupling is evaluated literally per configuration
/// and the asymptotic outcome read off the signs f[n]·α[n].
pub fn sign_config_oracle(
    n_states: usize,
    mode: PhaseMode,
) -> Result<BTreeMap<OutcomeClass, f64>> {
    if n_states < 2 {
        return Err(Error::InvalidConfig(format!(
            "oracle needs at least 2 states, got {n_states}"
        )));
    }
    if n_states > 20 {
        return Err(Error::DimensionTooLarge(n_states));
    }
    let mut probs: BTreeMap<OutcomeClass, f64> = BTreeMap::new();
    let configs: Vec<u64> = match mode {
        PhaseMode::Independent => (0..(1u64 << n_states)).collect(),
        PhaseMode::Common => vec![0, (1u64 << n_states) - 1],
    };
    let weight = 1.0 / configs.len() as f64;
    for mask in configs {
        let signs: Vec<i8> = (0..n_states)
            .map(|k| if mask >> k & 1 == 1 { 1 } else { -1 })
            .collect();
        let alpha = AlphaVector::from_signs(signs)?;
        let f = coupling_vector(&alpha);
        let outcome = asymptotic_outcome(&alpha, f.values());
        *probs.entry(outcome).or_insert(0.0) += weight;
    }
    Ok(probs)
}

/// Destination of each component under the reduction law: growing where
/// f[n]·α[n] > 0, decaying where it is negative.
fn asymptotic_outcome(alpha: &AlphaVector, f: &[f64]) -> OutcomeClass {
    let n = alpha.len();
    let mut growers = 0usize;
    let mut grower_index = 0usize;
    for k in 0..n {
        if f[k] * alpha.as_f64(k) > 0.0 {
            growers += 1;
            grower_index = k;
        }
    }
    if growers == 0 {
        OutcomeClass::AllDecay
    } else if growers == n {
        OutcomeClass::AllGrow
    } else if growers == 1 {
        OutcomeClass::CollapseTo(grower_index)
    } else {
        OutcomeClass::Unresolved
    }
}

fn validate_ensemble_inputs(
    n_runs: u64,
    x0: &[f64],
    params: &ModelParams,
    sampler: &PhaseSampler,
) -> Result<()> {
    if n_runs == 0 {
        return Err(Error::InvalidConfig("n_runs must be >= 1".into()));
    }
    if x0.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "x0 needs at least 2 components, got {}",
            x0.len()
        )));
    }
    for (i, &v) in x0.iter().enumerate() {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "x0[{i}] = {v} must lie strictly inside (0, 1)"
            )));
        }
    }
    if params.phase_mode != sampler.mode {
        return Err(Error::InvalidConfig(format!(
            "params.phase_mode ({:?}) disagrees with sampler.mode ({:?})",
            params.phase_mode, sampler.mode
        )));
    }
    Ok(())
}

fn run_one(
    run_index: u64,
    x0: &[f64],
    params: &ModelParams,
    cfg: &IntegratorConfig,
    sampler: &PhaseSampler,
) -> Result<RunOutcome> {
    let attach = |source: Error| Error::Run {
        run_index,
        source: Box::new(source),
    };
    let (theta, rejected) = sampler
        .sample_phases(x0.len(), run_index)
        .map_err(attach)?;
    let initial = StateVector::new(x0.to_vec(), theta).map_err(attach)?;
    let summary = integrate_outcome(Law::Reduction, &initial, params, cfg).map_err(attach)?;
    Ok(RunOutcome {
        run_index,
        outcome: summary.outcome,
        collapse_time: summary.collapse_time,
        rejected,
    })
}

/// Runs `n_runs` independent reduction trajectories with fixed `x0` and
/// sampled phases, in parallel when the `parallel` feature is enabled.
/// The result vector is ordered by run index either way.
pub fn run_outcomes(
    n_runs: u64,
    x0: &[f64],
    params: &ModelParams,
    cfg: &IntegratorConfig,
    sampler: &PhaseSampler,
) -> Result<Vec<RunOutcome>> {
    validate_ensemble_inputs(n_runs, x0, params, sampler)?;
    #[cfg(feature = "parallel")]
    {
        (0..n_runs)
            .into_par_iter()
            .map(|i| run_one(i, x0, params, cfg, sampler))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_runs).map(|i| run_one(i, x0, params, cfg, sampler)).collect()
    }
}

/// Single-threaded twin of [`run_outcomes`]; useful as a baseline and for
/// checking that parallel execution changes nothing.
pub fn run_outcomes_sequential(
    n_runs: u64,
    x0: &[f64],
    params: &ModelParams,
    cfg: &IntegratorConfig,
    sampler: &PhaseSampler,
) -> Result<Vec<RunOutcome>> {
    validate_ensemble_inputs(n_runs, x0, params, sampler)?;
    (0..n_runs).map(|i| run_one(i, x0, params, cfg, sampler)).collect()
}

/// Every class label an N-state run can produce, in report order.
pub fn class_labels(n_states: usize) -> Vec<String> {
    let mut labels: Vec<String> = (0..n_states)
        .map(|k| OutcomeClass::CollapseTo(k).label())
        .collect();
    labels.push(OutcomeClass::AllDecay.label());
    labels.push(OutcomeClass::AllGrow.label());
    labels.push(OutcomeClass::Unresolved.label());
    labels
}

fn build_report(
    outcomes: &[RunOutcome],
    x0: &[f64],
    params: &ModelParams,
    cfg: &IntegratorConfig,
    sampler: &PhaseSampler,
    wall_time: f64,
) -> Result<EnsembleReport> {
    let n_states = x0.len();
    let n_runs = outcomes.len() as u64;

    let mut counts: BTreeMap<String, u64> =
        class_labels(n_states).into_iter().map(|l| (l, 0)).collect();
    let mut rejected_samples = 0u64;
    for out in outcomes {
        *counts
            .entry(out.outcome.label())
            .or_insert(0) += 1;
        rejected_samples += u64::from(out.rejected);
    }

    let nf = n_runs as f64;
    let z99 = Normal::standard().inverse_cdf(0.995);
    let mut frequencies = BTreeMap::new();
    let mut ci99 = BTreeMap::new();
    for (label, &count) in &counts {
        let p = count as f64 / nf;
        let half = z99 * (p * (1.0 - p) / nf).sqrt();
        frequencies.insert(label.clone(), p);
        ci99.insert(label.clone(), [(p - half).max(0.0), (p + half).min(1.0)]);
    }

    let mut oracle: BTreeMap<String, f64> =
        class_labels(n_states).into_iter().map(|l| (l, 0.0)).collect();
    for (class, prob) in sign_config_oracle(n_states, sampler.mode)? {
        oracle.insert(class.label(), prob);
    }

    Ok(EnsembleReport {
        n_runs,
        counts,
        frequencies,
        ci99,
        oracle,
        seed: sampler.seed,
        x0: x0.to_vec(),
        params: params.clone(),
        cfg: cfg.clone(),
        rejected_samples,
        wall_time,
    })
}

/// Full ensemble pipeline: sample, integrate, aggregate, attach oracle
/// expectations. Counts are byte-identical for identical
/// `(seed, params, cfg, n_runs)` regardless of thread count.
pub fn run_ensemble(
    n_runs: u64,
    x0: &[f64],
    params: &ModelParams,
    cfg: &IntegratorConfig,
    sampler: &PhaseSampler,
) -> Result<EnsembleReport> {
    let started = Instant::now();
    let outcomes = run_outcomes(n_runs, x0, params, cfg, sampler)?;
    build_report(
        &outcomes,
        x0,
        params,
        cfg,
        sampler,
        started.elapsed().as_secs_f64(),
    )
}

/// Single-threaded twin of [`run_ensemble`].
pub fn run_ensemble_sequential(
    n_runs: u64,
    x0: &[f64],
    params: &ModelParams,
    cfg: &IntegratorConfig,
    sampler: &PhaseSampler,
) -> Result<EnsembleReport> {
    let started = Instant::now();
    let outcomes = run_outcomes_sequential(n_runs, x0, params, cfg, sampler)?;
    build_report(
        &outcomes,
        x0,
        params,
        cfg,
        sampler,
        started.elapsed().as_secs_f64(),
    )
}

fn chi_square_p(statistic: f64, dof: usize) -> f64 {
    if !statistic.is_finite() {
        return 0.0;
    }
    if statistic <= 0.0 {
        return 1.0;
    }
    gamma_ur(dof as f64 / 2.0, statistic / 2.0)
}

/// Pearson goodness-of-fit of observed class counts against the oracle
/// expectations, with `classes − 1` degrees of freedom (classes of nonzero
/// oracle probability). Every such class must expect at least 5 counts.
/// Observations in a zero-probability class push the statistic to infinity.
pub fn chi_square_test(report: &EnsembleReport) -> Result<ChiSquare> {
    let nf = report.n_runs as f64;
    let mut statistic = 0.0;
    let mut classes = 0usize;
    for (label, &prob) in &report.oracle {
        let observed = *report.counts.get(label).unwrap_or(&0) as f64;
        if prob > 0.0 {
            let expected = prob * nf;
            if expected < 5.0 {
                return Err(Error::LowExpectedCount {
                    class: label.clone(),
                    expected,
                });
            }
            classes += 1;
            let diff = observed - expected;
            statistic += diff * diff / expected;
        } else if observed > 0.0 {
            statistic = f64::INFINITY;
        }
    }
    let dof = classes.saturating_sub(1);
    Ok(ChiSquare {
        statistic,
        p_value: chi_square_p(statistic, dof),
        dof,
    })
}

/// Two-sample homogeneity test: are two observed class distributions drawn
/// from the same underlying probabilities? Standard 2×C contingency
/// statistic with C − 1 degrees of freedom.
pub fn chi_square_homogeneity(
    counts_a: &BTreeMap<String, u64>,
    counts_b: &BTreeMap<String, u64>,
) -> Result<ChiSquare> {
    let total_a: u64 = counts_a.values().sum();
    let total_b: u64 = counts_b.values().sum();
    if total_a == 0 || total_b == 0 {
        return Err(Error::InvalidConfig(
            "homogeneity test needs nonempty samples".into(),
        ));
    }
    let mut labels: Vec<&String> = counts_a.keys().chain(counts_b.keys()).collect();
    labels.sort();
    labels.dedup();

    let grand = (total_a + total_b) as f64;
    let mut statistic = 0.0;
    let mut classes = 0usize;
    for label in labels {
        let a = *counts_a.get(label).unwrap_or(&0) as f64;
        let b = *counts_b.get(label).unwrap_or(&0) as f64;
        let pooled = (a + b) / grand;
        if pooled == 0.0 {
            continue;
        }
        classes += 1;
        for (obs, total) in [(a, total_a as f64), (b, total_b as f64)] {
            let expected = pooled * total;
            let diff = obs - expected;
            statistic += diff * diff / expected;
        }
    }
    let dof = classes.saturating_sub(1);
    Ok(ChiSquare {
        statistic,
        p_value: chi_square_p(statistic, dof),
        dof,
    })
}
