//! Fixed-step RK4 time-stepping for both laws of motion, with per-step
//! outcome detection and analytic reduction-time formulas.
//!
//! One trajectory is integrated single-threaded and deterministically;
//! distinct trajectories share no mutable state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    alpha_vector, coupling_vector, cubic_logistic, full_rhs_amplitude_into, reduction_rates,
    Derivatives, ModelParams, StateVector,
};

/// Probabilities may overshoot [0, 1] by at most this much before the step
/// is declared unstable; smaller excursions are clamped to the boundary.
pub const OVERSHOOT_TOLERANCE: f64 = 1e-12;

/// Which law of motion to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    /// Sign-coupled probability dynamics with phases held at their onset
    /// values (α and f are computed once at t = 0 and never updated).
    Reduction,
    /// Coupled phase/probability dynamics driven by the interaction matrix.
    Full,
}

/// Fixed-step integration settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Collapse threshold: a component counts as drained below ε and as
    /// saturated above 1 − ε.
    pub epsilon: f64,
    /// Record every k-th step (detection still checks every step).
    pub sample_stride: u32,
}

impl IntegratorConfig {
    /// Defaults scaled to the interaction strength: dt = 1e-3/g,
    /// t_max = 50/g, ε = 1e-3, stride 10. Resolves a reduction transient
    /// of order ln(1/ε)/g with thousands of steps.
    pub fn for_rate(g: f64) -> Self {
        Self {
            dt: 1e-3 / g,
            t_max: 50.0 / g,
            epsilon: 1e-3,
            sample_stride: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_max > self.dt && self.t_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_max = {} must exceed dt = {}",
                self.t_max, self.dt
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "epsilon = {} must lie in (0, 0.5)",
                self.epsilon
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidConfig("sample_stride must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::for_rate(1.0)
    }
}

/// How a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeClass {
    /// Exactly one component saturated while all others drained.
    CollapseTo(usize),
    /// Every component drained below ε (degenerate equal-sign branch).
    AllDecay,
    /// Every component saturated above 1 − ε (degenerate equal-sign branch).
    AllGrow,
    /// No threshold pattern reached within the horizon.
    Unresolved,
}

impl OutcomeClass {
    /// Stable string key used in reports and CSV/JSON output.
    pub fn label(&self) -> String {
        match self {
            OutcomeClass::CollapseTo(k) => format!("collapse_to_{k}"),
            OutcomeClass::AllDecay => "all_decay".to_string(),
            OutcomeClass::AllGrow => "all_grow".to_string(),
            OutcomeClass::Unresolved => "unresolved".to_string(),
        }
    }
}

impl std::fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// Recorded time series of one integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// x[0] − x[1] per sample; present only for two-state systems.
    pub q_series: Option<Vec<f64>>,
    /// Σ x[n] per sample.
    pub norm_series: Vec<f64>,
    pub outcome: OutcomeClass,
    /// Set iff the outcome is `CollapseTo`.
    pub collapse_time: Option<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has at least one sample")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one sample")
    }
}

/// Outcome of a history-free integration (the ensemble hot path).
#[derive(Debug, Clone)]
pub struct OutcomeSummary {
    pub outcome: OutcomeClass,
    pub collapse_time: Option<f64>,
    pub final_state: StateVector,
    pub end_time: f64,
}

struct Rk4Buffers {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
}

impl Rk4Buffers {
    fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            stage: vec![0.0; dim],
        }
    }
}

#[inline]
fn rk4_kernel<F>(rhs: &mut F, y: &[f64], dt: f64, b: &mut Rk4Buffers, out: &mut [f64])
where
    F: FnMut(&[f64], &mut [f64]),
{
    let half = 0.5 * dt;
    rhs(y, &mut b.k1);
    for ((s, &yv), &k) in b.stage.iter_mut().zip(y).zip(&b.k1) {
        *s = yv + half * k;
    }
    rhs(&b.stage, &mut b.k2);
    for ((s, &yv), &k) in b.stage.iter_mut().zip(y).zip(&b.k2) {
        *s = yv + half * k;
    }
    rhs(&b.stage, &mut b.k3);
    for ((s, &yv), &k) in b.stage.iter_mut().zip(y).zip(&b.k3) {
        *s = yv + dt * k;
    }
    rhs(&b.stage, &mut b.k4);
    let sixth = dt / 6.0;
    for i in 0..out.len() {
        out[i] = y[i] + sixth * (b.k1[i] + 2.0 * (b.k2[i] + b.k3[i]) + b.k4[i]);
    }
}

/// Clamps probabilities that overshoot [0, 1] by at most
/// [`OVERSHOOT_TOLERANCE`]; anything worse (including NaN) is an error.
fn settle_probabilities(xs: &mut [f64]) -> Result<()> {
    for (i, v) in xs.iter_mut().enumerate() {
        if *v >= 0.0 && *v <= 1.0 {
            continue;
        }
        if *v < 0.0 && *v >= -OVERSHOOT_TOLERANCE {
            *v = 0.0;
        } else if *v > 1.0 && *v <= 1.0 + OVERSHOOT_TOLERANCE {
            *v = 1.0;
        } else {
            return Err(Error::StepOverflow { index: i, value: *v });
        }
    }
    Ok(())
}

/// One classical fourth-order step of an arbitrary derivative function.
///
/// Probability components are clamped to [0, 1] when they overshoot by at
/// most 1e-12; larger excursions abort with `StepOverflow`.
pub fn step_rk4<F>(mut rhs: F, state: &StateVector, dt: f64) -> Result<StateVector>
where
    F: FnMut(&StateVector) -> Derivatives,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("dt = {dt} must be positive")));
    }
    let n = state.len();
    let mut y = Vec::with_capacity(2 * n);
    y.extend_from_slice(&state.theta);
    y.extend_from_slice(&state.x);

    let mut slice_rhs = |s: &[f64], out: &mut [f64]| {
        let probe = StateVector {
            theta: s[..n].to_vec(),
            x: s[n..].to_vec(),
        };
        let d = rhs(&probe);
        out[..n].copy_from_slice(&d.theta_dot);
        out[n..].copy_from_slice(&d.x_dot);
    };

    let mut buf = Rk4Buffers::new(2 * n);
    let mut out = vec![0.0; 2 * n];
    rk4_kernel(&mut slice_rhs, &y, dt, &mut buf, &mut out);
    settle_probabilities(&mut out[n..])?;
    Ok(StateVector {
        theta: out[..n].to_vec(),
        x: out[n..].to_vec(),
    })
}

fn classify_slice(x: &[f64], epsilon: f64) -> OutcomeClass {
    let hi = 1.0 - epsilon;
    let mut n_hi = 0usize;
    let mut n_lo = 0usize;
    let mut hi_index = 0usize;
    for (i, &v) in x.iter().enumerate() {
        if v >= hi {
            n_hi += 1;
            hi_index = i;
        } else if v <= epsilon {
            n_lo += 1;
        } else {
            return OutcomeClass::Unresolved;
        }
    }
    let n = x.len();
    if n_hi == 1 && n_lo == n - 1 {
        OutcomeClass::CollapseTo(hi_index)
    } else if n_lo == n {
        OutcomeClass::AllDecay
    } else if n_hi == n {
        OutcomeClass::AllGrow
    } else {
        OutcomeClass::Unresolved
    }
}

/// Classifies a state against the collapse threshold ε.
///
/// # Panics
/// If ε is outside (0, 0.5).
pub fn classify_outcome(state: &StateVector, epsilon: f64) -> OutcomeClass {
    assert!(
        epsilon > 0.0 && epsilon < 0.5,
        "epsilon = {epsilon} must lie in (0, 0.5)"
    );
    classify_slice(&state.x, epsilon)
}

/// Time for the squared probability u = x² of one decoupled component to
/// first reach 1 − ε (growing, λ > 0) or ε (decaying, λ < 0), where λ is
/// the exponential rate of the logistic in u (i.e. 2·g·f·α under the
/// equation-of-motion convention):
///
/// ```text
/// t = (1/|λ|)·ln[((1 − u0)/u0)·((1 − ε)/ε)]     (growing)
/// t = (1/|λ|)·ln[(u0/(1 − u0))·((1 − ε)/ε)]     (decaying)
/// ```
pub fn reduction_time_analytic(x0: f64, lambda: f64, epsilon: f64) -> Result<f64> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::DegenerateInitial(x0));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidConfig(format!(
            "epsilon = {epsilon} must lie in (0, 0.5)"
        )));
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "lambda = {lambda} must be nonzero and finite"
        )));
    }
    let u0 = x0 * x0;
    let odds = (1.0 - epsilon) / epsilon;
    let t = if lambda > 0.0 {
        if u0 > 1.0 - epsilon {
            return Err(Error::DegenerateInitial(x0));
        }
        ((1.0 - u0) / u0 * odds).ln() / lambda
    } else {
        if u0 < epsilon {
            return Err(Error::DegenerateInitial(x0));
        }
        (u0 / (1.0 - u0) * odds).ln() / lambda.abs()
    };
    // Exactly at threshold the log argument is 1 up to roundoff.
    Ok(t.max(0.0))
}

/// Predicted detection time of a reduction run: the slowest component's
/// analytic crossing of its x-threshold (x ≥ 1 − ε for growers, x ≤ ε for
/// decayers), which is when per-step classification first fires.
pub fn reduction_detection_time(initial: &StateVector, g: f64, epsilon: f64) -> Result<f64> {
    let alpha = alpha_vector(initial)?;
    let f = coupling_vector(&alpha);
    let rates = reduction_rates(&alpha, &f, g);
    let mut worst: f64 = 0.0;
    for (&x0, &rate) in initial.x.iter().zip(&rates) {
        // x-thresholds expressed in u = x² space.
        let eps_u = if rate > 0.0 {
            1.0 - (1.0 - epsilon) * (1.0 - epsilon)
        } else {
            epsilon * epsilon
        };
        let t = reduction_time_analytic(x0, 2.0 * rate, eps_u)?;
        worst = worst.max(t);
    }
    Ok(worst)
}

/// Integrates a trajectory, recording samples every `sample_stride` steps
/// (plus the initial and final states). Detection runs every step; the run
/// stops as soon as the state classifies as anything but `Unresolved`, or
/// at `t_max`.
pub fn integrate(
    law: Law,
    initial: &StateVector,
    params: &ModelParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let (traj, _) = drive(law, initial, params, cfg, true)?;
    Ok(traj.expect("recording was requested"))
}

/// History-free variant of [`integrate`]: same stepping and detection, but
/// only the outcome, collapse time and final state are kept.
pub fn integrate_outcome(
    law: Law,
    initial: &StateVector,
    params: &ModelParams,
    cfg: &IntegratorConfig,
) -> Result<OutcomeSummary> {
    let (_, summary) = drive(law, initial, params, cfg, false)?;
    Ok(summary)
}

fn drive(
    law: Law,
    initial: &StateVector,
    params: &ModelParams,
    cfg: &IntegratorConfig,
    record: bool,
) -> Result<(Option<Trajectory>, OutcomeSummary)> {
    cfg.validate()?;
    params.validate(initial.len())?;
    match law {
        Law::Reduction => {
            // α and f freeze at onset; only the probabilities evolve.
            let alpha = alpha_vector(initial)?;
            let f = coupling_vector(&alpha);
            let rates = reduction_rates(&alpha, &f, params.g);
            let rhs = move |y: &[f64], dy: &mut [f64]| {
                for ((d, &xv), &r) in dy.iter_mut().zip(y).zip(&rates) {
                    *d = cubic_logistic(r, xv);
                }
            };
            drive_inner(rhs, initial, false, false, cfg, record)
        }
        Law::Full => {
            // The full law steps signed amplitudes a = √x internally: the
            // equations are polynomial in a, so a component crossing zero
            // is regular instead of a square-root boundary singularity.
            let n = initial.len();
            let rhs = move |y: &[f64], dy: &mut [f64]| {
                let (theta, amp) = y.split_at(n);
                let (theta_dot, amp_dot) = dy.split_at_mut(n);
                full_rhs_amplitude_into(theta, amp, params, theta_dot, amp_dot);
            };
            drive_inner(rhs, initial, true, params.frozen_phase, cfg, record)
        }
    }
}

/// Probability view of the integration state: the state vector itself for
/// the reduction law, or squared amplitudes for the full law (clamped to 1
/// within [`OVERSHOOT_TOLERANCE`]; larger excess is a broken step).
fn probability_view<'a>(
    y: &'a [f64],
    x_off: usize,
    scratch: &'a mut [f64],
) -> Result<&'a [f64]> {
    if x_off == 0 {
        return Ok(y);
    }
    for (xv, &a) in scratch.iter_mut().zip(&y[x_off..]) {
        *xv = a * a;
    }
    for (i, v) in scratch.iter_mut().enumerate() {
        if *v > 1.0 {
            if *v <= 1.0 + OVERSHOOT_TOLERANCE {
                *v = 1.0;
            } else {
                return Err(Error::StepOverflow { index: i, value: *v });
            }
        } else if !(*v >= 0.0) {
            return Err(Error::StepOverflow { index: i, value: *v });
        }
    }
    Ok(scratch)
}

fn drive_inner<F>(
    mut rhs: F,
    initial: &StateVector,
    amplitude_layout: bool,
    restore_theta: bool,
    cfg: &IntegratorConfig,
    record: bool,
) -> Result<(Option<Trajectory>, OutcomeSummary)>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = initial.len();
    let x_off = if amplitude_layout { n } else { 0 };
    let dim = x_off + n;

    let mut y = Vec::with_capacity(dim);
    if amplitude_layout {
        y.extend_from_slice(&initial.theta);
        y.extend(initial.x.iter().map(|&x| x.sqrt()));
    } else {
        y.extend_from_slice(&initial.x);
    }

    let mut buf = Rk4Buffers::new(dim);
    let mut next = vec![0.0; dim];
    let mut x_scratch = vec![0.0; n];

    let n_steps = ((cfg.t_max / cfg.dt) - 1e-9).ceil().max(1.0) as u64;
    let stride = u64::from(cfg.sample_stride);

    let mut times = Vec::new();
    let mut states: Vec<StateVector> = Vec::new();
    let push_sample = |t: f64,
                       y: &[f64],
                       x: &[f64],
                       times: &mut Vec<f64>,
                       states: &mut Vec<StateVector>| {
        let theta = if amplitude_layout {
            y[..n].to_vec()
        } else {
            initial.theta.clone()
        };
        times.push(t);
        states.push(StateVector {
            theta,
            x: x.to_vec(),
        });
    };

    if record {
        push_sample(0.0, &y, &initial.x, &mut times, &mut states);
    }

    let mut outcome = classify_slice(&initial.x, cfg.epsilon);
    let mut end_time = 0.0;
    if outcome == OutcomeClass::Unresolved {
        for step in 1..=n_steps {
            rk4_kernel(&mut rhs, &y, cfg.dt, &mut buf, &mut next);
            if !amplitude_layout {
                settle_probabilities(&mut next)?;
            }
            // Frozen phases are carried over verbatim so they stay bitwise
            // identical across the whole run.
            if restore_theta {
                next[..x_off].copy_from_slice(&y[..x_off]);
            }
            std::mem::swap(&mut y, &mut next);
            let t = step as f64 * cfg.dt;
            end_time = t;

            let x = probability_view(&y, x_off, &mut x_scratch)?;
            let class = classify_slice(x, cfg.epsilon);
            let stop = class != OutcomeClass::Unresolved;
            if record && (stop || step == n_steps || step % stride == 0) {
                push_sample(t, &y, x, &mut times, &mut states);
            }
            if stop {
                outcome = class;
                break;
            }
        }
    }

    let final_x = if end_time == 0.0 {
        initial.x.clone()
    } else {
        probability_view(&y, x_off, &mut x_scratch)?.to_vec()
    };
    let final_state = StateVector {
        theta: if amplitude_layout {
            y[..n].to_vec()
        } else {
            initial.theta.clone()
        },
        x: final_x,
    };
    let collapse_time = match outcome {
        OutcomeClass::CollapseTo(_) => Some(end_time),
        _ => None,
    };

    let trajectory = record.then(|| {
        let q_series = (n == 2).then(|| states.iter().map(|s| s.x[0] - s.x[1]).collect());
        let norm_series = states.iter().map(StateVector::norm).collect();
        Trajectory {
            times,
            states,
            q_series,
            norm_series,
            outcome,
            collapse_time,
        }
    });

    let summary = OutcomeSummary {
        outcome,
        collapse_time,
        final_state,
        end_time,
    };
    Ok((trajectory, summary))
}
