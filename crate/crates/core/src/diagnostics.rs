//! Cross-checks that turn the model's analytic claims into pass/fail
//! numbers: closed-form vs ODE agreement, the rate-convention gap, norm
//! drift under both laws, the frozen-phase baseline and the integrator's
//! convergence order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::integrator::{
    integrate, reduction_detection_time, IntegratorConfig, Law, OutcomeClass, Trajectory,
};
use crate::model::{
    closed_form_x, coupling_vector, AlphaVector, ModelParams, RateConvention, StateVector,
};

/// A tiny standalone RK4 used as the independent integration route when
/// checking the closed form; deliberately separate from the main stepper.
fn rk4_scalar(rate: f64, x: f64, dt: f64) -> f64 {
    let f = |x: f64| rate * x * (1.0 - x * x);
    let k1 = f(x);
    let k2 = f(x + 0.5 * dt * k1);
    let k3 = f(x + 0.5 * dt * k2);
    let k4 = f(x + dt * k3);
    x + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
}

/// Integrates the single-component reduction ODE whose rate matches the
/// given convention (full rate `g·fα` for `OdeConsistent`, half rate for
/// `AsPrinted`) over t ∈ [0, 10/g] and returns the maximum absolute
/// deviation from the closed form under that same convention.
pub fn verify_closed_form(
    x0: f64,
    g: f64,
    f_alpha: f64,
    convention: RateConvention,
    dt: f64,
) -> Result<f64> {
    let ode_rate = match convention {
        RateConvention::OdeConsistent => g * f_alpha,
        RateConvention::AsPrinted => 0.5 * g * f_alpha,
    };
    max_deviation_from_closed_form(x0, g, f_alpha, convention, ode_rate, dt)
}

/// Maximum deviation of the as-printed closed form from the full-rate ODE
/// over t ∈ [0, 10/g]. This gap exceeds 0.05 for mid-range starts: the
/// printed exponent is half the rate the equation of motion dictates.
pub fn rate_convention_gap(x0: f64, g: f64, dt: f64) -> Result<f64> {
    max_deviation_from_closed_form(x0, g, 1.0, RateConvention::AsPrinted, g, dt)
}

fn max_deviation_from_closed_form(
    x0: f64,
    g: f64,
    f_alpha: f64,
    convention: RateConvention,
    ode_rate: f64,
    dt: f64,
) -> Result<f64> {
    let horizon = 10.0 / g;
    let steps = (horizon / dt).round().max(1.0) as u64;
    let mut x = x0;
    let mut worst: f64 = 0.0;
    for step in 0..=steps {
        let t = step as f64 * dt;
        let reference = closed_form_x(t, x0, f_alpha, 1, g, convention)?;
        worst = worst.max((x - reference).abs());
        x = rk4_scalar(ode_rate, x, dt);
    }
    Ok(worst)
}

/// Integrates the full law with the phases held at their initial values:
/// the comparison baseline in which only fixed phase differences drive the
/// probabilities. Phases are bitwise constant across the whole trajectory.
pub fn frozen_phase_baseline(
    initial: &StateVector,
    params: &ModelParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut frozen = params.clone();
    frozen.frozen_phase = true;
    integrate(Law::Full, initial, &frozen, cfg)
}

/// Largest excursion of the total probability from its initial value.
pub fn norm_drift_scan(trajectory: &Trajectory) -> f64 {
    let reference = trajectory.norm_series[0];
    trajectory
        .norm_series
        .iter()
        .map(|&v| (v - reference).abs())
        .fold(0.0, f64::max)
}

/// Least-squares slope of log(global error) against log(dt) for the
/// two-state reduction law, measured against the closed form at t = 2.
/// Fourth-order stepping gives a slope of 4.
pub fn convergence_order(dts: &[f64]) -> Result<f64> {
    let initial = StateVector::new(vec![0.5, 0.5], vec![0.0, std::f64::consts::PI])?;
    let params = ModelParams::with_states(2);
    let t_end = 2.0;

    let mut log_dt = Vec::with_capacity(dts.len());
    let mut log_err = Vec::with_capacity(dts.len());
    for &dt in dts {
        let cfg = IntegratorConfig {
            dt,
            t_max: t_end,
            epsilon: 1e-3,
            sample_stride: u32::MAX,
        };
        let traj = integrate(Law::Reduction, &initial, &params, &cfg)?;
        let last = traj.final_state();
        let grow = closed_form_x(t_end, 0.5, 1.0, 1, params.g, RateConvention::OdeConsistent)?;
        let decay = closed_form_x(t_end, 0.5, 1.0, -1, params.g, RateConvention::OdeConsistent)?;
        let err = (last.x[0] - grow).abs().max((last.x[1] - decay).abs());
        log_dt.push(dt.ln());
        log_err.push(err.ln());
    }

    let n = log_dt.len() as f64;
    let mean_x: f64 = log_dt.iter().sum::<f64>() / n;
    let mean_y: f64 = log_err.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (lx, ly) in log_dt.iter().zip(&log_err) {
        num += (lx - mean_x) * (ly - mean_y);
        den += (lx - mean_x) * (lx - mean_x);
    }
    Ok(num / den)
}

/// One named verification check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// true: value must stay at or below the threshold; false: it must
    /// exceed it.
    pub upper_bound: bool,
    pub passed: bool,
    pub note: Option<String>,
}

impl CheckResult {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            upper_bound: true,
            passed: value <= threshold,
            note: None,
        }
    }

    fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            upper_bound: false,
            passed: value > threshold,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn random_symmetric_params(n: usize, rng: &mut ChaCha8Rng) -> ModelParams {
    let mut params = ModelParams::with_states(n);
    for i in 0..n {
        params.omega[i] = rng.random_range(-1.0..1.0);
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            params.h_matrix[i][j] = v;
            params.h_matrix[j][i] = v;
        }
    }
    params
}

fn random_interior_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let theta = (0..n)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    StateVector::new(vec![1.0 / n as f64; n], theta).expect("valid state")
}

/// Runs the whole diagnostic suite with pinned tolerances. The as-printed
/// gap check passes when the mismatch IS present; it documents the factor
/// two between the printed exponent and the law of motion.
pub fn run_verification_suite() -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let x0_grid = [0.1, 0.3, 0.5, 0.7, 0.9];
    let g_grid = [0.5, 1.0, 2.0];
    let dt = 1e-4;

    // Closed form against the matching-rate ODE, both conventions.
    for (convention, name) in [
        (
            RateConvention::OdeConsistent,
            "closed form vs matching ODE (ode-consistent)",
        ),
        (
            RateConvention::AsPrinted,
            "closed form vs matching ODE (as-printed, half rate)",
        ),
    ] {
        let mut worst: f64 = 0.0;
        for &x0 in &x0_grid {
            for &g in &g_grid {
                for f_alpha in [1.0, -1.0] {
                    worst = worst.max(verify_closed_form(x0, g, f_alpha, convention, dt)?);
                }
            }
        }
        checks.push(CheckResult::at_most(name, worst, 1e-8));
    }

    // The printed exponent against the full-rate ODE: must disagree.
    let gap = rate_convention_gap(0.5, 1.0, dt)?;
    checks.push(
        CheckResult::above("as-printed closed form vs full-rate ODE", gap, 0.05).with_note(
            "expected mismatch (documented): printed exponent is half the equation-of-motion rate",
        ),
    );

    // Norm conservation under the full law with symmetric interactions.
    // The seed is pinned to instances whose trajectories stay clear of the
    // collapse thresholds for the whole horizon.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst_drift: f64 = 0.0;
    for n in [2usize, 4] {
        let params = random_symmetric_params(n, &mut rng);
        params.require_symmetric()?;
        let initial = random_interior_state(n, &mut rng);
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_max: 20.0,
            epsilon: 1e-3,
            sample_stride: 1,
        };
        let traj = integrate(Law::Full, &initial, &params, &cfg)?;
        if traj.final_time() < cfg.t_max - cfg.dt {
            worst_drift = f64::INFINITY;
        }
        worst_drift = worst_drift.max(norm_drift_scan(&traj));
    }
    checks.push(CheckResult::at_most(
        "norm conservation (full law, symmetric H, N = 2 and 4)",
        worst_drift,
        1e-6,
    ));

    // Free evolution: phases linear in t, probabilities frozen.
    {
        let mut params = ModelParams::with_states(2);
        params.omega = vec![1.0, 2.0];
        let initial = StateVector::new(vec![0.5, 0.5], vec![0.4, -0.7])?;
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_max: 20.0,
            epsilon: 1e-3,
            sample_stride: 100,
        };
        let traj = integrate(Law::Full, &initial, &params, &cfg)?;
        let mut worst: f64 = 0.0;
        for (t, state) in traj.times.iter().zip(&traj.states) {
            for n in 0..2 {
                let expected = initial.theta[n] - params.omega[n] * t;
                worst = worst.max((state.theta[n] - expected).abs());
                worst = worst.max((state.x[n] - initial.x[n]).abs());
            }
        }
        checks.push(CheckResult::at_most(
            "free evolution (H = 0): phase linearity, constant probabilities",
            worst,
            1e-8,
        ));
    }

    // Frozen-phase baseline: phases pinned bitwise.
    {
        let mut params = ModelParams::with_states(2);
        params.omega = vec![1.0, 2.0];
        params.h_matrix = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let initial = StateVector::new(vec![0.5, 0.5], vec![0.0, std::f64::consts::FRAC_PI_2])?;
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_max: 1.0,
            epsilon: 1e-3,
            sample_stride: 10,
        };
        let traj = frozen_phase_baseline(&initial, &params, &cfg)?;
        let pinned = traj.states.iter().all(|s| s.theta == initial.theta);
        let drift = norm_drift_scan(&traj);
        let value = if pinned { drift } else { f64::INFINITY };
        checks.push(
            CheckResult::at_most("frozen-phase baseline: phases pinned, norm conserved", value, 1e-6),
        );
    }

    // The reduction law breaks conservation mid-transient but lands back
    // within epsilon of norm 1 at detection.
    {
        let params = ModelParams::with_states(2);
        let cfg = IntegratorConfig::default();
        let initial = StateVector::new(vec![0.5, 0.5], vec![0.0, std::f64::consts::PI])?;
        let traj = integrate(Law::Reduction, &initial, &params, &cfg)?;
        let transient = norm_drift_scan(&traj);
        let final_ok = (traj.final_state().norm() - 1.0).abs() <= cfg.epsilon;
        let value = if final_ok { transient } else { 0.0 };
        checks.push(
            CheckResult::above("reduction law transient norm drift", value, 0.01).with_note(
                "expected drift (documented): the reduction law conserves nothing mid-transient",
            ),
        );
    }

    // Integrator order.
    {
        let slope = convergence_order(&[0.1, 0.05, 0.025, 0.0125])?;
        checks.push(
            CheckResult::at_most("rk4 convergence order (|slope - 4|)", (slope - 4.0).abs(), 0.3)
                .with_note(format!("measured slope {slope:.3}")),
        );
    }

    // Exhaustive two-state sign table.
    {
        let table: [([i8; 2], [f64; 2]); 4] = [
            ([1, -1], [1.0, -1.0]),
            ([-1, 1], [-1.0, 1.0]),
            ([1, 1], [-1.0, -1.0]),
            ([-1, -1], [1.0, 1.0]),
        ];
        let mut mismatches = 0u32;
        for (signs, expected) in table {
            let alpha = AlphaVector::from_signs(signs.to_vec())?;
            let f = coupling_vector(&alpha);
            for n in 0..2 {
                if f.value(n) * alpha.as_f64(n) != expected[n] {
                    mismatches += 1;
                }
            }
        }
        checks.push(CheckResult::at_most(
            "two-state coupling sign table (mismatches)",
            f64::from(mismatches),
            0.0,
        ));
    }

    // Detected collapse time against the analytic prediction.
    {
        let params = ModelParams::with_states(2);
        let cfg = IntegratorConfig::default();
        let initial = StateVector::new(vec![0.5, 0.5], vec![0.0, std::f64::consts::PI])?;
        let traj = integrate(Law::Reduction, &initial, &params, &cfg)?;
        let predicted = reduction_detection_time(&initial, params.g, cfg.epsilon)?;
        let value = match (traj.outcome, traj.collapse_time) {
            (OutcomeClass::CollapseTo(0), Some(t)) => (t - predicted).abs(),
            _ => f64::INFINITY,
        };
        checks.push(CheckResult::at_most(
            "collapse time vs analytic prediction",
            value,
            2.0 * cfg.dt,
        ));
    }

    Ok(checks)
}
