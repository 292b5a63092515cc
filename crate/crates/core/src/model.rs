//! The model equations: polar state representation, the coupled
//! phase/probability dynamics, the sign-coupled reduction law and its
//! closed-form solution.
//!
//! All functions here are pure; nothing mutates shared state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phases with |cos θ| at or below this are rejected: the onset sign α is
/// undefined on that (measure-zero) set.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// A quantum state in polar form: probabilities `x[n] ∈ [0, 1]` and phases
/// `theta[n]` (radians), one pair per basis state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
}

impl StateVector {
    /// Builds a state, checking the representation invariants: matching
    /// lengths, at least two states, probabilities in [0, 1], finite phases.
    pub fn new(x: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if x.len() != theta.len() {
            return Err(Error::InvalidConfig(format!(
                "x has {} components but theta has {}",
                x.len(),
                theta.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "state needs at least 2 components, got {}",
                x.len()
            )));
        }
        for (n, &xn) in x.iter().enumerate() {
            if !(0.0..=1.0).contains(&xn) {
                return Err(Error::InvalidConfig(format!(
                    "x[{n}] = {xn} outside [0, 1]"
                )));
            }
        }
        for (n, &tn) in theta.iter().enumerate() {
            if !tn.is_finite() {
                return Err(Error::InvalidConfig(format!("theta[{n}] = {tn} not finite")));
            }
        }
        Ok(Self { x, theta })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Sum of probabilities; drifts from 1 exactly when the dynamics are
    /// norm-violating.
    pub fn norm(&self) -> f64 {
        self.x.iter().sum()
    }
}

/// Which exponential rate the closed-form solution uses.
///
/// Differentiating the closed form shows it solves `ẋ = (λ/2)·x(1−x²)`, so
/// the printed exponent `λ = g·f·α` is off by a factor two from the stated
/// law of motion `ẋ = g·f·α·x(1−x²)`. Both conventions are available;
/// `OdeConsistent` (λ = 2·g·f·α) matches the law of motion and is the
/// default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateConvention {
    AsPrinted,
    #[default]
    OdeConsistent,
}

/// Whether the chaotic phase acts on every component independently or as one
/// common phase replicated across all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    #[default]
    Independent,
    Common,
}

/// Model parameters shared by both laws of motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Eigenfrequencies ω[n], radians per unit time.
    pub omega: Vec<f64>,
    /// Real interaction matrix elements, row-major N×N.
    pub h_matrix: Vec<Vec<f64>>,
    /// Interaction strength scaling the reduction term; the reduction time
    /// scales as 1/g.
    pub g: f64,
    pub rate_convention: RateConvention,
    pub phase_mode: PhaseMode,
    /// Hold phases fixed while probabilities evolve under the full law.
    pub frozen_phase: bool,
}

impl ModelParams {
    pub fn new(omega: Vec<f64>, h_matrix: Vec<Vec<f64>>, g: f64) -> Result<Self> {
        let params = Self {
            omega,
            h_matrix,
            g,
            rate_convention: RateConvention::default(),
            phase_mode: PhaseMode::default(),
            frozen_phase: false,
        };
        params.validate(params.h_matrix.len())?;
        Ok(params)
    }

    /// Free parameters for an N-state system: zero frequencies, zero
    /// interaction matrix, unit strength.
    pub fn with_states(n: usize) -> Self {
        Self {
            omega: vec![0.0; n],
            h_matrix: vec![vec![0.0; n]; n],
            g: 1.0,
            rate_convention: RateConvention::default(),
            phase_mode: PhaseMode::default(),
            frozen_phase: false,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.omega.len() != n {
            return Err(Error::InvalidConfig(format!(
                "omega has {} entries, expected {n}",
                self.omega.len()
            )));
        }
        if self.h_matrix.len() != n || self.h_matrix.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidConfig(format!(
                "h_matrix must be {n}x{n}"
            )));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidConfig(format!("g = {} must be positive", self.g)));
        }
        Ok(())
    }

    /// Largest |H[n][m] − H[m][n]|.
    pub fn symmetry_deviation(&self) -> f64 {
        let n = self.h_matrix.len();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                dev = dev.max((self.h_matrix[i][j] - self.h_matrix[j][i]).abs());
            }
        }
        dev
    }

    /// Rejects interaction matrices that are not symmetric within 1e-12;
    /// used by the norm-conservation diagnostics.
    pub fn require_symmetric(&self) -> Result<()> {
        let dev = self.symmetry_deviation();
        if dev > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "h_matrix asymmetric: max deviation {dev:e} > 1e-12"
            )));
        }
        Ok(())
    }
}

/// Per-state onset signs α[n] = cos θ[n](0) / |cos θ[n](0)|, frozen at the
/// moment the collapse is induced and never updated afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaVector {
    signs: Vec<i8>,
}

impl AlphaVector {
    /// Builds directly from signs; every entry must be −1 or +1.
    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        for (n, &s) in signs.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(Error::InvalidConfig(format!(
                    "alpha[{n}] = {s}, must be -1 or +1"
                )));
            }
        }
        Ok(Self { signs })
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn sign(&self, n: usize) -> i8 {
        self.signs[n]
    }

    pub fn as_f64(&self, n: usize) -> f64 {
        f64::from(self.signs[n])
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

/// Values of the inter-state coupling f[n], evaluated once per α
/// configuration. For N = 2 every entry is ±1.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingVector {
    values: Vec<f64>,
}

impl CouplingVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Unit step with Θ₊(0) = 0: returns 1.0 for strictly positive arguments
/// and 0.0 otherwise.
pub fn heaviside_plus(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Sign of cos θ. Errors on the singular set where cos θ vanishes.
pub fn alpha_from_phase(theta: f64) -> Result<i8> {
    alpha_at_index(theta, 0)
}

fn alpha_at_index(theta: f64, index: usize) -> Result<i8> {
    let c = theta.cos();
    if c.abs() <= SINGULAR_TOLERANCE {
        return Err(Error::SingularPhase {
            index,
            cos_abs: c.abs(),
            tolerance: SINGULAR_TOLERANCE,
        });
    }
    Ok(if c > 0.0 { 1 } else { -1 })
}

/// Onset signs for every component of a state, taken from its phases.
pub fn alpha_vector(state: &StateVector) -> Result<AlphaVector> {
    let signs = state
        .theta
        .iter()
        .enumerate()
        .map(|(n, &t)| alpha_at_index(t, n))
        .collect::<Result<Vec<i8>>>()?;
    Ok(AlphaVector { signs })
}

/// The coupling between states, evaluated literally term by term:
///
/// ```text
/// f[n] = [1 − 2·Σ_{k≠n} Θ₊(α_k)]·α_n
///      + [1 − Σ_{k≠n} Θ₊(α_k)]·Θ₊(Σ_{k≠n} (1 − Θ₊(−α_k)))·[1 − α_n]
/// ```
///
/// For N = 2 this reduces to a four-entry sign table: opposite-sign
/// configurations make exactly one component grow and one decay, equal-sign
/// configurations drive both the same way.
pub fn coupling_f(n: usize, alpha: &AlphaVector) -> f64 {
    assert!(n < alpha.len(), "component index {n} out of range");
    let mut step_sum = 0.0; // Σ_{k≠n} Θ₊(α_k)
    let mut support_sum = 0.0; // Σ_{k≠n} (1 − Θ₊(−α_k))
    for (k, &ak) in alpha.signs.iter().enumerate() {
        if k == n {
            continue;
        }
        let a = f64::from(ak);
        step_sum += heaviside_plus(a);
        support_sum += 1.0 - heaviside_plus(-a);
    }
    let a_n = alpha.as_f64(n);
    (1.0 - 2.0 * step_sum) * a_n
        + (1.0 - step_sum) * heaviside_plus(support_sum) * (1.0 - a_n)
}

/// All coupling values for one α configuration.
pub fn coupling_vector(alpha: &AlphaVector) -> CouplingVector {
    let values = (0..alpha.len()).map(|n| coupling_f(n, alpha)).collect();
    CouplingVector { values }
}

#[inline]
pub(crate) fn cubic_logistic(rate: f64, x: f64) -> f64 {
    rate * x * (1.0 - x * x)
}

/// Reduction law: `ẋ[n] = g·f[n]·α[n]·x[n]·(1 − x[n]²)`.
///
/// Components at 0 or 1 have exactly zero derivative; everything in between
/// moves monotonically in the direction of `sign(f[n]·α[n])`.
pub fn reduction_rhs(x: &[f64], alpha: &AlphaVector, f: &CouplingVector, g: f64) -> Vec<f64> {
    assert_eq!(x.len(), alpha.len());
    assert_eq!(x.len(), f.len());
    x.iter()
        .enumerate()
        .map(|(n, &xn)| cubic_logistic(g * f.value(n) * alpha.as_f64(n), xn))
        .collect()
}

/// Per-component exponential rates `g·f[n]·α[n]` of the reduction law.
pub(crate) fn reduction_rates(alpha: &AlphaVector, f: &CouplingVector, g: f64) -> Vec<f64> {
    (0..alpha.len())
        .map(|n| g * f.value(n) * alpha.as_f64(n))
        .collect()
}

/// Both derivative arrays of the full coupled law.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub theta_dot: Vec<f64>,
    pub x_dot: Vec<f64>,
}

/// Full coupled dynamics:
///
/// ```text
/// θ̇[n] = −ω[n] − Σ_m H[n][m]·√(x[m]·x[n])·cos(θ[m] − θ[n])
/// ẋ[n] =         Σ_m H[n][m]·√(x[m]·x[n])·sin(θ[m] − θ[n])
/// ```
///
/// The sums run over all m including m = n (the diagonal feeds −H[n][n]·x[n]
/// into θ̇[n] and nothing into ẋ[n]). With `frozen_phase` set, θ̇ is
/// identically zero while ẋ keeps the fixed phase differences.
pub fn full_rhs(state: &StateVector, params: &ModelParams) -> Derivatives {
    let n = state.len();
    let mut theta_dot = vec![0.0; n];
    let mut x_dot = vec![0.0; n];
    full_rhs_into(
        &state.theta,
        &state.x,
        params,
        &mut theta_dot,
        &mut x_dot,
    );
    Derivatives { theta_dot, x_dot }
}

/// Allocation-free core of [`full_rhs`]; slices must all share one length.
pub(crate) fn full_rhs_into(
    theta: &[f64],
    x: &[f64],
    params: &ModelParams,
    theta_dot: &mut [f64],
    x_dot: &mut [f64],
) {
    let n = x.len();
    let frozen = params.frozen_phase;
    for i in 0..n {
        let mut td = -params.omega[i];
        let mut xd = 0.0;
        let row = &params.h_matrix[i];
        for m in 0..n {
            // RK4 stage values can dip a hair below zero; clamp the product
            // so the square root stays defined.
            let amp = (x[m] * x[i]).max(0.0).sqrt();
            let dphi = theta[m] - theta[i];
            td -= row[m] * amp * dphi.cos();
            xd += row[m] * amp * dphi.sin();
        }
        theta_dot[i] = if frozen { 0.0 } else { td };
        x_dot[i] = xd;
    }
}

/// The same law written in signed amplitudes a[n] (x[n] = a[n]²), which the
/// integrator steps internally:
///
/// ```text
/// θ̇[n] = −ω[n] − Σ_m H[n][m]·a[m]·a[n]·cos(θ[m] − θ[n])
/// ȧ[n] =  (1/2)·Σ_m H[n][m]·a[m]·sin(θ[m] − θ[n])
/// ```
///
/// Equivalent to the x form wherever x > 0, but polynomial in a, so it has
/// no square-root singularity: an amplitude passes smoothly through zero
/// (a sign flip there is a phase shift by π of the underlying coefficient).
pub(crate) fn full_rhs_amplitude_into(
    theta: &[f64],
    amp: &[f64],
    params: &ModelParams,
    theta_dot: &mut [f64],
    amp_dot: &mut [f64],
) {
    let n = amp.len();
    let frozen = params.frozen_phase;
    for i in 0..n {
        let mut td = -params.omega[i];
        let mut ad = 0.0;
        let row = &params.h_matrix[i];
        for m in 0..n {
            let dphi = theta[m] - theta[i];
            td -= row[m] * amp[m] * amp[i] * dphi.cos();
            ad += row[m] * amp[m] * dphi.sin();
        }
        theta_dot[i] = if frozen { 0.0 } else { td };
        amp_dot[i] = 0.5 * ad;
    }
}

/// Closed-form probability trajectory of a single decoupled component:
///
/// ```text
/// x(t) = 1 / √(1 + ((1 − x0²)/x0²)·e^(−λt))
/// ```
///
/// with λ = g·f·α under [`RateConvention::AsPrinted`] and λ = 2·g·f·α under
/// [`RateConvention::OdeConsistent`].
pub fn closed_form_x(
    t: f64,
    x0: f64,
    f: f64,
    alpha: i8,
    g: f64,
    convention: RateConvention,
) -> Result<f64> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::DegenerateInitial(x0));
    }
    let lambda = match convention {
        RateConvention::AsPrinted => g * f * f64::from(alpha),
        RateConvention::OdeConsistent => 2.0 * g * f * f64::from(alpha),
    };
    let u0 = x0 * x0;
    let c = (1.0 - u0) / u0;
    Ok(1.0 / (1.0 + c * (-lambda * t).exp()).sqrt())
}

/// Two-state order parameter q = x[0] − x[1]; collapses to ±1.
pub fn q_value(state: &StateVector) -> Result<f64> {
    if state.len() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            actual: state.len(),
        });
    }
    Ok(state.x[0] - state.x[1])
}

/// Instantaneous drift of the total probability, d/dt Σ x[n] = Σ ẋ[n].
///
/// Zero (to roundoff) for the full law with a symmetric interaction matrix;
/// generally nonzero under the reduction law, which conserves nothing.
pub fn norm_drift(x_dot: &[f64]) -> f64 {
    x_dot.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn alpha(signs: &[i8]) -> AlphaVector {
        AlphaVector::from_signs(signs.to_vec()).unwrap()
    }

    #[test]
    fn heaviside_zero_maps_to_zero() {
        assert_eq!(heaviside_plus(0.0), 0.0);
        assert_eq!(heaviside_plus(1.0), 1.0);
        assert_eq!(heaviside_plus(-1.0), 0.0);
    }

    #[test]
    fn alpha_signs_from_phases() {
        assert_eq!(alpha_from_phase(0.0).unwrap(), 1);
        assert_eq!(alpha_from_phase(PI).unwrap(), -1);
        assert!(matches!(
            alpha_from_phase(FRAC_PI_2),
            Err(Error::SingularPhase { index: 0, .. })
        ));
    }

    #[test]
    fn alpha_vector_componentwise() {
        let s = StateVector::new(vec![0.5, 0.5], vec![0.0, PI]).unwrap();
        assert_eq!(alpha_vector(&s).unwrap().signs(), &[1, -1]);

        let s = StateVector::new(vec![0.3, 0.3, 0.4], vec![0.1, 0.2, 3.0]).unwrap();
        assert_eq!(alpha_vector(&s).unwrap().signs(), &[1, 1, -1]);

        let s = StateVector::new(vec![0.5, 0.5], vec![0.0, FRAC_PI_2]).unwrap();
        assert!(matches!(
            alpha_vector(&s),
            Err(Error::SingularPhase { index: 1, .. })
        ));
    }

    #[test]
    fn coupling_two_state_examples() {
        // Opposite signs: both couplings +1, so f·α = (+1, −1).
        let a = alpha(&[1, -1]);
        assert_eq!(coupling_f(0, &a), 1.0);
        assert_eq!(coupling_f(1, &a), 1.0);

        // Both positive: the second term's leading bracket is zero.
        let a = alpha(&[1, 1]);
        assert_eq!(coupling_f(0, &a), -1.0);
        assert_eq!(coupling_f(1, &a), -1.0);

        // Both negative: the second term vanishes because Θ₊(0) = 0.
        let a = alpha(&[-1, -1]);
        assert_eq!(coupling_f(0, &a), -1.0);
        assert_eq!(coupling_f(1, &a), -1.0);
    }

    #[test]
    fn coupling_sign_table_exhaustive() {
        // (α0, α1) → (f0·α0, f1·α1)
        let table: [([i8; 2], [f64; 2]); 4] = [
            ([1, -1], [1.0, -1.0]),
            ([-1, 1], [-1.0, 1.0]),
            ([1, 1], [-1.0, -1.0]),
            ([-1, -1], [1.0, 1.0]),
        ];
        for (signs, expected) in table {
            let a = alpha(&signs);
            let f = coupling_vector(&a);
            // Entries of f itself stay in {−1, +1} for N = 2.
            for n in 0..2 {
                assert!(f.value(n) == 1.0 || f.value(n) == -1.0);
                assert_eq!(
                    f.value(n) * a.as_f64(n),
                    expected[n],
                    "config {signs:?}, component {n}"
                );
            }
        }
    }

    #[test]
    fn reduction_rhs_fixed_points_and_signs() {
        let a = alpha(&[1, -1]);
        let f = coupling_vector(&a);
        assert_eq!(reduction_rhs(&[0.0, 0.0], &a, &f, 1.0), vec![0.0, 0.0]);
        assert_eq!(reduction_rhs(&[1.0, 1.0], &a, &f, 1.0), vec![0.0, 0.0]);

        let dot = reduction_rhs(&[0.5, 0.5], &a, &f, 1.0);
        assert_eq!(dot, vec![0.375, -0.375]);
    }

    #[test]
    fn full_rhs_free_evolution() {
        let s = StateVector::new(vec![0.5, 0.5], vec![0.3, 1.2]).unwrap();
        let mut p = ModelParams::with_states(2);
        p.omega = vec![1.0, 2.0];
        let d = full_rhs(&s, &p);
        assert_eq!(d.theta_dot, vec![-1.0, -2.0]);
        assert_eq!(d.x_dot, vec![0.0, 0.0]);
    }

    #[test]
    fn full_rhs_equal_phases_freeze_probabilities() {
        let s = StateVector::new(vec![0.3, 0.7], vec![0.9, 0.9]).unwrap();
        let mut p = ModelParams::with_states(2);
        p.h_matrix = vec![vec![0.4, -1.3], vec![-1.3, 0.2]];
        let d = full_rhs(&s, &p);
        assert_eq!(d.x_dot, vec![0.0, 0.0]);
    }

    #[test]
    fn full_rhs_quarter_turn_example() {
        let s = StateVector::new(vec![0.5, 0.5], vec![0.0, FRAC_PI_2]).unwrap();
        let mut p = ModelParams::with_states(2);
        p.h_matrix = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let d = full_rhs(&s, &p);
        assert!((d.x_dot[0] - 0.5).abs() < 1e-15);
        assert!((d.x_dot[1] + 0.5).abs() < 1e-15);
        // cos(±π/2) ≈ 0, so the phase derivatives vanish here.
        assert!(d.theta_dot[0].abs() < 1e-15);
        assert!(d.theta_dot[1].abs() < 1e-15);
    }

    #[test]
    fn full_rhs_frozen_phase_zeroes_theta() {
        let s = StateVector::new(vec![0.5, 0.5], vec![0.0, 1.0]).unwrap();
        let mut p = ModelParams::with_states(2);
        p.omega = vec![3.0, 4.0];
        p.h_matrix = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        p.frozen_phase = true;
        let d = full_rhs(&s, &p);
        assert_eq!(d.theta_dot, vec![0.0, 0.0]);
        assert!(d.x_dot[0] != 0.0);
    }

    #[test]
    fn closed_form_basics() {
        for &conv in &[RateConvention::AsPrinted, RateConvention::OdeConsistent] {
            let x = closed_form_x(0.0, 0.37, 1.0, 1, 1.0, conv).unwrap();
            assert!((x - 0.37).abs() < 1e-15);
        }
        // λ > 0 saturates at 1, λ < 0 drains to 0.
        let hi = closed_form_x(1e3, 0.5, 1.0, 1, 1.0, RateConvention::OdeConsistent).unwrap();
        let lo = closed_form_x(1e3, 0.5, 1.0, -1, 1.0, RateConvention::OdeConsistent).unwrap();
        assert!((hi - 1.0).abs() < 1e-12);
        assert!(lo < 1e-12);
    }

    #[test]
    fn closed_form_printed_value() {
        // x0 = √0.5, g·f·α = 1, t = ln 3 under the printed rate: √3/2.
        let x = closed_form_x(
            3.0_f64.ln(),
            0.5_f64.sqrt(),
            1.0,
            1,
            1.0,
            RateConvention::AsPrinted,
        )
        .unwrap();
        assert!((x - 3.0_f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_rejects_fixed_points() {
        assert!(matches!(
            closed_form_x(1.0, 0.0, 1.0, 1, 1.0, RateConvention::OdeConsistent),
            Err(Error::DegenerateInitial(_))
        ));
        assert!(matches!(
            closed_form_x(1.0, 1.0, 1.0, 1, 1.0, RateConvention::OdeConsistent),
            Err(Error::DegenerateInitial(_))
        ));
    }

    #[test]
    fn q_value_two_state_only() {
        let s = StateVector::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(q_value(&s).unwrap(), 1.0);
        let s = StateVector::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(q_value(&s).unwrap(), -1.0);
        let s = StateVector::new(vec![0.5, 0.5], vec![0.0, 0.0]).unwrap();
        assert_eq!(q_value(&s).unwrap(), 0.0);
        let s = StateVector::new(vec![0.3, 0.3, 0.4], vec![0.0; 3]).unwrap();
        assert!(matches!(
            q_value(&s),
            Err(Error::WrongDimension { expected: 2, actual: 3 })
        ));
    }

    #[test]
    fn norm_drift_values() {
        assert_eq!(norm_drift(&[0.0, 0.0]), 0.0);
        // Both components decaying at 0.375 under the reduction law.
        let a = alpha(&[1, 1]);
        let f = coupling_vector(&a);
        let dot = reduction_rhs(&[0.5, 0.5], &a, &f, 1.0);
        assert_eq!(norm_drift(&dot), -0.75);
    }

    #[test]
    fn state_vector_validation() {
        assert!(StateVector::new(vec![0.5], vec![0.0]).is_err());
        assert!(StateVector::new(vec![0.5, 1.5], vec![0.0, 0.0]).is_err());
        assert!(StateVector::new(vec![0.5, 0.5], vec![0.0, f64::NAN]).is_err());
        assert!(StateVector::new(vec![0.5, 0.5], vec![0.0]).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(vec![0.0, 0.0], vec![vec![0.0; 2]; 2], 1.0).is_ok());
        assert!(ModelParams::new(vec![0.0], vec![vec![0.0; 2]; 2], 1.0)
            .unwrap_err()
            .to_string()
            .contains("omega"));
        assert!(ModelParams::new(vec![0.0, 0.0], vec![vec![0.0; 2]; 2], 0.0).is_err());

        let mut p = ModelParams::with_states(2);
        p.h_matrix = vec![vec![0.0, 1.0], vec![0.5, 0.0]];
        assert!(p.require_symmetric().is_err());
        p.h_matrix = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(p.require_symmetric().is_ok());
    }
}
