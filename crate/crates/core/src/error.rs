use thiserror::Error;

/// Errors produced by model evaluation, integration and ensemble runs.
#[derive(Debug, Error)]
pub enum Error {
    /// `cos θ` vanished at collapse onset, so the sign α is undefined.
    #[error("singular phase at index {index}: |cos θ| = {cos_abs:.3e} ≤ {tolerance:.1e}")]
    SingularPhase {
        index: usize,
        cos_abs: f64,
        tolerance: f64,
    },

    /// Initial probability sits on a fixed point where the closed form is
    /// ill-defined (or, for reduction times, already past the threshold).
    #[error("degenerate initial probability x0 = {0}")]
    DegenerateInitial(f64),

    /// An operation defined only for two-state systems was called with N ≠ 2.
    #[error("operation requires N = {expected} states, got {actual}")]
    WrongDimension { expected: usize, actual: usize },

    /// A probability left [0, 1] by more than the clamping tolerance; the
    /// step size is too large for the local stiffness.
    #[error("step overflow: x[{index}] = {value:e} left [0, 1]; reduce dt")]
    StepOverflow { index: usize, value: f64 },

    /// Exhaustive sign-configuration enumeration only runs up to N = 20.
    #[error("dimension too large for exhaustive oracle: N = {0} > 20")]
    DimensionTooLarge(usize),

    /// A chi-square class had an expected count below the validity floor.
    #[error("expected count {expected:.2} < 5 for class '{class}'")]
    LowExpectedCount { class: String, expected: f64 },

    /// The phase sampler rejected too many consecutive draws.
    #[error("phase sampler rejected {0} consecutive draws; generator is broken")]
    SamplerExhausted(u32),

    /// An ensemble run failed; carries the failing run's index.
    #[error("run {run_index}: {source}")]
    Run {
        run_index: u64,
        #[source]
        source: Box<Error>,
    },

    /// A parameter or configuration value violates its contract.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
