//! Run configuration: command-line flags merged over an optional JSON
//! config file (flags win), then resolved against defaults and validated.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use qreduce::integrator::{IntegratorConfig, Law};
use qreduce::model::{ModelParams, PhaseMode, RateConvention};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseModeArg {
    Independent,
    Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawArg {
    Reduction,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RateConventionArg {
    AsPrinted,
    OdeConsistent,
}

impl From<PhaseModeArg> for PhaseMode {
    fn from(v: PhaseModeArg) -> Self {
        match v {
            PhaseModeArg::Independent => PhaseMode::Independent,
            PhaseModeArg::Common => PhaseMode::Common,
        }
    }
}

impl From<LawArg> for Law {
    fn from(v: LawArg) -> Self {
        match v {
            LawArg::Reduction => Law::Reduction,
            LawArg::Full => Law::Full,
        }
    }
}

impl From<RateConventionArg> for RateConvention {
    fn from(v: RateConventionArg) -> Self {
        match v {
            RateConventionArg::AsPrinted => RateConvention::AsPrinted,
            RateConventionArg::OdeConsistent => RateConvention::OdeConsistent,
        }
    }
}

/// Flags shared by the run commands. Every value can also come from the
/// JSON config file named by `--config`; explicit flags override it.
#[derive(Debug, Clone, Default, Args)]
pub struct SharedArgs {
    /// Number of basis states (inferred from --x0 when omitted)
    #[arg(long)]
    pub states: Option<usize>,

    /// Initial probabilities, comma-separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,

    /// Initial phases in radians, comma-separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta0: Option<Vec<f64>>,

    /// Eigenfrequencies, comma-separated (default: zeros)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub omega: Option<Vec<f64>>,

    /// Interaction matrix, flat row-major list of N*N reals (default: zeros)
    #[arg(long = "h-matrix", value_delimiter = ',', allow_hyphen_values = true)]
    pub h_matrix: Option<Vec<f64>>,

    /// Interaction strength (default: 1)
    #[arg(long)]
    pub g: Option<f64>,

    /// Integrator step (default: 1e-3/g)
    #[arg(long)]
    pub dt: Option<f64>,

    /// Integration horizon (default: 50/g)
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,

    /// Collapse threshold in (0, 0.5) (default: 1e-3)
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Record every k-th step (default: 10)
    #[arg(long = "sample-stride")]
    pub sample_stride: Option<u32>,

    /// Phase sampler seed
    #[arg(long)]
    pub seed: Option<u64>,

    /// How the chaotic phase acts across states (default: independent)
    #[arg(long = "phase-mode", value_enum)]
    pub phase_mode: Option<PhaseModeArg>,

    /// Law of motion (default: reduction)
    #[arg(long, value_enum)]
    pub law: Option<LawArg>,

    /// Hold phases fixed under the full law
    #[arg(long = "frozen-phase")]
    pub frozen_phase: bool,

    /// Exponent convention of the closed form (default: ode-consistent)
    #[arg(long = "rate-convention", value_enum)]
    pub rate_convention: Option<RateConventionArg>,

    /// Number of ensemble runs
    #[arg(long)]
    pub runs: Option<u64>,

    /// Output file path
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// JSON config file schema. The interaction matrix is written as nested
/// rows here, unlike the flat `--h-matrix` flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub states: Option<usize>,
    pub x0: Option<Vec<f64>>,
    pub theta0: Option<Vec<f64>>,
    pub omega: Option<Vec<f64>>,
    pub h_matrix: Option<Vec<Vec<f64>>>,
    pub g: Option<f64>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub epsilon: Option<f64>,
    pub sample_stride: Option<u32>,
    pub seed: Option<u64>,
    pub phase_mode: Option<PhaseMode>,
    pub law: Option<Law>,
    pub frozen_phase: Option<bool>,
    pub rate_convention: Option<RateConvention>,
    pub runs: Option<u64>,
    pub out: Option<PathBuf>,
    pub g_grid: Option<Vec<f64>>,
    pub epsilon_grid: Option<Vec<f64>>,
}

/// A fully merged and validated run configuration.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub n: usize,
    pub x0: Vec<f64>,
    pub theta0: Option<Vec<f64>>,
    /// Present only when the user supplied a seed (flag or file).
    pub seed: Option<u64>,
    pub params: ModelParams,
    pub law: Law,
    pub runs: Option<u64>,
    pub out: Option<PathBuf>,
    dt: Option<f64>,
    t_max: Option<f64>,
    epsilon: Option<f64>,
    sample_stride: Option<u32>,
}

impl ResolvedRun {
    /// Integrator settings for a given interaction strength, falling back
    /// to the g-scaled defaults where nothing was specified.
    pub fn integrator_config(&self, g: f64, epsilon: Option<f64>) -> Result<IntegratorConfig, CliError> {
        let cfg = IntegratorConfig {
            dt: self.dt.unwrap_or(1e-3 / g),
            t_max: self.t_max.unwrap_or(50.0 / g),
            epsilon: epsilon.or(self.epsilon).unwrap_or(1e-3),
            sample_stride: self.sample_stride.unwrap_or(10),
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn require_out(&self) -> Result<&PathBuf, CliError> {
        self.out.as_ref().ok_or_else(|| {
            CliError::Config("missing required field 'out' (--out or config file)".into())
        })
    }
}

fn load_file(path: &PathBuf) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config file {}: {e}", path.display())))
}

/// Merges flags over the config file and validates everything that does not
/// depend on the subcommand.
pub fn resolve(shared: &SharedArgs) -> Result<(ResolvedRun, FileConfig), CliError> {
    let file = match &shared.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };

    let x0 = shared
        .x0
        .clone()
        .or_else(|| file.x0.clone())
        .ok_or_else(|| CliError::Config("missing required field 'x0' (--x0 or config file)".into()))?;
    if x0.len() < 2 {
        return Err(CliError::Config(format!(
            "x0 needs at least 2 components, got {}",
            x0.len()
        )));
    }
    let n = x0.len();
    if let Some(states) = shared.states.or(file.states) {
        if states != n {
            return Err(CliError::Config(format!(
                "states = {states} disagrees with the {n} components of x0"
            )));
        }
    }

    let theta0 = shared.theta0.clone().or_else(|| file.theta0.clone());
    if let Some(theta) = &theta0 {
        if theta.len() != n {
            return Err(CliError::Config(format!(
                "theta0 has {} components, expected {n}",
                theta.len()
            )));
        }
    }

    let omega = shared
        .omega
        .clone()
        .or_else(|| file.omega.clone())
        .unwrap_or_else(|| vec![0.0; n]);

    let h_matrix: Vec<Vec<f64>> = match (&shared.h_matrix, &file.h_matrix) {
        (Some(flat), _) => {
            if flat.len() != n * n {
                return Err(CliError::Config(format!(
                    "h-matrix has {} entries, expected {n}x{n} = {}",
                    flat.len(),
                    n * n
                )));
            }
            flat.chunks(n).map(<[f64]>::to_vec).collect()
        }
        (None, Some(rows)) => rows.clone(),
        (None, None) => vec![vec![0.0; n]; n],
    };

    let g = shared.g.or(file.g).unwrap_or(1.0);
    let mut params = ModelParams::new(omega, h_matrix, g)
        .map_err(|e| CliError::Config(e.to_string()))?;
    params.validate(n).map_err(|e| CliError::Config(e.to_string()))?;
    params.rate_convention = shared
        .rate_convention
        .map(Into::into)
        .or(file.rate_convention)
        .unwrap_or_default();
    params.phase_mode = shared
        .phase_mode
        .map(Into::into)
        .or(file.phase_mode)
        .unwrap_or_default();
    params.frozen_phase = shared.frozen_phase || file.frozen_phase.unwrap_or(false);

    let law = shared
        .law
        .map(Into::into)
        .or(file.law)
        .unwrap_or(Law::Reduction);

    let resolved = ResolvedRun {
        n,
        x0,
        theta0,
        seed: shared.seed.or(file.seed),
        params,
        law,
        runs: shared.runs.or(file.runs),
        out: shared.out.clone().or_else(|| file.out.clone()),
        dt: shared.dt.or(file.dt),
        t_max: shared.t_max.or(file.t_max),
        epsilon: shared.epsilon.or(file.epsilon),
        sample_stride: shared.sample_stride.or(file.sample_stride),
    };
    Ok((resolved, file))
}
