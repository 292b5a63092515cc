//! The four subcommands: trajectory, ensemble, sweep, verify.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qreduce::diagnostics::run_verification_suite;
use qreduce::ensemble::{chi_square_test, run_ensemble, run_outcomes, PhaseSampler};
use qreduce::integrator::{integrate, reduction_detection_time, Law, Trajectory};
use qreduce::model::StateVector;

use crate::config::{resolve, SharedArgs};
use crate::CliError;

/// One trajectory: CSV time series plus outcome and collapse time on
/// standard output.
pub fn cmd_trajectory(shared: &SharedArgs) -> Result<(), CliError> {
    let (run, _) = resolve(shared)?;
    let out = run.require_out()?.clone();

    let theta0 = match (&run.theta0, run.seed) {
        (Some(theta), None) => theta.clone(),
        (None, Some(seed)) => {
            let sampler = PhaseSampler::new(run.params.phase_mode, seed);
            let (theta, _) = sampler.sample_phases(run.n, 0)?;
            theta
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "supply exactly one of 'theta0' or 'seed' for a trajectory (got both)".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Config(
                "supply exactly one of 'theta0' or 'seed' for a trajectory (got neither)".into(),
            ))
        }
    };

    let initial = StateVector::new(run.x0.clone(), theta0)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let cfg = run.integrator_config(run.params.g, None)?;
    let traj = integrate(run.law, &initial, &run.params, &cfg)?;

    write_trajectory_csv(&out, &traj, run.n)?;

    println!("outcome: {}", traj.outcome);
    match traj.collapse_time {
        Some(t) => println!("collapse_time: {t}"),
        None => println!("collapse_time: none"),
    }
    println!("samples: {}", traj.times.len());
    println!("wrote: {}", out.display());
    Ok(())
}

fn write_trajectory_csv(path: &Path, traj: &Trajectory, n: usize) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    let mut header = String::from("t");
    for i in 1..=n {
        header.push_str(&format!(",x_{i}"));
    }
    for i in 1..=n {
        header.push_str(&format!(",theta_{i}"));
    }
    if n == 2 {
        header.push_str(",q");
    }
    header.push_str(",norm");
    writeln!(w, "{header}")?;

    for (i, t) in traj.times.iter().enumerate() {
        let state = &traj.states[i];
        write!(w, "{t}")?;
        for v in &state.x {
            write!(w, ",{v}")?;
        }
        for v in &state.theta {
            write!(w, ",{v}")?;
        }
        if let Some(q) = &traj.q_series {
            write!(w, ",{}", q[i])?;
        }
        writeln!(w, ",{}", traj.norm_series[i])?;
    }
    w.flush()?;
    Ok(())
}

/// Monte Carlo ensemble: JSON report on disk, a short summary on stdout.
pub fn cmd_ensemble(shared: &SharedArgs) -> Result<(), CliError> {
    let (run, _) = resolve(shared)?;
    let out = run.require_out()?.clone();
    if run.theta0.is_some() {
        return Err(CliError::Config(
            "ensembles sample their phases; drop 'theta0'".into(),
        ));
    }
    let n_runs = run.runs.unwrap_or(10_000);
    if n_runs == 0 {
        return Err(CliError::Config("runs must be >= 1".into()));
    }
    let seed = run.seed.unwrap_or(0);
    let sampler = PhaseSampler::new(run.params.phase_mode, seed);
    let cfg = run.integrator_config(run.params.g, None)?;

    let report = run_ensemble(n_runs, &run.x0, &run.params, &cfg, &sampler)?;

    let file = File::create(&out)?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &report)
        .map_err(|e| CliError::Runtime(format!("cannot serialize report: {e}")))?;
    writeln!(w)?;
    w.flush()?;

    println!("n_runs: {}", report.n_runs);
    for (label, count) in &report.counts {
        println!(
            "{label}: {count} ({:.4}, oracle {:.4})",
            report.frequencies[label], report.oracle[label]
        );
    }
    match chi_square_test(&report) {
        Ok(t) => println!(
            "chi_square: statistic {:.4}, p {:.4} ({} dof)",
            t.statistic, t.p_value, t.dof
        ),
        Err(e) => println!("chi_square: skipped ({e})"),
    }
    println!("rejected_samples: {}", report.rejected_samples);
    println!("wrote: {}", out.display());
    Ok(())
}

/// Reduction-time sweep over interaction strengths and thresholds; one CSV
/// row per grid point.
pub fn cmd_sweep(
    shared: &SharedArgs,
    g_grid: Option<Vec<f64>>,
    epsilon_grid: Option<Vec<f64>>,
) -> Result<(), CliError> {
    let (run, file) = resolve(shared)?;
    let out = run.require_out()?.clone();
    if run.law != Law::Reduction {
        return Err(CliError::Config("sweep only runs the reduction law".into()));
    }
    if run.n != 2 {
        return Err(CliError::Config(
            "sweep measures the two-state reduction time; x0 must have 2 components".into(),
        ));
    }
    let g_grid = g_grid.or(file.g_grid).unwrap_or_default();
    let epsilon_grid = epsilon_grid.or(file.epsilon_grid).unwrap_or_default();
    if g_grid.is_empty() {
        return Err(CliError::Config("empty grid: supply --g-grid".into()));
    }
    if epsilon_grid.is_empty() {
        return Err(CliError::Config("empty grid: supply --epsilon-grid".into()));
    }
    let n_runs = run.runs.unwrap_or(100);
    if n_runs == 0 {
        return Err(CliError::Config("runs must be >= 1".into()));
    }
    let seed = run.seed.unwrap_or(0);
    let sampler = PhaseSampler::new(run.params.phase_mode, seed);

    let mut w = BufWriter::new(File::create(&out)?);
    writeln!(w, "g,epsilon,tau_mean,tau_analytic")?;
    for &g in &g_grid {
        for &eps in &epsilon_grid {
            let mut params = run.params.clone();
            params.g = g;
            params
                .validate(run.n)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let cfg = run.integrator_config(g, Some(eps))?;

            let outcomes = run_outcomes(n_runs, &run.x0, &params, &cfg, &sampler)?;
            let times: Vec<f64> = outcomes.iter().filter_map(|o| o.collapse_time).collect();
            let tau_mean = if times.is_empty() {
                f64::NAN
            } else {
                times.iter().sum::<f64>() / times.len() as f64
            };

            // Both collapsing sign configurations, weighted equally.
            let mut tau_analytic = 0.0;
            for theta in [[0.0, std::f64::consts::PI], [std::f64::consts::PI, 0.0]] {
                let start = StateVector::new(run.x0.clone(), theta.to_vec())
                    .map_err(|e| CliError::Config(e.to_string()))?;
                tau_analytic += reduction_detection_time(&start, g, eps)? / 2.0;
            }

            writeln!(w, "{g},{eps},{tau_mean},{tau_analytic}")?;
        }
    }
    w.flush()?;
    println!(
        "wrote: {} ({} grid points)",
        out.display(),
        g_grid.len() * epsilon_grid.len()
    );
    Ok(())
}

/// Runs the diagnostic suite and prints one line per check.
pub fn cmd_verify() -> Result<(), CliError> {
    let checks = run_verification_suite()?;
    let mut failures = 0usize;
    for check in &checks {
        let relation = if check.upper_bound { "<=" } else { ">" };
        let status = if check.passed { "PASS" } else { "FAIL" };
        let note = check
            .note
            .as_deref()
            .map(|n| format!("  [{n}]"))
            .unwrap_or_default();
        println!(
            "[{status}] {}: value {:.3e} ({relation} {:.3e}){note}",
            check.name, check.value, check.threshold
        );
        if !check.passed {
            failures += 1;
        }
    }
    println!("{} checks, {} failed", checks.len(), failures);
    if failures > 0 {
        return Err(CliError::VerifyFailed(failures));
    }
    Ok(())
}
