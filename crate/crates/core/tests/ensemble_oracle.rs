//! Empirical outcome frequencies against the exact sign-configuration
//! oracle for a three-state system. The two-state case at full scale lives
//! in the CLI acceptance suite.

use qreduce::ensemble::{run_ensemble, sign_config_oracle, PhaseSampler};
use qreduce::integrator::IntegratorConfig;
use qreduce::model::{ModelParams, PhaseMode};

#[test]
fn three_state_frequencies_match_oracle_within_3_sigma() {
    let n_runs = 20_000u64;
    let params = ModelParams::with_states(3);
    let cfg = IntegratorConfig::default();
    let sampler = PhaseSampler::new(PhaseMode::Independent, 17);
    let report = run_ensemble(n_runs, &[0.4, 0.3, 0.3], &params, &cfg, &sampler).unwrap();

    let oracle = sign_config_oracle(3, PhaseMode::Independent).unwrap();
    assert_eq!(report.counts.values().sum::<u64>(), n_runs);
    for (class, &p) in &oracle {
        let freq = report.frequencies[&class.label()];
        let sigma = (p * (1.0 - p) / n_runs as f64).sqrt();
        assert!(
            (freq - p).abs() <= 3.0 * sigma,
            "{class}: frequency {freq} departs oracle {p} by more than 3σ"
        );
    }
    // Equal-sign branches dominate for N = 3: half of all runs drain.
    assert!(report.frequencies["all_decay"] > 0.45);
    assert_eq!(report.counts["unresolved"], 0);
}
