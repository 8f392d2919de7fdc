//! Monte Carlo trends at the default configuration, 200 paired trials.

use cachevid::experiment::{run_experiment, run_sweep, SweepAxis, SweepSpec};
use cachevid_core::{PolicyKind, SimConfig};

const TRIALS: u32 = 200;
const SEED: u64 = 2024;

#[test]
fn proposed_and_strongest_stall_alike() {
    let out = run_experiment(&SimConfig::default(), &[PolicyKind::Proposed, PolicyKind::Strongest], TRIALS, SEED);
    let (p, s) = (out[0].delay().mean, out[1].delay().mean);
    assert!((p - s).abs() <= 0.005, "proposed {p} vs strongest {s}");
}

#[test]
fn proposed_quality_grows_with_node_density() {
    let spec = SweepSpec {
        axis: SweepAxis::Lambda,
        values: vec![0.2, 0.3, 0.4, 0.5, 0.6],
        policies: vec![PolicyKind::Proposed],
        trials: TRIALS,
        base_seed: SEED,
    };
    let quality: Vec<f64> = run_sweep(&SimConfig::default(), &spec).unwrap().iter().map(|p| p.trials.quality().mean).collect();
    assert!(quality.windows(2).all(|w| w[1] >= w[0]), "quality over lambda: {quality:?}");
}
