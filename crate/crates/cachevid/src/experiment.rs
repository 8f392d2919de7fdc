//! Monte Carlo replication and parameter sweeps.
//!
//! Trial `i` of every policy uses seed `trial_seed(base, i)`, so policies
//! are compared on the same node fields and fading (common random numbers).
//! Trials run on the rayon pool and are aggregated in trial order, which
//! makes every output independent of the thread count.

use std::fmt;
use std::str::FromStr;

use cachevid_core::config::caching_case;
use cachevid_core::rng::trial_seed;
use cachevid_core::stats::Summary;
use cachevid_core::{run_trial, PolicyKind, RunMetrics, SimConfig};
use rayon::prelude::*;

use crate::error::Error;

/// Per-trial metrics of one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Trials {
    pub kind: PolicyKind,
    pub runs: Vec<RunMetrics>,
}

impl Trials {
    fn column(&self, f: impl Fn(&RunMetrics) -> f64) -> Summary {
        Summary::of(&self.runs.iter().map(f).collect::<Vec<_>>())
    }

    pub fn delay(&self) -> Summary {
        self.column(|m| m.delay_rate)
    }

    /// The configured headline quality metric.
    pub fn quality(&self) -> Summary {
        self.column(RunMetrics::quality)
    }

    pub fn quality_all_chunks(&self) -> Summary {
        self.column(|m| m.avg_quality_per_chunk)
    }

    pub fn quality_stall_zeroed(&self) -> Summary {
        self.column(|m| m.avg_quality_stall_zeroed)
    }

    pub fn objective(&self) -> Summary {
        self.column(|m| m.objective_estimate)
    }

    pub fn chunks(&self) -> Summary {
        self.column(|m| m.total_chunks as f64)
    }

    /// Named metrics in output order.
    pub fn metrics(&self) -> [(&'static str, Summary); 6] {
        [
            ("delay_rate", self.delay()),
            ("quality", self.quality()),
            ("quality_all_chunks", self.quality_all_chunks()),
            ("quality_stall_zeroed", self.quality_stall_zeroed()),
            ("objective", self.objective()),
            ("total_chunks", self.chunks()),
        ]
    }
}

/// Runs `trials` paired trials of every kind.
pub fn run_experiment(cfg: &SimConfig, kinds: &[PolicyKind], trials: u32, base_seed: u64) -> Vec<Trials> {
    kinds
        .iter()
        .map(|&kind| {
            let runs = (0..trials)
                .into_par_iter()
                .map(|i| run_trial(cfg, kind, trial_seed(base_seed, u64::from(i))))
                .collect();
            Trials { kind, runs }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Lambda,
    CachingCase,
    V,
    UpsilonDb,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Lambda => "lambda",
            SweepAxis::CachingCase => "caching_case",
            SweepAxis::V => "V",
            SweepAxis::UpsilonDb => "upsilon_db",
        }
    }

    /// `base` with this axis set to `value`, validated.
    pub fn apply(&self, base: &SimConfig, value: f64) -> Result<SimConfig, Error> {
        let mut cfg = base.clone();
        match self {
            SweepAxis::Lambda => cfg.lambda = value,
            SweepAxis::V => cfg.v = value,
            SweepAxis::UpsilonDb => cfg.upsilon_db = value,
            SweepAxis::CachingCase => {
                let case = (value.fract() == 0.0 && value >= 0.0).then_some(value as u32).and_then(caching_case);
                let probs = case.ok_or_else(|| Error::Validation(format!("caching_case must be 1, 2 or 3 (got {value})")))?;
                if cfg.levels != 3 {
                    return Err(Error::Validation("caching cases need three quality levels".into()));
                }
                cfg.caching_probs = probs.to_vec();
            }
        }
        cfg.validate().map_err(|e| Error::Validation(format!("{} = {value}: {e}", self.name())))?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lambda" => Ok(SweepAxis::Lambda),
            "caching_case" | "caching-case" => Ok(SweepAxis::CachingCase),
            "V" | "v" => Ok(SweepAxis::V),
            "upsilon_db" | "upsilon-db" | "upsilon" => Ok(SweepAxis::UpsilonDb),
            other => Err(Error::Validation(format!(
                "unknown sweep axis {other:?} (expected lambda, caching_case, V or upsilon_db)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub policies: Vec<PolicyKind>,
    pub trials: u32,
    pub base_seed: u64,
}

/// One `(axis value, policy)` point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub trials: Trials,
}

impl SweepSpec {
    pub fn validate(&self, base: &SimConfig) -> Result<(), Error> {
        if self.values.is_empty() {
            return Err(Error::Validation("sweep needs at least one value".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Validation("sweep needs at least one policy".into()));
        }
        if self.trials == 0 {
            return Err(Error::Validation("trials must be at least 1".into()));
        }
        for (i, v) in self.values.iter().enumerate() {
            if self.values[..i].contains(v) {
                return Err(Error::Validation(format!("sweep value {v} repeated")));
            }
            self.axis.apply(base, *v)?;
        }
        Ok(())
    }
}

/// Every `(value, policy)` point in value-major order. Each value reuses the
/// same trial seeds.
pub fn run_sweep(base: &SimConfig, spec: &SweepSpec) -> Result<Vec<SweepPoint>, Error> {
    spec.validate(base)?;
    let mut points = Vec::with_capacity(spec.values.len() * spec.policies.len());
    for &value in &spec.values {
        let cfg = spec.axis.apply(base, value)?;
        for trials in run_experiment(&cfg, &spec.policies, spec.trials, spec.base_seed) {
            points.push(SweepPoint { value, trials });
        }
    }
    Ok(points)
}
