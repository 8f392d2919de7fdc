//! TOML configuration files.
//!
//! Every key is optional; missing keys keep the defaults of
//! [`SimConfig::default`]. Example:
//!
//! ```toml
//! seed = 7
//! frames = 50
//!
//! [network]
//! lambda = 0.4
//! caching_case = 1
//!
//! [radio]
//! upsilon_db = 5.0
//!
//! [control]
//! v = 0.015
//! ```

use std::path::Path;

use cachevid_core::config::caching_case;
use cachevid_core::{BitCap, Mobility, SimConfig};
use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stall_quality_accounting: Option<bool>,
    pub network: Network,
    pub radio: Radio,
    pub video: Video,
    pub queue: Queue,
    pub control: Control,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Network {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Reference placement 1, 2 or 3; ignored when `caching_probs` is set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caching_case: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caching_probs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user_radius: Option<f64>,
    /// `"resample"`, `"static"` or `"moving"` (with `speed`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mobility: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Radio {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upsilon_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chunk_playback: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Video {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chunk_bits: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quality_db: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Queue {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub departure: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Control {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_len: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end_cost_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end_cost_mu: Option<f64>,
    /// Fixed cap on the deliverable bits tracked by the solver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_max_bits: Option<u64>,
    /// Per-link cap at this exceedance probability instead of a fixed one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_max_epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_unit_bits: Option<u64>,
}

fn set<T>(target: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *target = v;
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Validation(format!("config: {}", e.message())))
    }

    /// Applies the file on top of `base` and validates the result.
    pub fn apply(&self, base: SimConfig) -> Result<SimConfig, Error> {
        let mut cfg = base;
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.frames, self.frames);
        set(&mut cfg.stall_quality_accounting, self.stall_quality_accounting);

        let n = &self.network;
        set(&mut cfg.lambda, n.lambda);
        if let Some(case) = n.caching_case {
            let probs = caching_case(case).ok_or_else(|| Error::Validation(format!("caching_case must be 1, 2 or 3 (got {case})")))?;
            cfg.caching_probs = probs.to_vec();
        }
        set(&mut cfg.caching_probs, n.caching_probs.clone());
        set(&mut cfg.user_radius, n.user_radius);
        cfg.mobility = match (n.mobility.as_deref(), n.speed) {
            (None, None) => cfg.mobility,
            (None | Some("moving"), Some(v)) => Mobility::Speed(v),
            (Some("resample"), None) => Mobility::Resample,
            (Some("static"), None) => Mobility::Static,
            (Some(m @ ("resample" | "static")), Some(_)) => {
                return Err(Error::Validation(format!("speed only applies to mobility = \"moving\" (got {m:?})")))
            }
            (Some(other), _) => {
                return Err(Error::Validation(format!(
                    "mobility must be \"resample\", \"static\" or \"moving\" with a speed (got {other:?})"
                )))
            }
        };

        let r = &self.radio;
        set(&mut cfg.psi_db, r.psi_db);
        set(&mut cfg.upsilon_db, r.upsilon_db);
        set(&mut cfg.eta_min, r.eta_min);
        set(&mut cfg.bandwidth, r.bandwidth);
        set(&mut cfg.slot_time, r.slot_time);
        set(&mut cfg.chunk_playback, r.chunk_playback);

        set(&mut cfg.chunk_bits, self.video.chunk_bits.clone());
        set(&mut cfg.quality_db, self.video.quality_db.clone());
        cfg.levels = cfg.chunk_bits.len();

        set(&mut cfg.capacity, self.queue.capacity);
        set(&mut cfg.departure, self.queue.departure);

        let c = &self.control;
        set(&mut cfg.v, c.v);
        set(&mut cfg.frame_len, c.frame_len);
        set(&mut cfg.end_cost_a, c.end_cost_a);
        set(&mut cfg.end_cost_mu, c.end_cost_mu);
        set(&mut cfg.grid_unit_bits, c.grid_unit_bits);
        cfg.b_max = match (c.b_max_bits, c.b_max_epsilon) {
            (Some(_), Some(_)) => {
                return Err(Error::Validation("set only one of b_max_bits and b_max_epsilon".into()));
            }
            (Some(bits), None) => BitCap::Bits(bits),
            (None, Some(epsilon)) => BitCap::Auto { epsilon },
            (None, None) => cfg.b_max,
        };

        cfg.validate().map_err(|e| Error::Validation(e.to_string()))?;
        Ok(cfg)
    }

    /// A file that reproduces `cfg` exactly.
    pub fn from_config(cfg: &SimConfig) -> Self {
        let (mobility, speed) = match cfg.mobility {
            Mobility::Resample => ("resample", None),
            Mobility::Static => ("static", None),
            Mobility::Speed(v) => ("moving", Some(v)),
        };
        let (b_max_bits, b_max_epsilon) = match cfg.b_max {
            BitCap::Bits(b) => (Some(b), None),
            BitCap::Auto { epsilon } => (None, Some(epsilon)),
        };
        ConfigFile {
            seed: Some(cfg.seed),
            frames: Some(cfg.frames),
            stall_quality_accounting: Some(cfg.stall_quality_accounting),
            network: Network {
                lambda: Some(cfg.lambda),
                caching_case: None,
                caching_probs: Some(cfg.caching_probs.clone()),
                user_radius: Some(cfg.user_radius),
                mobility: Some(mobility.into()),
                speed,
            },
            radio: Radio {
                psi_db: Some(cfg.psi_db),
                upsilon_db: Some(cfg.upsilon_db),
                eta_min: Some(cfg.eta_min),
                bandwidth: Some(cfg.bandwidth),
                slot_time: Some(cfg.slot_time),
                chunk_playback: Some(cfg.chunk_playback),
            },
            video: Video { chunk_bits: Some(cfg.chunk_bits.clone()), quality_db: Some(cfg.quality_db.clone()) },
            queue: Queue { capacity: Some(cfg.capacity), departure: Some(cfg.departure) },
            control: Control {
                v: Some(cfg.v),
                frame_len: Some(cfg.frame_len),
                end_cost_a: Some(cfg.end_cost_a),
                end_cost_mu: Some(cfg.end_cost_mu),
                b_max_bits,
                b_max_epsilon,
                grid_unit_bits: Some(cfg.grid_unit_bits),
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config files always serialize")
    }
}

/// Reads a config file, or the defaults when `path` is `None`.
pub fn load_config(path: Option<&Path>) -> Result<SimConfig, Error> {
    match path {
        None => Ok(SimConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            ConfigFile::parse(&text)?.apply(SimConfig::default())
        }
    }
}
