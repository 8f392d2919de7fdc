//! Rayleigh link model and the distribution of deliverable bits per slot.
//!
//! Fading power `|u|^2` is unit-mean exponential. With path gain
//! `D = 1/d^2`, the bits deliverable in one slot are
//! `B = floor(t_c W log2(1 + Psi D |u|^2 / (Upsilon + 1)))`, hence
//!
//! ```text
//! P{B >= b} = exp(-(2^(b / (t_c W)) - 1) (Upsilon + 1) / (Psi D))
//! ```
//!
//! The solver works on a grid of `grid_unit_bits`-wide cells: state `k`
//! means `k * unit <= B < (k + 1) * unit`.

use alloc::vec::Vec;
use core::f64::consts::LN_2;
use core::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::config::{BitCap, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelError {
    NonPositiveDistance(f64),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::NonPositiveDistance(d) => write!(f, "link distance {d} m is not positive"),
        }
    }
}

impl core::error::Error for ChannelError {}

fn check_distance(distance: f64) -> Result<(), ChannelError> {
    if distance > 0.0 {
        Ok(())
    } else {
        Err(ChannelError::NonPositiveDistance(distance))
    }
}

/// One slot's realization of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub distance: f64,
    pub path_gain: f64,
    pub fading_power: f64,
    /// Shannon rate, bits/s.
    pub rate: f64,
    /// Deliverable bits this slot.
    pub bits: u64,
}

impl LinkState {
    /// Deliverable bits on the solver grid, before any cap.
    pub fn grid_units(&self, cfg: &SimConfig) -> u64 {
        self.bits / cfg.grid_unit_bits
    }
}

/// Evaluates the link for a given fading power.
pub fn link_state(distance: f64, fading_power: f64, cfg: &SimConfig) -> Result<LinkState, ChannelError> {
    check_distance(distance)?;
    let path_gain = 1.0 / (distance * distance);
    let sinr = cfg.psi() * path_gain * fading_power / (cfg.upsilon() + 1.0);
    let rate = cfg.bandwidth * libm::log2(1.0 + sinr);
    let bits = libm::floor(cfg.slot_time * rate) as u64;
    Ok(LinkState { distance, path_gain, fading_power, rate, bits })
}

/// Draws a fresh fading power and evaluates the link.
pub fn draw_link<R: Rng + ?Sized>(distance: f64, cfg: &SimConfig, rng: &mut R) -> Result<LinkState, ChannelError> {
    check_distance(distance)?;
    let fading: f64 = Exp1.sample(rng);
    link_state(distance, fading, cfg)
}

/// `P{t_c R >= b}` for a link at `distance`.
pub fn ccdf_bits(b: f64, distance: f64, cfg: &SimConfig) -> f64 {
    if b <= 0.0 {
        return 1.0;
    }
    let threshold = libm::expm1(b / cfg.slot_bits_per_log2() * LN_2);
    let scale = (cfg.upsilon() + 1.0) * distance * distance / cfg.psi();
    libm::exp(-threshold * scale)
}

/// Smallest grid value `b` (in bits) with `P{B >= b} < epsilon`.
pub fn auto_bmax(distance: f64, cfg: &SimConfig, epsilon: f64) -> u64 {
    let u = cfg.grid_unit_bits;
    let below = |k: u64| ccdf_bits((k * u) as f64, distance, cfg) < epsilon;
    // ccdf is non-increasing; find a bracket, then bisect.
    let mut hi = 1u64;
    while !below(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    if below(lo) {
        return lo * u;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi * u
}

/// Probability mass of `B` on the solver grid, truncated at `top`.
#[derive(Debug, Clone, PartialEq)]
pub struct BDistribution {
    /// `pmf[k] = P{k u <= B < (k + 1) u}` for `k = 0..=top`.
    pub pmf: Vec<f64>,
    /// `P{B >= (top + 1) u}`.
    pub tail_mass: f64,
    /// Distance the distribution was computed for, meters (0 if synthetic).
    pub distance: f64,
    pub unit_bits: u64,
}

impl BDistribution {
    /// Builds the grid distribution of a link up to `top` grid units.
    pub fn on_grid(distance: f64, cfg: &SimConfig, top: u32) -> Result<Self, ChannelError> {
        check_distance(distance)?;
        let u = cfg.grid_unit_bits as f64;
        let ccdf: Vec<f64> = (0..=top + 1).map(|k| ccdf_bits(f64::from(k) * u, distance, cfg)).collect();
        let pmf = ccdf.windows(2).map(|w| w[0] - w[1]).collect();
        Ok(BDistribution { pmf, tail_mass: ccdf[top as usize + 1], distance, unit_bits: cfg.grid_unit_bits })
    }

    /// A distribution given directly on the grid; `tail_mass` is whatever
    /// `pmf` leaves over.
    pub fn from_pmf(pmf: Vec<f64>, unit_bits: u64) -> Self {
        let total: f64 = pmf.iter().sum();
        BDistribution { pmf, tail_mass: (1.0 - total).max(0.0), distance: 0.0, unit_bits }
    }

    /// Largest grid value tracked.
    pub fn top(&self) -> u32 {
        (self.pmf.len() - 1) as u32
    }

    pub fn total_mass(&self) -> f64 {
        self.pmf.iter().sum::<f64>() + self.tail_mass
    }
}

/// Grid cap for a link at `distance` under the configured `B_max`.
pub fn grid_top(distance: f64, cfg: &SimConfig) -> u32 {
    let bits = match cfg.b_max {
        BitCap::Bits(b) => b,
        BitCap::Auto { epsilon } => auto_bmax(distance, cfg, epsilon),
    };
    (bits / cfg.grid_unit_bits) as u32
}

/// Distribution of the deliverable bits of a link at `distance`.
pub fn pmf_bits(distance: f64, cfg: &SimConfig) -> Result<BDistribution, ChannelError> {
    check_distance(distance)?;
    BDistribution::on_grid(distance, cfg, grid_top(distance, cfg))
}
