//! Simulation and solver parameters.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Upper limit on the deliverable bits per slot that the solver tracks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BitCap {
    /// Fixed cap in bits.
    Bits(u64),
    /// Per distance, the smallest grid value whose exceedance probability
    /// falls below `epsilon`.
    Auto { epsilon: f64 },
}

/// How the node field evolves from frame to frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mobility {
    /// Fresh field at every frame start.
    Resample,
    /// One field for the whole run; only fading changes.
    Static,
    /// One field; the user moves along +x at this speed (m/s).
    Speed(f64),
}

/// Every parameter of a run. Immutable once validated.
///
/// Decibel values are kept as given; [`SimConfig::psi`] and
/// [`SimConfig::upsilon`] return the linear ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Number of quality levels `L`.
    pub levels: usize,
    /// Poisson intensity of caching nodes, per square meter.
    pub lambda: f64,
    /// Caching probability per node type, length `L`.
    pub caching_probs: Vec<f64>,
    /// Frame length `T` in slots.
    pub frame_len: u32,
    /// Radius around the user searched for candidates, meters.
    pub user_radius: f64,
    /// Transmit SNR in dB.
    pub psi_db: f64,
    /// Interference-to-noise ratio in dB.
    pub upsilon_db: f64,
    /// Minimum discovery probability.
    pub eta_min: f64,
    /// Chunks played out per slot.
    pub departure: u32,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// Slot (coherence) time, seconds.
    pub slot_time: f64,
    /// Chunk playback duration used to define the minimum SINR, seconds.
    pub chunk_playback: f64,
    /// Stall penalty of the terminal cost.
    pub end_cost_a: f64,
    /// Exponential coefficient of the terminal cost, per chunk.
    pub end_cost_mu: f64,
    /// Queue capacity in chunks.
    pub capacity: u32,
    pub b_max: BitCap,
    /// Granularity of the deliverable-bits grid.
    pub grid_unit_bits: u64,
    /// Quality weight of the drift-plus-penalty objective.
    pub v: f64,
    /// Chunk size per quality, bits.
    pub chunk_bits: Vec<u64>,
    /// Quality measure (PSNR, dB) per quality.
    pub quality_db: Vec<f64>,
    /// Number of frames `K`.
    pub frames: u32,
    pub seed: u64,
    pub mobility: Mobility,
    /// Zero the quality of chunks received in a frame that stalled when
    /// reporting the headline quality metric.
    pub stall_quality_accounting: bool,
}

/// Ratio of the smallest chunk to `t0 * W` that places the minimum node
/// intensity at 0.1113 per square meter under the default radio settings.
pub const CALIBRATED_CHUNK_RATIO: f64 = 1.498;

impl Default for SimConfig {
    /// Three quality levels at desk scale (10/20/40 kbit chunks) with the
    /// reference radio, queue and solver parameters.
    fn default() -> Self {
        let chunk_bits = vec![10_000, 20_000, 40_000];
        let bandwidth = 1.0e6;
        SimConfig {
            levels: 3,
            lambda: 0.4,
            caching_probs: caching_case(1).unwrap().to_vec(),
            frame_len: 5,
            user_radius: 50.0,
            psi_db: 20.0,
            upsilon_db: 5.0,
            eta_min: 0.99,
            departure: 1,
            bandwidth,
            slot_time: 5.0e-3,
            chunk_playback: chunk_bits[0] as f64 / (CALIBRATED_CHUNK_RATIO * bandwidth),
            end_cost_a: 1.0e4,
            end_cost_mu: 1.0,
            capacity: 100,
            b_max: BitCap::Bits(52_000),
            grid_unit_bits: 1_000,
            v: 0.015,
            chunk_bits,
            quality_db: vec![34.0, 36.64, 39.11],
            frames: 50,
            seed: 0,
            mobility: Mobility::Resample,
            stall_quality_accounting: true,
        }
    }
}

/// Caching probabilities of the three reference placement cases.
pub fn caching_case(case: u32) -> Option<[f64; 3]> {
    match case {
        1 => Some([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]),
        2 => Some([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
        3 => Some([1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0]),
        _ => None,
    }
}

pub fn db_to_linear(x_db: f64) -> f64 {
    libm::pow(10.0, x_db / 10.0)
}

/// A violated configuration invariant. Each variant names exactly one.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    NoLevels,
    LengthMismatch { field: &'static str, expected: usize, found: usize },
    ProbabilityOutOfRange { index: usize, value: f64 },
    ProbabilitiesExceedOne(f64),
    ChunkSizesNotIncreasing,
    QualityNotIncreasing,
    NegativeV(f64),
    CapacityBelowDeparture,
    ZeroFrameLen,
    ZeroFrames,
    ZeroDeparture,
    ZeroGridUnit,
    SmallestChunkExceedsCap { chunk: u64, cap: u64 },
    EtaMinOutOfRange(f64),
    EpsilonOutOfRange(f64),
    NotPositive(&'static str),
    Negative(&'static str),
    NotFinite(&'static str),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ConfigError::*;
        match self {
            NoLevels => write!(f, "L must be at least 1"),
            LengthMismatch { field, expected, found } => {
                write!(f, "{field} has length {found}, expected L = {expected}")
            }
            ProbabilityOutOfRange { index, value } => {
                write!(f, "p[{index}] = {value} is outside [0, 1]")
            }
            ProbabilitiesExceedOne(sum) => write!(f, "caching probabilities sum to {sum} > 1"),
            ChunkSizesNotIncreasing => write!(f, "N not strictly increasing"),
            QualityNotIncreasing => write!(f, "P not strictly increasing"),
            NegativeV(v) => write!(f, "V must be nonnegative (got {v})"),
            CapacityBelowDeparture => write!(f, "Q_tilde must be at least c"),
            ZeroFrameLen => write!(f, "T must be at least 1"),
            ZeroFrames => write!(f, "K must be at least 1"),
            ZeroDeparture => write!(f, "c must be at least 1"),
            ZeroGridUnit => write!(f, "grid unit must be at least 1 bit"),
            SmallestChunkExceedsCap { chunk, cap } => {
                write!(f, "N[0] = {chunk} bits exceeds B_max = {cap} bits")
            }
            EtaMinOutOfRange(x) => write!(f, "eta_min = {x} is outside (0, 1)"),
            EpsilonOutOfRange(x) => write!(f, "B_max epsilon = {x} is outside (0, 1]"),
            NotPositive(name) => write!(f, "{name} must be positive"),
            Negative(name) => write!(f, "{name} must be nonnegative"),
            NotFinite(name) => write!(f, "{name} must be finite"),
        }
    }
}

impl core::error::Error for ConfigError {}

fn finite(name: &'static str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::NotFinite(name))
    }
}

fn positive(name: &'static str, x: f64) -> Result<(), ConfigError> {
    if finite(name, x)? > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::NotPositive(name))
    }
}

fn nonnegative(name: &'static str, x: f64) -> Result<(), ConfigError> {
    if finite(name, x)? >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::Negative(name))
    }
}

impl SimConfig {
    /// Checks every invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let l = self.levels;
        if l == 0 {
            return Err(ConfigError::NoLevels);
        }
        for (field, len) in [
            ("p", self.caching_probs.len()),
            ("N", self.chunk_bits.len()),
            ("P", self.quality_db.len()),
        ] {
            if len != l {
                return Err(ConfigError::LengthMismatch { field, expected: l, found: len });
            }
        }
        for (index, &value) in self.caching_probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::ProbabilityOutOfRange { index, value });
            }
        }
        let sum: f64 = self.caching_probs.iter().sum();
        // Allow for the rounding of fractions like 1/3 + 1/3 + 1/3.
        if sum > 1.0 + 1e-9 {
            return Err(ConfigError::ProbabilitiesExceedOne(sum));
        }
        if self.chunk_bits.windows(2).any(|w| w[0] >= w[1]) || self.chunk_bits[0] == 0 {
            return Err(ConfigError::ChunkSizesNotIncreasing);
        }
        for &p in &self.quality_db {
            finite("P", p)?;
        }
        if self.quality_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::QualityNotIncreasing);
        }
        if !(self.v >= 0.0) || !self.v.is_finite() {
            return Err(ConfigError::NegativeV(self.v));
        }
        if self.departure == 0 {
            return Err(ConfigError::ZeroDeparture);
        }
        if self.capacity < self.departure {
            return Err(ConfigError::CapacityBelowDeparture);
        }
        if self.frame_len == 0 {
            return Err(ConfigError::ZeroFrameLen);
        }
        if self.frames == 0 {
            return Err(ConfigError::ZeroFrames);
        }
        if self.grid_unit_bits == 0 {
            return Err(ConfigError::ZeroGridUnit);
        }
        match self.b_max {
            BitCap::Bits(cap) if self.chunk_bits[0] > cap => {
                return Err(ConfigError::SmallestChunkExceedsCap { chunk: self.chunk_bits[0], cap });
            }
            BitCap::Auto { epsilon } if !(epsilon > 0.0 && epsilon <= 1.0) => {
                return Err(ConfigError::EpsilonOutOfRange(epsilon));
            }
            _ => {}
        }
        if !(self.eta_min > 0.0 && self.eta_min < 1.0) {
            return Err(ConfigError::EtaMinOutOfRange(self.eta_min));
        }
        nonnegative("lambda", self.lambda)?;
        positive("R_user", self.user_radius)?;
        finite("psi_db", self.psi_db)?;
        finite("upsilon_db", self.upsilon_db)?;
        positive("W", self.bandwidth)?;
        positive("t_c", self.slot_time)?;
        positive("t0", self.chunk_playback)?;
        nonnegative("A", self.end_cost_a)?;
        nonnegative("mu", self.end_cost_mu)?;
        if let Mobility::Speed(v) = self.mobility {
            nonnegative("speed", v)?;
        }
        Ok(())
    }

    /// Transmit SNR as a linear ratio.
    pub fn psi(&self) -> f64 {
        db_to_linear(self.psi_db)
    }

    /// INR as a linear ratio.
    pub fn upsilon(&self) -> f64 {
        db_to_linear(self.upsilon_db)
    }

    /// Maximum quality measure.
    pub fn best_quality(&self) -> f64 {
        self.quality_db.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Chunk sizes in grid units, rounded up so that a feasible action on
    /// the grid is feasible in bits.
    pub fn chunk_units(&self) -> Vec<u32> {
        let u = self.grid_unit_bits;
        self.chunk_bits.iter().map(|&n| n.div_ceil(u) as u32).collect()
    }

    /// `t_c * W`: bits carried in one slot per bit/s/Hz of spectral efficiency.
    pub(crate) fn slot_bits_per_log2(&self) -> f64 {
        self.slot_time * self.bandwidth
    }
}
