//! Distance-based interference management for admitting a new streaming
//! link.
//!
//! A new user is admitted when the INR it observes stays under a threshold
//! `rho` and its serving node keeps a safety radius from every existing
//! user. `rho` itself follows from requiring that, with probability at
//! least `eta_min`, some node caching the content reaches SINR `gamma_min`.
//!
//! The gamma function factor `Gamma(2) = 1` of the nearest-neighbour
//! distribution is folded into the formulas below.

use core::f64::consts::PI;
use core::fmt;

use crate::config::SimConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissionParams {
    /// INR threshold (linear).
    pub rho: f64,
    /// Minimum SINR for reliable delivery (linear).
    pub gamma_min: f64,
    pub eta_min: f64,
    /// Intensity of nodes caching the desired content, per m^2.
    pub lambda_n: f64,
    /// Transmit SNR of an interfering node (linear).
    pub psi0: f64,
    /// INR observed at the new user (linear).
    pub upsilon0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdmissionError {
    /// The `{gamma_min, eta_min}` criterion cannot be met at any INR.
    Infeasible { rho: f64 },
    NonPositive(&'static str),
}

impl fmt::Display for AdmissionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissionError::Infeasible { rho } => {
                write!(f, "criterion infeasible: INR threshold would be {rho} < 0")
            }
            AdmissionError::NonPositive(name) => write!(f, "{name} must be positive"),
        }
    }
}

impl core::error::Error for AdmissionError {}

/// Minimum SINR at which the smallest chunk is deliverable within `t0`:
/// `t0 W log2(1 + gamma_min) = N_1`.
pub fn gamma_min(cfg: &SimConfig) -> f64 {
    libm::exp2(cfg.chunk_bits[0] as f64 / (cfg.chunk_playback * cfg.bandwidth)) - 1.0
}

/// Probability that at least one node caching the content reaches
/// `gamma_min` at the given SNR and INR.
pub fn eta(params: &AdmissionParams, psi: f64, upsilon: f64) -> f64 {
    let x = PI * params.lambda_n * psi / (params.gamma_min * (upsilon + 1.0));
    -libm::expm1(-x)
}

fn discovery_log(eta_min: f64) -> f64 {
    -libm::log1p(-eta_min)
}

/// Largest INR at which `eta >= eta_min` still holds.
pub fn rho_threshold(params: &AdmissionParams, psi: f64) -> Result<f64, AdmissionError> {
    if !(params.gamma_min > 0.0) {
        return Err(AdmissionError::NonPositive("gamma_min"));
    }
    if !(params.lambda_n > 0.0) {
        return Err(AdmissionError::NonPositive("lambda_n"));
    }
    let rho = PI * params.lambda_n * psi / (params.gamma_min * discovery_log(params.eta_min)) - 1.0;
    if rho < 0.0 {
        Err(AdmissionError::Infeasible { rho })
    } else {
        Ok(rho)
    }
}

/// Smallest intensity of content-caching nodes meeting `eta_min` at the
/// configured SNR and INR.
pub fn min_intensity(cfg: &SimConfig) -> f64 {
    gamma_min(cfg) * discovery_log(cfg.eta_min) * (1.0 + cfg.upsilon()) / (PI * cfg.psi())
}

/// Safety radii `(R_N, R_U)`: how far a new user must be from serving
/// nodes, and its node from existing users, for the INR margins to hold.
pub fn safety_radii(psi0: f64, rho: f64, delta: f64) -> Result<(f64, f64), AdmissionError> {
    if !(rho > 0.0) {
        return Err(AdmissionError::NonPositive("rho"));
    }
    if !(delta > 0.0) {
        return Err(AdmissionError::NonPositive("delta"));
    }
    Ok((libm::sqrt(psi0 / rho), libm::sqrt(psi0 / delta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// The new user already sees INR above the threshold.
    UserInr,
    /// The candidate node is inside some existing user's safety radius.
    NodeTooClose,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::UserInr => "user INR",
            RejectReason::NodeTooClose => "node too close",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Admit,
    Reject(RejectReason),
}

/// Two-step admission check of a new user and its candidate node.
pub fn admit_new_link(upsilon0: f64, rho: f64, node_distances_to_users: &[f64], r_u: f64) -> Admission {
    if upsilon0 > rho {
        Admission::Reject(RejectReason::UserInr)
    } else if node_distances_to_users.iter().any(|&d| d < r_u) {
        Admission::Reject(RejectReason::NodeTooClose)
    } else {
        Admission::Admit
    }
}

/// Per node type: whether its intensity alone clears `lambda_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeSupport {
    pub node_type: usize,
    pub intensity: f64,
    pub supported: bool,
}

/// Feasibility of a configuration under the admission criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub gamma_min: f64,
    pub lambda_min: f64,
    /// Threshold for content cached by every node (`lambda_n = lambda * sum p`).
    pub rho: Result<f64, AdmissionError>,
    /// `(R_N, R_U)` with the interferer at the configured SNR and an existing
    /// user's margin `delta = rho - Upsilon`.
    pub radii: Result<(f64, f64), AdmissionError>,
    pub types: alloc::vec::Vec<TypeSupport>,
}

impl FeasibilityReport {
    pub fn new(cfg: &SimConfig) -> Self {
        let gamma_min = gamma_min(cfg);
        let lambda_min = min_intensity(cfg);
        let lambda_n = cfg.lambda * cfg.caching_probs.iter().sum::<f64>();
        let params = AdmissionParams {
            rho: 0.0,
            gamma_min,
            eta_min: cfg.eta_min,
            lambda_n,
            psi0: cfg.psi(),
            upsilon0: cfg.upsilon(),
        };
        let rho = rho_threshold(&params, cfg.psi());
        let radii = rho.and_then(|rho| safety_radii(cfg.psi(), rho, rho - cfg.upsilon()));
        let types = cfg
            .caching_probs
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let intensity = cfg.lambda * p;
                TypeSupport { node_type: i + 1, intensity, supported: intensity >= lambda_min }
            })
            .collect();
        FeasibilityReport { gamma_min, lambda_min, rho, radii, types }
    }
}
