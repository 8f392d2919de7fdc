//! Pearson chi-square goodness of fit against a grid distribution.

use cachevid_core::channel::BDistribution;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Tests `counts[k]` (samples on grid cell `k`, the last entry counting
/// everything above the top) against `dist`. Adjacent cells are pooled
/// until each expects at least five samples.
pub fn chi_square(counts: &[u64], dist: &BDistribution) -> ChiSquare {
    let n: u64 = counts.iter().sum();
    let probs: Vec<f64> = dist.pmf.iter().copied().chain([dist.tail_mass]).collect();
    assert_eq!(counts.len(), probs.len());
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(&probs) {
        obs += c as f64;
        exp += p * n as f64;
        if exp >= 5.0 {
            bins.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if let Some(last) = bins.last_mut() {
        last.0 += obs;
        last.1 += exp;
    }
    let statistic = bins.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len() - 1;
    let p_value = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(statistic);
    ChiSquare { statistic, dof, p_value }
}
