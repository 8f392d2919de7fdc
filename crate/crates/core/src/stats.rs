//! Mean and standard error over Monte Carlo trials.

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Zero for a single sample.
    pub stderr: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Summary { mean: f64::NAN, stderr: f64::NAN, n };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            libm::sqrt(var / n as f64)
        } else {
            0.0
        };
        Summary { mean, stderr, n }
    }
}
