use crate::error::{Error, Result};

/// Streaming mean/variance (Welford), mergeable across shards.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMean {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMean {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines two partial accumulators (Chan et al.).
    pub fn merge(&mut self, other: &RunningMean) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Sample mean and its standard error `s/√n`.
pub fn mc_mean(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 values for a standard error, got {}",
            values.len()
        )));
    }
    let mut acc = RunningMean::new();
    for &v in values {
        acc.push(v);
    }
    Ok((acc.mean(), acc.std_error()))
}

/// Unbiased sample variance with its standard error, from the fourth central
/// moment: `SE² = (m₄ − (n−3)/(n−1)·s⁴) / n`.
pub fn mc_variance(values: &[f64]) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 values, got {n}")));
    }
    let (mean, _) = mc_mean(values)?;
    let nf = n as f64;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let var = m2 / (nf - 1.0);
    let m4 = m4 / nf;
    let se2 = (m4 - (nf - 3.0) / (nf - 1.0) * var * var) / nf;
    Ok((var, se2.max(0.0).sqrt()))
}
