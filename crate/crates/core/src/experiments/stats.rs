use serde::{Deserialize, Serialize};

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Symmetric interval `value +- z * std_error`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (
            self.value - z * self.std_error,
            self.value + z * self.std_error,
        )
    }
}

/// Sample moments, accumulated in input order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    /// Unbiased sample variance (zero for fewer than two samples).
    pub variance: f64,
}

impl Moments {
    pub fn of(samples: &[f64]) -> Self {
        let mut count = 0u64;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for &x in samples {
            count += 1;
            let delta = x - mean;
            mean += delta / count as f64;
            m2 += delta * (x - mean);
        }
        let variance = if count > 1 {
            m2 / (count - 1) as f64
        } else {
            0.0
        };
        Self {
            count,
            mean,
            variance,
        }
    }

    pub fn mean_estimate(&self) -> Estimate {
        Estimate {
            value: self.mean,
            std_error: (self.variance / self.count.max(1) as f64).sqrt(),
        }
    }
}

/// Fraction of `hits` among `total` trials.
pub fn proportion(hits: u64, total: u64) -> Estimate {
    let total = total.max(1) as f64;
    let value = hits as f64 / total;
    Estimate {
        value,
        std_error: (value * (1.0 - value) / total).sqrt(),
    }
}
