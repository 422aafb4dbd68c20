//! First-passage laws of the biased simple random walk and the excursion
//! chain that decomposes the reversed height profile.
//!
//! The walk steps `-1` with probability `p` and `+1` with probability
//! `q = 1 - p`. `V_k` is the first time it visits level `k`; subscripts on
//! probabilities give the starting level.

mod excursion;
mod hitting;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use excursion::{
    excursions_from_string, simulate_excursion_chain, ExcursionRecord, ExcursionSampler,
};
pub use hitting::{
    conditional_hit_expectation, conditional_hit_probability, enumerate_hitting_oracle,
    escape_probability, escape_probability_exact, hitting_gf, hitting_pmf, hitting_tail,
    HittingTables,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    p: f64,
    /// `q - p`, kept separately so the critical case is exact.
    bias: f64,
    critical: Option<(u64, f64)>,
}

impl WalkParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::DensityOutOfRange(p));
        }
        Ok(Self {
            p,
            bias: 1.0 - 2.0 * p,
            critical: None,
        })
    }

    /// `p = (1 - lambda / sqrt(n)) / 2`.
    pub fn critical(n: u64, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let bias = lambda / (n as f64).sqrt();
        let p = (1.0 - bias) / 2.0;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::DensityOutOfRange(p));
        }
        Ok(Self {
            p,
            bias,
            critical: Some((n, lambda)),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// `q - p`.
    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// `(n, lambda)` when built with [`WalkParams::critical`].
    pub fn critical_pair(&self) -> Option<(u64, f64)> {
        self.critical
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
