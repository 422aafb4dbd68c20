use std::cell::Cell;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{HittingTables, WalkParams};
use crate::dynamics::BiString;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamTag};
use crate::structure::{height_profile, landmarks_of_backbone};

/// One realization of the excursion chain `(tau_k, I_k)`.
///
/// `tau_0 = 1`, `tau_1 = 2` and `I_0 = 1`. At `tau_k` the chain either
/// takes a trivial step (`I_k = 1`, length one) or runs an excursion down
/// one level and back (`I_k = 0`). It stops at the first `N >= 1` with
/// `I_N = I_{N-1} = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcursionRecord {
    /// `tau_0, ..., tau_{N+1}`.
    pub tau: Vec<usize>,
    /// `I_0, ..., I_N`.
    pub indicators: Vec<u8>,
    /// `W_k = tau_{k+1} - tau_k` for `k = 0..=N`.
    pub lengths: Vec<usize>,
    /// The stopping index `N`.
    pub stop: usize,
    /// `W_1 + ... + W_N`.
    pub total: usize,
    pub horizon: usize,
    /// `tau_N <= horizon`; the chain stopped before running out of walk.
    pub within_horizon: bool,
}

impl ExcursionRecord {
    /// Runs the chain, asking `indicator(tau, k)` for `I_k` and
    /// `drop_time(tau)` for the excursion length when `I_k = 0`.
    fn run(
        horizon: usize,
        mut indicator: impl FnMut(usize) -> bool,
        mut drop_time: impl FnMut(usize) -> usize,
    ) -> Self {
        let mut tau = vec![1, 2];
        let mut indicators = vec![1u8];
        loop {
            let t = *tau.last().expect("non-empty");
            let trivial = indicator(t);
            indicators.push(trivial as u8);
            let k = indicators.len() - 1;
            if trivial {
                tau.push(t + 1);
                if indicators[k - 1] == 1 {
                    break;
                }
            } else {
                tau.push(t + drop_time(t) + 1);
            }
        }
        let lengths: Vec<usize> = tau.windows(2).map(|w| w[1] - w[0]).collect();
        let stop = indicators.len() - 1;
        let total = lengths[1..].iter().sum();
        Self {
            within_horizon: tau[stop] <= horizon,
            tau,
            indicators,
            lengths,
            stop,
            total,
            horizon,
        }
    }

    /// CSV with columns `k,tau,indicator,length`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,tau,indicator,length\n");
        for k in 0..=self.stop {
            let _ = writeln!(
                out,
                "{k},{},{},{}",
                self.tau[k], self.indicators[k], self.lengths[k]
            );
        }
        out
    }
}

/// The chain driven by a concrete string: the reversed walk
/// `S~_i = S_M - S_{M-i}` for `i = 0..=M-L`, read from the leftmost
/// maximum `M` back to the end of the leading `2` block.
///
/// `I_k = 1` iff the walk never goes below `S~_{tau_k}` after `tau_k`;
/// otherwise the excursion ends one step after the walk first visits
/// `S~_{tau_k} - 1`. When `K` is not the fallback value,
/// `total = M - K + 1`.
pub fn excursions_from_string(b: &BiString) -> Result<ExcursionRecord> {
    let set = landmarks_of_backbone(b);
    let m = set
        .m()
        .ok_or_else(|| Error::InvalidArgument(format!("{b} has no maximum in its window")))?;
    let horizon = m - set.l;
    let heights = height_profile(b);
    let walk: Vec<i64> = (0..=horizon)
        .map(|i| heights.at(m) - heights.at(m - i))
        .collect();
    let mut suffix_min = walk.clone();
    for i in (0..horizon).rev() {
        suffix_min[i] = suffix_min[i].min(suffix_min[i + 1]);
    }
    Ok(ExcursionRecord::run(
        horizon,
        |t| t >= horizon || suffix_min[t + 1] >= walk[t],
        |t| {
            let target = walk[t] - 1;
            (t + 1..=horizon)
                .find(|&i| walk[i] == target)
                .expect("a lower suffix minimum is reached by unit steps")
                - t
        },
    ))
}

/// Samples the chain with the exact conditional laws of a walk with
/// `horizon` steps. Reuse one sampler across many seeds: building it costs
/// `O(horizon)`.
#[derive(Debug, Clone)]
pub struct ExcursionSampler {
    tables: HittingTables,
    horizon: usize,
}

impl ExcursionSampler {
    pub fn new(w: &WalkParams, horizon: usize) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::InvalidArgument(format!(
                "horizon = {horizon} must be at least 2"
            )));
        }
        Ok(Self {
            tables: HittingTables::new(w, horizon),
            horizon,
        })
    }

    pub fn sample(&self, master_seed: u64, index: u64) -> ExcursionRecord {
        let mut rng = stream_rng(master_seed, StreamTag::Excursion, index);
        let horizon = self.horizon;
        let tables = &self.tables;
        let mut uniform = move || rng.random::<f64>();
        let pending = Cell::new(None);
        ExcursionRecord::run(
            horizon,
            |t| {
                let r = horizon.saturating_sub(t);
                let trivial = uniform() < tables.trivial_probability(r);
                if !trivial {
                    pending.set(Some(tables.sample_first_drop(r, uniform())));
                }
                trivial
            },
            |_| pending.take().expect("drawn with the indicator"),
        )
    }
}

/// One chain realization for `master_seed`; see [`ExcursionSampler`].
pub fn simulate_excursion_chain(
    w: &WalkParams,
    horizon: usize,
    master_seed: u64,
) -> Result<ExcursionRecord> {
    Ok(ExcursionSampler::new(w, horizon)?.sample(master_seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_string_total() {
        let b: BiString = "02020002020020200202".parse().unwrap();
        let record = excursions_from_string(&b).unwrap();
        assert_eq!(record.total, 17 - 7 + 1);
        assert!(record.within_horizon);
        assert_eq!(record.indicators[0], 1);
        for (i, l) in record.indicators.iter().zip(&record.lengths) {
            if *i == 1 {
                assert_eq!(*l, 1);
            }
        }
    }

    #[test]
    fn string_without_maximum() {
        assert!(excursions_from_string(&"2200".parse().unwrap()).is_err());
    }

    #[test]
    fn replay_is_identical() {
        let w = WalkParams::new(0.5).unwrap();
        let a = simulate_excursion_chain(&w, 1000, 42).unwrap();
        let b = simulate_excursion_chain(&w, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert!(simulate_excursion_chain(&w, 1, 42).is_err());
    }

    #[test]
    fn csv_layout() {
        let b: BiString = "02020002020020200202".parse().unwrap();
        let csv = excursions_from_string(&b).unwrap().to_csv();
        assert!(csv.starts_with("k,tau,indicator,length\n0,1,1,1\n1,2,"));
    }
}
