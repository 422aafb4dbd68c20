//! Monte Carlo runners, the exact small-`n` oracle and the reference laws.
//!
//! Sample `i` of every runner uses the streams with index `i`, and the
//! per-sample outputs are collected in index order before any reduction,
//! so a result depends only on its configuration and not on the number of
//! worker threads.

mod exact;
mod ks;
mod reference;
mod stats;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{excess_fast, stabilization_time_two, stabilize_two};
use crate::error::{Error, Result};
use crate::sampling::{sample_three_with_scp, sample_two, InitialCondition, Scaling};
use crate::structure::{compute, landmarks_of_backbone};
use crate::SCHEMA_VERSION;

pub use exact::{exact_excess_distribution, ExactLaws, ExactTables, MAX_EXACT_N};
pub use ks::{counts_csv, ecdf_counts, histogram, ks_statistic, ks_two_sample};
pub use reference::{
    argmax_oracle, chi3_half_mean_numeric, reference_cdf, simulate_brownian_functional,
    ArgmaxOracle, BrownianKind, BrownianOutput, ReferenceLaw, SimulationGrid, ARGMAX_ORACLES,
    MIN_PATHS, MIN_STEPS, ORACLE_GRID, ORACLE_SEED,
};
pub use stats::{proportion, Estimate, Moments};

/// How excess samples are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact dynamics (through the trajectory shortcut for the excess).
    #[default]
    Simulate,
    /// `{U < K}` decides `E = 0`; see [`run_excess_experiment`].
    Predicate,
    /// Both, with a per-sample agreement check.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Stabilization,
    Excess,
    MkGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Outputs {
    /// Keep the per-sample values in the result.
    #[serde(default)]
    pub samples: bool,
    #[serde(default)]
    pub ecdf: bool,
    #[serde(default)]
    pub histogram_bins: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub initial: InitialCondition,
    pub samples: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub outputs: Outputs,
    /// Grid of the simulated reference law of critical stabilization
    /// experiments; defaults to [`default_reference_grid`].
    #[serde(default)]
    pub reference_grid: Option<SimulationGrid>,
}

/// `10^4` paths of `10^4` steps seeded with the experiment's master seed.
pub fn default_reference_grid(master_seed: u64) -> SimulationGrid {
    SimulationGrid {
        paths: MIN_PATHS,
        steps: MIN_STEPS,
        seed: master_seed,
    }
}

impl ExperimentConfig {
    pub fn new(initial: InitialCondition, samples: usize, master_seed: u64, mode: Mode) -> Self {
        Self {
            initial,
            samples,
            master_seed,
            mode,
            outputs: Outputs::default(),
            reference_grid: None,
        }
    }

    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument(
                "sample count must be at least 1".into(),
            ));
        }
        if self.initial.n == 0 {
            return Err(Error::Empty);
        }
        if !(self.initial.p > 0.0 && self.initial.p < 1.0) {
            return Err(Error::DensityOutOfRange(self.initial.p));
        }
        match (kind, self.mode) {
            (ExperimentKind::Excess, _) | (_, Mode::Simulate) => Ok(()),
            (ExperimentKind::Stabilization, Mode::Both) => Ok(()),
            (kind, mode) => Err(Error::InvalidArgument(format!(
                "mode {mode:?} is not available for {kind:?} experiments"
            ))),
        }
    }

    /// SHA-256 of the JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub estimates: BTreeMap<String, Estimate>,
    /// Counters such as cross-checked or skipped samples.
    pub counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecdf: Option<Vec<(f64, u64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<(f64, u64)>>,
    /// Wall-clock metadata; excluded from reproducibility comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ExperimentResult {
    fn new(kind: ExperimentKind, config: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind,
            config: config.clone(),
            config_hash: config.hash(),
            estimates: BTreeMap::new(),
            counts: BTreeMap::new(),
            reference: None,
            ks: None,
            samples: Vec::new(),
            ecdf: None,
            histogram: None,
            timing: None,
        }
    }

    fn finish(mut self, samples: Vec<f64>, started: Instant) -> Result<Self> {
        let outputs = self.config.outputs;
        if outputs.ecdf && !samples.is_empty() {
            self.ecdf = Some(ecdf_counts(&samples)?);
        }
        if let Some(bins) = outputs.histogram_bins {
            if !samples.is_empty() {
                self.histogram = Some(histogram(&samples, bins)?);
            }
        }
        if outputs.samples {
            self.samples = samples;
        }
        self.timing = Some(Timing {
            wall_seconds: started.elapsed().as_secs_f64(),
            threads: rayon::current_num_threads(),
        });
        Ok(self)
    }

    /// The result with its timing removed, for reproducibility checks.
    pub fn without_timing(mut self) -> Self {
        self.timing = None;
        self
    }

    pub fn estimate(&self, name: &str) -> Option<Estimate> {
        self.estimates.get(name).copied()
    }

    fn comments(&self) -> Vec<String> {
        vec![
            format!("config_hash={}", self.config_hash),
            format!("master_seed={}", self.config.master_seed),
        ]
    }

    /// ECDF as `value,count` CSV with the config hash and seed as comments.
    pub fn ecdf_csv(&self) -> Option<String> {
        self.ecdf
            .as_ref()
            .map(|rows| counts_csv(&self.comments(), rows))
    }

    pub fn histogram_csv(&self) -> Option<String> {
        self.histogram
            .as_ref()
            .map(|rows| counts_csv(&self.comments(), rows))
    }
}

fn mean_and_variance(result: &mut ExperimentResult, samples: &[f64]) {
    let m = Moments::of(samples);
    result.estimates.insert("mean".into(), m.mean_estimate());
    // Normal-theory standard error of the sample variance.
    let var_se = m.variance * (2.0 / (m.count.max(2) - 1) as f64).sqrt();
    result.estimates.insert(
        "variance".into(),
        Estimate {
            value: m.variance,
            std_error: var_se,
        },
    );
}

/// Designated limit law of the normalized two-type stabilization time.
pub fn stabilization_reference(config: &ExperimentConfig) -> ReferenceLaw {
    let ic = &config.initial;
    let grid = config
        .reference_grid
        .unwrap_or_else(|| default_reference_grid(config.master_seed));
    match ic.scaling {
        Scaling::Fixed if ic.p == 0.5 => ReferenceLaw::Chi3Half,
        Scaling::Fixed => ReferenceLaw::Gaussian {
            mean: 0.0,
            variance: ic.p * (1.0 - ic.p),
        },
        Scaling::CriticalPlus => ReferenceLaw::BrownianMaxMinusHalf {
            lambda: ic.lambda,
            grid,
        },
        Scaling::CriticalMinus => ReferenceLaw::BrownianMaxMinusHalf {
            lambda: -ic.lambda,
            grid,
        },
    }
}

/// Samples backbones and reports `(T^(2) - c n) / sqrt(n)` with
/// `c = max(p, 1 - p)` for fixed densities and `c = 1/2` under the critical
/// scalings, with its KS distance to the designated limit law.
///
/// `T^(2)` comes from the linear-time formula; mode `both` also steps the
/// dynamics and fails with [`Error::Consistency`] on disagreement.
pub fn run_stabilization_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate(ExperimentKind::Stabilization)?;
    let started = Instant::now();
    let ic = config.initial;
    let check = config.mode == Mode::Both;
    let times: Vec<usize> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let b = sample_two(ic.n, ic.p, config.master_seed, i)?;
            let t = stabilization_time_two(&b);
            if check {
                let stepped = stabilize_two(&b, false).steps;
                if stepped != t {
                    return Err(Error::Consistency(format!(
                        "sample {i}: stepped time {stepped} != formula {t}"
                    )));
                }
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;

    let n = ic.n as f64;
    let centre = if ic.is_critical() {
        n / 2.0
    } else {
        ic.p.max(1.0 - ic.p) * n
    };
    let normalized: Vec<f64> = times
        .iter()
        .map(|&t| (t as f64 - centre) / n.sqrt())
        .collect();

    let mut result = ExperimentResult::new(ExperimentKind::Stabilization, config);
    mean_and_variance(&mut result, &normalized);
    let raw = Moments::of(&times.iter().map(|&t| t as f64).collect::<Vec<_>>());
    result
        .estimates
        .insert("mean_time".into(), raw.mean_estimate());
    if check {
        result
            .counts
            .insert("cross_checked".into(), config.samples as u64);
    }

    let law = stabilization_reference(config);
    let ks = match law {
        ReferenceLaw::BrownianMaxMinusHalf { lambda, grid } => {
            match simulate_brownian_functional(lambda, BrownianKind::MaxMinusHalf, &grid)? {
                BrownianOutput::Samples(reference) => ks_two_sample(&normalized, &reference)?,
                BrownianOutput::Estimate(_) => unreachable!("max_minus_half yields samples"),
            }
        }
        _ => ks_statistic(&normalized, |x| {
            reference_cdf(&law, x).expect("closed form")
        })?,
    };
    result.reference = Some(law);
    result.ks = Some(ks);
    result.finish(normalized, started)
}

/// Subsample of predicate-mode excess runs checked against the exact
/// excess: every sample whose index is a multiple of this.
pub const CROSS_CHECK_STRIDE: u64 = 100;

/// Estimates `P(E = 0)`, `P(E = 1)` and `P(E > 1)`.
///
/// * `simulate`: the exact excess of every sample.
/// * `predicate`: `E = 0` iff `U < K`; otherwise `E = 1` when
///   `U <= n - R`, and the exact excess is computed only for `U > n - R`.
///   Every [`CROSS_CHECK_STRIDE`]-th sample is also evaluated exactly.
/// * `both`: the exact excess of every sample, failing unless
///   `{U < K} = {E = 0}` and `E > 1` forces `U > n - R`.
///
/// Disagreements fail with [`Error::Consistency`].
pub fn run_excess_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate(ExperimentKind::Excess)?;
    let started = Instant::now();
    let ic = config.initial;
    let mode = config.mode;
    let values: Vec<(usize, bool)> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let (t, u) = sample_three_with_scp(ic.n, ic.p, config.master_seed, i)?;
            if mode == Mode::Simulate {
                return Ok((excess_fast(&t)?, false));
            }
            let set = compute(t.symbols(), Some(u));
            let zero = u < set.k;
            let tail = u > ic.n - set.r;
            match mode {
                Mode::Predicate => {
                    let predicted = if zero {
                        0
                    } else if !tail {
                        1
                    } else {
                        return Ok((excess_fast(&t)?, false));
                    };
                    if i % CROSS_CHECK_STRIDE != 0 {
                        return Ok((predicted, false));
                    }
                    let e = excess_fast(&t)?;
                    if e != predicted {
                        return Err(Error::Consistency(format!(
                            "sample {i}: predicted excess {predicted}, exact {e} for U={u}, K={}",
                            set.k
                        )));
                    }
                    Ok((e, true))
                }
                _ => {
                    let e = excess_fast(&t)?;
                    if zero != (e == 0) || (e > 1 && !tail) {
                        return Err(Error::Consistency(format!(
                            "sample {i}: excess {e} with U={u}, K={}, n-R={}",
                            set.k,
                            ic.n - set.r
                        )));
                    }
                    Ok((e, true))
                }
            }
        })
        .collect::<Result<_>>()?;

    let total = values.len() as u64;
    let count = |f: &dyn Fn(usize) -> bool| values.iter().filter(|(e, _)| f(*e)).count() as u64;
    let mut result = ExperimentResult::new(ExperimentKind::Excess, config);
    result
        .estimates
        .insert("p_excess_0".into(), proportion(count(&|e| e == 0), total));
    result
        .estimates
        .insert("p_excess_1".into(), proportion(count(&|e| e == 1), total));
    result
        .estimates
        .insert("p_excess_gt1".into(), proportion(count(&|e| e > 1), total));
    let samples: Vec<f64> = values.iter().map(|(e, _)| *e as f64).collect();
    result
        .estimates
        .insert("mean_excess".into(), Moments::of(&samples).mean_estimate());
    if mode != Mode::Simulate {
        let checked = values.iter().filter(|(_, c)| *c).count() as u64;
        result.counts.insert("cross_checked".into(), checked);
    }
    result.finish(samples, started)
}

/// Estimates `E(M - K)` over backbones whose window is non-empty, with
/// `E(M - K) / sqrt(n)` and `E(M) / n`. Backbones without `M` are counted
/// under `undefined_m`.
pub fn estimate_mk_gap(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate(ExperimentKind::MkGap)?;
    let started = Instant::now();
    let ic = config.initial;
    let values: Vec<Option<(usize, usize, bool)>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let b = sample_two(ic.n, ic.p, config.master_seed, i)?;
            let set = landmarks_of_backbone(&b);
            Ok(set.m().map(|m| (m, set.k, set.k_fallback)))
        })
        .collect::<Result<_>>()?;

    let defined: Vec<(usize, usize, bool)> = values.iter().flatten().copied().collect();
    let gaps: Vec<f64> = defined
        .iter()
        .map(|&(m, k, _)| m as f64 - k as f64)
        .collect();
    let ms: Vec<f64> = defined.iter().map(|&(m, _, _)| m as f64).collect();
    let mut result = ExperimentResult::new(ExperimentKind::MkGap, config);
    result
        .counts
        .insert("undefined_m".into(), (values.len() - defined.len()) as u64);
    result.counts.insert(
        "k_fallback".into(),
        defined.iter().filter(|d| d.2).count() as u64,
    );
    if !gaps.is_empty() {
        let n = ic.n as f64;
        let gap = Moments::of(&gaps).mean_estimate();
        let m = Moments::of(&ms).mean_estimate();
        result.estimates.insert("mean_gap".into(), gap);
        let scaled = |e: Estimate, by: f64| Estimate {
            value: e.value / by,
            std_error: e.std_error / by,
        };
        result
            .estimates
            .insert("mean_gap_over_sqrt_n".into(), scaled(gap, n.sqrt()));
        result
            .estimates
            .insert("mean_m_over_n".into(), scaled(m, n));
    }
    result.finish(gaps, started)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize, p: f64, samples: usize, mode: Mode) -> ExperimentConfig {
        ExperimentConfig::new(InitialCondition::fixed(n, p).unwrap(), samples, 5, mode)
    }

    #[test]
    fn mode_validation() {
        assert!(run_stabilization_experiment(&config(10, 0.5, 10, Mode::Predicate)).is_err());
        assert!(estimate_mk_gap(&config(10, 0.5, 10, Mode::Both)).is_err());
        assert!(run_excess_experiment(&config(10, 0.5, 0, Mode::Simulate)).is_err());
    }

    #[test]
    fn excess_modes_agree() {
        let mut estimates = Vec::new();
        for mode in [Mode::Simulate, Mode::Predicate, Mode::Both] {
            let r = run_excess_experiment(&config(40, 0.5, 300, mode)).unwrap();
            estimates.push(r.estimates);
        }
        assert_eq!(estimates[0], estimates[1]);
        assert_eq!(estimates[0], estimates[2]);
    }

    #[test]
    fn stabilization_both_mode() {
        let r = run_stabilization_experiment(&config(60, 0.7, 200, Mode::Both)).unwrap();
        assert_eq!(r.counts["cross_checked"], 200);
        let ks = r.ks.unwrap();
        assert!((0.0..=1.0).contains(&ks));
        assert!(matches!(r.reference, Some(ReferenceLaw::Gaussian { .. })));
    }

    #[test]
    fn hash_tracks_config() {
        let a = config(10, 0.5, 10, Mode::Simulate);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.master_seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn outputs_and_csv() {
        let mut cfg = config(30, 0.5, 50, Mode::Simulate);
        cfg.outputs = Outputs {
            samples: true,
            ecdf: true,
            histogram_bins: Some(4),
        };
        let r = run_stabilization_experiment(&cfg).unwrap();
        assert_eq!(r.samples.len(), 50);
        let csv = r.ecdf_csv().unwrap();
        assert!(csv.starts_with(&format!(
            "# config_hash={}\n# master_seed=5\nvalue,count\n",
            r.config_hash
        )));
        assert_eq!(r.histogram.unwrap().iter().map(|h| h.1).sum::<u64>(), 50);
    }
}
