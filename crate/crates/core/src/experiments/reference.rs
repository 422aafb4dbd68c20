//! Limit laws of the normalized stabilization time and the Brownian
//! functionals behind them.
//!
//! `B^lambda` is Brownian motion with drift `lambda` on `[0, 1]` and
//! `M^lambda` its running maximum.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erf;

use super::stats::{Estimate, Moments};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamTag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceLaw {
    Gaussian {
        mean: f64,
        variance: f64,
    },
    /// Half of a chi variable with three degrees of freedom.
    Chi3Half,
    /// `M_1 - B_1 / 2`, simulated.
    BrownianMaxMinusHalf {
        lambda: f64,
        grid: SimulationGrid,
    },
    /// `E(argmax B)`, simulated.
    BrownianArgmaxExpectation {
        lambda: f64,
        grid: SimulationGrid,
    },
}

/// Discretization of a simulated Brownian law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationGrid {
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
}

/// Smallest grid accepted by [`simulate_brownian_functional`].
pub const MIN_PATHS: usize = 10_000;
pub const MIN_STEPS: usize = 10_000;

/// `P(chi_3 / 2 <= x) = erf(sqrt(2) x) - 2x sqrt(2/pi) exp(-2x^2)`.
fn chi3_half_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let v = erf(std::f64::consts::SQRT_2 * x)
        - 2.0 * x * (2.0 / std::f64::consts::PI).sqrt() * (-2.0 * x * x).exp();
    v.clamp(0.0, 1.0)
}

/// Density of `chi_3 / 2`: `8 x^2 sqrt(2/pi) exp(-2 x^2)`.
fn chi3_half_density(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    8.0 * x * x * (2.0 / std::f64::consts::PI).sqrt() * (-2.0 * x * x).exp()
}

/// Closed-form CDF; the simulated laws are rejected.
pub fn reference_cdf(law: &ReferenceLaw, x: f64) -> Result<f64> {
    match *law {
        ReferenceLaw::Gaussian { mean, variance } => {
            let normal = Normal::new(mean, variance.sqrt())
                .map_err(|e| Error::InvalidArgument(format!("gaussian law: {e}")))?;
            Ok(normal.cdf(x))
        }
        ReferenceLaw::Chi3Half => Ok(chi3_half_cdf(x)),
        _ => Err(Error::InvalidArgument(
            "simulated laws have no closed-form CDF; use simulate_brownian_functional".into(),
        )),
    }
}

/// Mean of `chi_3 / 2` by composite Simpson integration of `x f(x)` over
/// `[0, 12]`.
pub fn chi3_half_mean_numeric() -> f64 {
    let (a, b, intervals) = (0.0, 12.0, 24_000usize);
    let h = (b - a) / intervals as f64;
    let g = |x: f64| x * chi3_half_density(x);
    let mut acc = g(a) + g(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrownianKind {
    MaxMinusHalf,
    ArgmaxExpectation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrownianOutput {
    Samples(Vec<f64>),
    Estimate(Estimate),
}

/// One discretized path: `(max - endpoint / 2, leftmost argmax time)`.
fn simulate_path(lambda: f64, steps: usize, seed: u64, index: u64) -> (f64, f64) {
    let mut rng = stream_rng(seed, StreamTag::Brownian, index);
    let dt = 1.0 / steps as f64;
    let (drift, scale) = (lambda * dt, dt.sqrt());
    let mut b = 0.0f64;
    let mut max = 0.0f64;
    let mut argmax = 0usize;
    for i in 1..=steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        b += drift + scale * z;
        if b > max {
            max = b;
            argmax = i;
        }
    }
    (max - b / 2.0, argmax as f64 * dt)
}

/// Both functionals on `paths` paths of a grid with `steps` steps; path `i`
/// reads stream `i`.
pub(crate) fn simulate_paths(lambda: f64, grid: &SimulationGrid) -> Vec<(f64, f64)> {
    (0..grid.paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(lambda, grid.steps, grid.seed, i))
        .collect()
}

/// Drifted Brownian motion on a uniform grid of `[0, 1]`. `MaxMinusHalf`
/// returns one sample of `M_1 - B_1 / 2` per path; `ArgmaxExpectation`
/// returns the mean of the leftmost grid argmax.
pub fn simulate_brownian_functional(
    lambda: f64,
    kind: BrownianKind,
    grid: &SimulationGrid,
) -> Result<BrownianOutput> {
    if grid.paths < MIN_PATHS || grid.steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!(
            "grid {}x{} below the minimum {MIN_PATHS} paths x {MIN_STEPS} steps",
            grid.paths, grid.steps
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda = {lambda}")));
    }
    let paths = simulate_paths(lambda, grid);
    Ok(match kind {
        BrownianKind::MaxMinusHalf => {
            BrownianOutput::Samples(paths.into_iter().map(|p| p.0).collect())
        }
        BrownianKind::ArgmaxExpectation => {
            let times: Vec<f64> = paths.into_iter().map(|p| p.1).collect();
            BrownianOutput::Estimate(Moments::of(&times).mean_estimate())
        }
    })
}

/// A precomputed `E(argmax B^lambda)` estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgmaxOracle {
    pub lambda: f64,
    pub grid: SimulationGrid,
    pub estimate: Estimate,
}

/// Seed of the frozen argmax runs.
pub const ORACLE_SEED: u64 = 20_240_601;

/// Results of `simulate_brownian_functional(lambda, ArgmaxExpectation, grid)`
/// on the `100_000 x 1_000_000` grid with [`ORACLE_SEED`]; regenerate with
/// `tasep brownian-ref --kind argmax-expectation`.
pub const ARGMAX_ORACLES: [ArgmaxOracle; 2] = [
    ArgmaxOracle {
        lambda: 0.0,
        grid: ORACLE_GRID,
        estimate: Estimate {
            value: 0.498059851470,
            std_error: 0.00111740292433,
        },
    },
    ArgmaxOracle {
        lambda: 1.0,
        grid: ORACLE_GRID,
        estimate: Estimate {
            value: 0.742642687050,
            std_error: 0.000919623860388,
        },
    },
];

pub const ORACLE_GRID: SimulationGrid = SimulationGrid {
    paths: 100_000,
    steps: 1_000_000,
    seed: ORACLE_SEED,
};

/// Frozen oracle for `lambda`, if one was computed.
pub fn argmax_oracle(lambda: f64) -> Option<ArgmaxOracle> {
    ARGMAX_ORACLES.iter().copied().find(|o| o.lambda == lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let g = ReferenceLaw::Gaussian {
            mean: 0.0,
            variance: 1.0,
        };
        assert!((reference_cdf(&g, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(reference_cdf(&ReferenceLaw::Chi3Half, 0.0).unwrap(), 0.0);
        assert!((reference_cdf(&ReferenceLaw::Chi3Half, 10.0).unwrap() - 1.0).abs() < 1e-15);
        let sim = ReferenceLaw::BrownianArgmaxExpectation {
            lambda: 0.0,
            grid: ORACLE_GRID,
        };
        assert!(reference_cdf(&sim, 0.5).is_err());
    }

    #[test]
    fn chi3_half_mean() {
        let target = (2.0 / std::f64::consts::PI).sqrt();
        assert!((chi3_half_mean_numeric() - target).abs() < 1e-12);
    }

    #[test]
    fn cdf_matches_integrated_density() {
        let mut acc = 0.0;
        let h = 1e-4;
        for i in 0..20_000 {
            let x = (i as f64 + 0.5) * h;
            acc += chi3_half_density(x) * h;
            if i % 2000 == 1999 {
                assert!((acc - chi3_half_cdf((i + 1) as f64 * h)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn grid_minimum_enforced() {
        let grid = SimulationGrid {
            paths: 10,
            steps: 10,
            seed: 1,
        };
        assert!(simulate_brownian_functional(0.0, BrownianKind::ArgmaxExpectation, &grid).is_err());
    }

    #[test]
    fn small_grid_is_reproducible() {
        let grid = SimulationGrid {
            paths: 8,
            steps: 100,
            seed: 3,
        };
        assert_eq!(simulate_paths(1.0, &grid), simulate_paths(1.0, &grid));
    }
}
