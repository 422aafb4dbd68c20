//! Bernoulli initial conditions.
//!
//! A backbone has i.i.d. symbols, `2` with probability `p` and `0`
//! otherwise. The three-type initial condition then turns a uniformly
//! chosen `0` into the second class particle; when the backbone has no `0`
//! the first symbol becomes `1` and `U = 1`.
//!
//! Sample `index` under `master_seed` draws from
//! `stream_rng(master_seed, StreamTag::Backbone, index)`: first the `n`
//! backbone symbols (one `u64` each, `2` iff below `p * 2^64`), then the
//! position of the `1`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::dynamics::{BiString, TriString};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamTag};
use crate::walk::WalkParams;

/// Sign of `lambda` in `p = 1/2 +- lambda / (2 sqrt(n))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Plus,
    Minus,
}

pub fn critical_density(n: usize, lambda: f64, convention: Convention) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let shift = lambda / (2.0 * (n as f64).sqrt());
    let p = match convention {
        Convention::Plus => 0.5 + shift,
        Convention::Minus => 0.5 - shift,
    };
    check_density(p)
}

fn check_density(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(Error::DensityOutOfRange(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    Fixed,
    /// `p = 1/2 + lambda / (2 sqrt(n))`.
    CriticalPlus,
    /// `p = 1/2 - lambda / (2 sqrt(n))`.
    CriticalMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub n: usize,
    /// Density of `2`s, resolved from the scaling.
    pub p: f64,
    pub scaling: Scaling,
    /// Only meaningful under the critical scalings.
    pub lambda: f64,
}

impl InitialCondition {
    pub fn fixed(n: usize, p: f64) -> Result<Self> {
        Ok(Self {
            n,
            p: check_density(p)?,
            scaling: Scaling::Fixed,
            lambda: 0.0,
        })
    }

    pub fn critical(n: usize, lambda: f64, convention: Convention) -> Result<Self> {
        Ok(Self {
            n,
            p: critical_density(n, lambda, convention)?,
            scaling: match convention {
                Convention::Plus => Scaling::CriticalPlus,
                Convention::Minus => Scaling::CriticalMinus,
            },
            lambda,
        })
    }

    pub fn is_critical(&self) -> bool {
        self.scaling != Scaling::Fixed
    }

    /// Walk whose `-1` steps are the `2`s of the backbone.
    pub fn walk_params(&self) -> Result<WalkParams> {
        match self.scaling {
            Scaling::Fixed => WalkParams::new(self.p),
            Scaling::CriticalMinus => WalkParams::critical(self.n as u64, self.lambda),
            Scaling::CriticalPlus => WalkParams::critical(self.n as u64, -self.lambda),
        }
    }
}

fn threshold(p: f64) -> u64 {
    // 2^64 * p, saturating at both ends.
    (p * 18_446_744_073_709_551_616.0) as u64
}

/// Backbone symbols drawn from `rng`.
pub fn sample_backbone_with<R: RngCore>(rng: &mut R, n: usize, p: f64) -> Vec<u8> {
    let cut = threshold(p);
    (0..n)
        .map(|_| if rng.next_u64() < cut { 2 } else { 0 })
        .collect()
}

/// Places the `1` on a uniform `0` of `symbols` and returns its 1-based
/// position.
pub fn place_second_class_with<R: Rng>(rng: &mut R, symbols: &mut [u8]) -> usize {
    let zeros = symbols.iter().filter(|&&s| s == 0).count();
    if zeros == 0 {
        symbols[0] = 1;
        return 1;
    }
    let target = rng.random_range(0..zeros);
    let index = symbols
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 0)
        .nth(target)
        .map(|(i, _)| i)
        .expect("target below zero count");
    symbols[index] = 1;
    index + 1
}

fn validate(n: usize, p: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Empty);
    }
    check_density(p).map(|_| ())
}

/// Backbone number `index` under `master_seed`.
pub fn sample_two(n: usize, p: f64, master_seed: u64, index: u64) -> Result<BiString> {
    validate(n, p)?;
    let mut rng = stream_rng(master_seed, StreamTag::Backbone, index);
    BiString::new(sample_backbone_with(&mut rng, n, p))
}

/// Three-type initial condition number `index` under `master_seed`, with
/// the 1-based position `U` of the `1`. Its backbone is
/// `sample_two(n, p, master_seed, index)`.
pub fn sample_three_with_scp(
    n: usize,
    p: f64,
    master_seed: u64,
    index: u64,
) -> Result<(TriString, usize)> {
    validate(n, p)?;
    let mut rng = stream_rng(master_seed, StreamTag::Backbone, index);
    let mut symbols = sample_backbone_with(&mut rng, n, p);
    let u = place_second_class_with(&mut rng, &mut symbols);
    Ok((TriString::new(symbols)?, u))
}

/// Reads one string per line, skipping blank lines and `#` comments; only
/// the first whitespace separated field of a line is used.
pub fn read_strings(text: &str) -> Result<Vec<TriString>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().next().unwrap_or_default().parse())
        .collect()
}
