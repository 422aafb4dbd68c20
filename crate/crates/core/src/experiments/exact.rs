//! Exact laws of the excess and the stabilization times for small `n` by
//! full enumeration.
//!
//! Every backbone with `z` zeros has weight `p^(n-z) (1-p)^z` and each of
//! its `z` placements of the `1` has weight `1/z`; the backbone without
//! zeros has the single placement at position 1. The tables below count
//! outcomes per zero count, so any `p` is evaluated without re-running the
//! dynamics.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    project, stabilize_three_naive, stabilize_two_naive, BiString, Projection, TriString,
};
use crate::error::{Error, Result};

pub const MAX_EXACT_N: usize = 14;

/// Outcome counts indexed by `[zeros][value]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactTables {
    pub n: usize,
    /// `(backbone, placement)` pairs by excess.
    pub excess: Vec<Vec<u64>>,
    /// `(backbone, placement)` pairs by three-type stabilization time.
    pub three: Vec<Vec<u64>>,
    /// Backbones by two-type stabilization time.
    pub two: Vec<Vec<u64>>,
}

/// Laws of `E_n`, `T_n` and `T_n^(2)` indexed by value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactLaws<T> {
    pub n: usize,
    pub excess: Vec<T>,
    pub three: Vec<T>,
    pub two: Vec<T>,
}

fn bump(table: &mut [Vec<u64>], zeros: usize, value: usize) {
    let row = &mut table[zeros];
    if row.len() <= value {
        row.resize(value + 1, 0);
    }
    row[value] += 1;
}

impl ExactTables {
    pub fn enumerate(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if n > MAX_EXACT_N {
            return Err(Error::TooLarge {
                what: "n",
                value: n,
                limit: MAX_EXACT_N,
            });
        }
        let mut excess = vec![Vec::new(); n + 1];
        let mut three = vec![Vec::new(); n + 1];
        let mut two = vec![Vec::new(); n + 1];
        for bits in 0u32..(1 << n) {
            let backbone: Vec<u8> = (0..n)
                .map(|i| if bits >> i & 1 == 1 { 2 } else { 0 })
                .collect();
            let zeros = backbone.iter().filter(|&&s| s == 0).count();
            let t2 = stabilize_two_naive(&BiString::new(backbone.clone())?).1;
            bump(&mut two, zeros, t2);
            let positions: Vec<usize> = if zeros == 0 {
                vec![0]
            } else {
                (0..n).filter(|&i| backbone[i] == 0).collect()
            };
            for i in positions {
                let mut w = backbone.clone();
                w[i] = 1;
                let t = TriString::new(w)?;
                let t3 = stabilize_three_naive(&t).1;
                bump(&mut three, zeros, t3);
                // Without zeros the projection differs from the backbone.
                let projected = if zeros == 0 {
                    stabilize_two_naive(&project(&t, Projection::First)).1
                } else {
                    t2
                };
                bump(&mut excess, zeros, t3 - projected);
            }
        }
        Ok(Self {
            n,
            excess,
            three,
            two,
        })
    }

    fn evaluate_with<T>(
        &self,
        count: impl Fn(u64) -> T,
        backbone_weight: impl Fn(usize) -> T,
    ) -> ExactLaws<T>
    where
        T: Clone
            + std::ops::Add<Output = T>
            + std::ops::Mul<Output = T>
            + std::ops::Div<Output = T>,
    {
        let fold = |table: &[Vec<u64>], per_placement: bool| {
            let width = table.iter().map(Vec::len).max().unwrap_or(0);
            let mut law = vec![count(0); width];
            for (zeros, row) in table.iter().enumerate() {
                let mut w = backbone_weight(zeros);
                if per_placement {
                    w = w / count(zeros.max(1) as u64);
                }
                for (value, &c) in row.iter().enumerate() {
                    if c > 0 {
                        law[value] = law[value].clone() + w.clone() * count(c);
                    }
                }
            }
            law
        };
        ExactLaws {
            n: self.n,
            excess: fold(&self.excess, true),
            three: fold(&self.three, true),
            two: fold(&self.two, false),
        }
    }

    /// Laws at density `p` in floating point.
    pub fn evaluate(&self, p: f64) -> Result<ExactLaws<f64>> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::DensityOutOfRange(p));
        }
        let n = self.n as i32;
        Ok(self.evaluate_with(
            |c| c as f64,
            |z| p.powi(n - z as i32) * (1.0 - p).powi(z as i32),
        ))
    }

    /// Laws at a rational density, exactly.
    pub fn evaluate_exact(&self, p: Ratio<i128>) -> Result<ExactLaws<Ratio<i128>>> {
        let one = Ratio::from_integer(1);
        if p <= Ratio::from_integer(0) || p >= one {
            return Err(Error::InvalidArgument(format!("p = {p} outside (0, 1)")));
        }
        let q = one - p;
        let n = self.n as i32;
        Ok(self.evaluate_with(
            |c| Ratio::from_integer(c as i128),
            |z| p.pow(n - z as i32) * q.pow(z as i32),
        ))
    }
}

impl<T: Clone + Default> ExactLaws<T> {
    /// `P(E_n = e)`, zero beyond the support.
    pub fn excess_probability(&self, e: usize) -> T {
        self.excess.get(e).cloned().unwrap_or_default()
    }
}

/// Exact laws of `E_n`, `T_n` and `T_n^(2)` at density `p`.
pub fn exact_excess_distribution(n: usize, p: f64) -> Result<ExactLaws<f64>> {
    ExactTables::enumerate(n)?.evaluate(p)
}
