//! Height function and landmarks of the first projection.
//!
//! Positions are 1-based throughout this module, matching the height
//! profile `S_0, ..., S_n` where `S_k` is the height after the first `k`
//! symbols (`0` steps up, `2` steps down).
//!
//! For a string of length `n`:
//!
//! * `L` is the length of the maximal prefix of `2`s and `R` the length of
//!   the maximal suffix of `0`s of the projection;
//! * the window is `{L+1, ..., n-R-1}`;
//! * `M_k` is the leftmost window position with height `max - k`, for the
//!   levels from the window maximum down to `S_{L+1}`, so `M_0 = M` is the
//!   leftmost maximum and the last entry is `L + 1`;
//! * `K` is the largest `k` in `{L+2, ..., n-R-1}` with `S_l < S_k - 1` for
//!   every `l` in `{L, ..., k-2}`, or `L + 2` when there is none.
//!
//! For a string with a single `1` at `U`, the excess vanishes exactly when
//! `U < K`, and an excess above one forces `U > n - R`.

mod phases;

use serde::{Deserialize, Serialize};

use crate::dynamics::{excess, project, BiString, Projection, TriString};
use crate::error::{Error, Result};

pub use phases::{track_phases, Phase, PhaseStep, PhaseTrace, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightProfile {
    /// `S_0, ..., S_n`.
    pub values: Vec<i64>,
}

impl HeightProfile {
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn at(&self, k: usize) -> i64 {
        self.values[k]
    }
}

pub fn height_profile(b: &BiString) -> HeightProfile {
    heights(b.symbols())
}

/// Heights of raw symbols, counting `1` like `0`.
fn heights(w: &[u8]) -> HeightProfile {
    let mut values = Vec::with_capacity(w.len() + 1);
    let mut h = 0i64;
    values.push(h);
    for &s in w {
        h += if s == 2 { -1 } else { 1 };
        values.push(h);
    }
    HeightProfile { values }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandmarkSet {
    pub n: usize,
    pub l: usize,
    pub r: usize,
    /// Position of the `1`, if any.
    pub u: Option<usize>,
    /// `M_0 > M_1 > ... > L + 1`; empty when the window is empty.
    pub m_list: Vec<usize>,
    pub k: usize,
    /// `K` came from the `L + 2` fallback rather than its defining set.
    pub k_fallback: bool,
    /// The index `m` with `K = M_m`, when `K` is one of the `M_k`.
    pub k_level: Option<usize>,
}

impl LandmarkSet {
    /// The leftmost maximum `M = M_0`.
    pub fn m(&self) -> Option<usize> {
        self.m_list.first().copied()
    }

    /// Window `{L+1, ..., n-R-1}` as an inclusive range, `None` if empty.
    pub fn window(&self) -> Option<(usize, usize)> {
        window(self.n, self.l, self.r)
    }

    /// `key=value` lines, one field per line.
    pub fn to_records(&self) -> String {
        let opt = |v: Option<usize>| v.map_or_else(|| "none".to_string(), |v| v.to_string());
        let list = if self.m_list.is_empty() {
            "none".to_string()
        } else {
            join(&self.m_list)
        };
        format!(
            "n={}\nL={}\nR={}\nU={}\nM={}\nM_list={}\nK={}\nK_fallback={}\nK_level={}\n",
            self.n,
            self.l,
            self.r,
            opt(self.u),
            opt(self.m()),
            list,
            self.k,
            self.k_fallback,
            opt(self.k_level),
        )
    }
}

pub(crate) fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn window(n: usize, l: usize, r: usize) -> Option<(usize, usize)> {
    let lo = l + 1;
    let hi = (n - r).checked_sub(1)?;
    (lo <= hi).then_some((lo, hi))
}

/// Landmarks of a string with at most one `1`.
pub fn landmarks(t: &TriString) -> Result<LandmarkSet> {
    let u = t.second_class_position()?;
    Ok(compute(t.symbols(), u))
}

/// Landmarks of a two-type string (no second class particle).
pub fn landmarks_of_backbone(b: &BiString) -> LandmarkSet {
    compute(b.symbols(), None)
}

/// Landmarks of raw symbols where `1` counts as `0`; `u` is passed through.
pub(crate) fn compute(w: &[u8], u: Option<usize>) -> LandmarkSet {
    let n = w.len();
    let l = w.iter().take_while(|&&s| s == 2).count();
    let r = w.iter().rev().take_while(|&&s| s != 2).count();
    let s = heights(w);

    let mut m_list = Vec::new();
    if let Some((lo, hi)) = window(n, l, r) {
        // First passage positions of each level above S_{lo}.
        let mut record = s.at(lo);
        m_list.push(lo);
        for j in lo + 1..=hi {
            if s.at(j) > record {
                record = s.at(j);
                m_list.push(j);
            }
        }
        m_list.reverse();
    }

    let mut k = None;
    let mut prefix_max = i64::MIN;
    for cand in l + 2..n - r {
        prefix_max = prefix_max.max(s.at(cand - 2));
        if prefix_max < s.at(cand) - 1 {
            k = Some(cand);
        }
    }
    let k_fallback = k.is_none();
    let k = k.unwrap_or(l + 2);
    let k_level = m_list.iter().position(|&m| m == k);

    LandmarkSet {
        n,
        l,
        r,
        u,
        m_list,
        k,
        k_fallback,
        k_level,
    }
}

/// `U < K`, which holds exactly when the excess is zero.
pub fn predict_zero_excess(t: &TriString) -> Result<bool> {
    t.unique_second_class()?;
    let set = landmarks(t)?;
    Ok(set.u.expect("checked") < set.k)
}

/// Evaluates `(excess > 1) => (U > n - R)` with the exact dynamics.
pub fn check_excess_gt_one_implies_tail(t: &TriString) -> Result<bool> {
    let u = t.unique_second_class()?;
    let set = landmarks(t)?;
    Ok(excess(t) <= 1 || u > set.n - set.r)
}

/// Fraction of the `0`s of `b` among its first `m` symbols, which is
/// `P(U <= m)` for a `1` placed uniformly on the `0`s.
pub fn u_position_cdf(b: &BiString, m: usize) -> Result<f64> {
    if m > b.len() {
        return Err(Error::InvalidArgument(format!(
            "m = {m} exceeds length {}",
            b.len()
        )));
    }
    let total = b.count(0);
    if total == 0 {
        return Err(Error::InvalidArgument("string has no 0".into()));
    }
    let prefix = b.symbols()[..m].iter().filter(|&&s| s == 0).count();
    Ok(prefix as f64 / total as f64)
}

/// Projection helper used by callers holding a three-type string.
pub fn first_projection_heights(t: &TriString) -> HeightProfile {
    height_profile(&project(t, Projection::First))
}
