//! Stabilization times without stepping the whole string.
//!
//! In the first projection the symbols `0` and `1` are particles that jump
//! right into holes (`2`). With deterministic parallel update, particle `j`
//! (0-based from the left, `P` particles, 1-based initial positions `x_k`)
//! sits at time `t` at
//!
//! ```text
//! x_j(t) = min( min_{j <= k <= min(P-1, j+t)} x_k + t - 2(k - j),
//!               n - P + j + 1   if P - j <= t )
//! ```
//!
//! which unrolls `x_j(t) = min(x_j(t-1) + 1, x_{j+1}(t-1) - 1)` with a
//! frozen wall at `n + 1`.
//!
//! The second class particle always occupies one of these particle slots.
//! Each step it keeps its slot when it has a hole on its right (it jumps
//! with the particle), and moves one slot to the left when it has a
//! particle directly on its left and no hole on its right (a `01` swap).
//! Once the projection is sorted it walks left one slot per step, so the
//! excess equals its 0-based slot at the projection's stabilization time.

use serde::{Deserialize, Serialize};

use super::{BiString, TriString};
use crate::error::Result;

/// Two-type stabilization time in `O(n)`.
///
/// Scanning particles from the right, a particle with `d > 0` holes to its
/// right finishes at `max(previous + 1, d)`; the last finishing time is the
/// stabilization time.
pub fn stabilization_time_two(b: &BiString) -> usize {
    time_two_symbols(b.symbols())
}

/// Same as [`stabilization_time_two`] on raw symbols, counting `1` as a
/// particle.
pub(crate) fn time_two_symbols(w: &[u8]) -> usize {
    let mut holes = 0usize;
    let mut finish: Option<usize> = None;
    for &s in w.iter().rev() {
        if s == 2 {
            holes += 1;
        } else if holes > 0 {
            finish = Some(match finish {
                None => holes,
                Some(prev) => (prev + 1).max(holes),
            });
        }
    }
    finish.unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FastTimes {
    /// Stabilization time of the first projection.
    pub two: usize,
    /// Stabilization time of the three-type string.
    pub three: usize,
    pub excess: usize,
}

/// Range-minimum table over `x_k - 2k`.
struct MinTable {
    levels: Vec<Vec<i64>>,
}

impl MinTable {
    fn new(values: Vec<i64>) -> Self {
        let mut levels = vec![values];
        let mut width = 1;
        while 2 * width <= levels[0].len() {
            let prev = levels.last().unwrap();
            let next: Vec<i64> = (0..prev.len() - width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        Self { levels }
    }

    /// Minimum over the inclusive range `lo..=hi`.
    fn min(&self, lo: usize, hi: usize) -> i64 {
        let len = hi - lo + 1;
        let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let row = &self.levels[level];
        row[lo].min(row[hi + 1 - (1 << level)])
    }
}

struct Trajectories {
    table: MinTable,
    particles: usize,
    n: usize,
}

impl Trajectories {
    fn position(&self, j: usize, t: usize) -> i64 {
        let hi = (self.particles - 1).min(j + t);
        let mut x = t as i64 + 2 * j as i64 + self.table.min(j, hi);
        if self.particles - j <= t {
            x = x.min((self.n - self.particles + j + 1) as i64);
        }
        x
    }
}

/// Exact stabilization times of a string with exactly one `1`, in
/// `O(n log n)`.
pub fn fast_times(t: &TriString) -> Result<FastTimes> {
    t.unique_second_class()?;
    let w = t.symbols();
    let n = w.len();
    let two = time_two_symbols(w);

    let mut f = Vec::new();
    let mut slot = 0;
    for (i, &s) in w.iter().enumerate() {
        if s != 2 {
            if s == 1 {
                slot = f.len();
            }
            f.push((i + 1) as i64 - 2 * f.len() as i64);
        }
    }
    let particles = f.len();
    let traj = Trajectories {
        table: MinTable::new(f),
        particles,
        n,
    };

    for time in 0..two {
        if slot == 0 {
            break;
        }
        let here = traj.position(slot, time);
        let hole_right = if slot + 1 < particles {
            traj.position(slot + 1, time) > here + 1
        } else {
            here < n as i64
        };
        if !hole_right && traj.position(slot - 1, time) == here - 1 {
            slot -= 1;
        }
    }
    Ok(FastTimes {
        two,
        three: two + slot,
        excess: slot,
    })
}

/// Excess of a string with exactly one `1`; see [`fast_times`].
pub fn excess_fast(t: &TriString) -> Result<usize> {
    fast_times(t).map(|f| f.excess)
}
