use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;

use super::{CompensatedSum, WalkParams};
use crate::error::{Error, Result};
use crate::report::sig12;

/// Catalan numbers are exact in `u64` (and in `f64`) below this index.
const EXACT_CATALAN: u64 = 30;

/// Longest path length accepted by [`enumerate_hitting_oracle`].
pub const ORACLE_MAX_LEN: usize = 25;

fn catalan(k: u64) -> u64 {
    let mut c = 1u64;
    for i in 0..k {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// `ln Gamma` remainder after the leading Stirling terms, for `z >= 30`.
fn stirling_remainder(z: f64) -> f64 {
    let z2 = z * z;
    let mut inv = 1.0 / z;
    let coefficients = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
    ];
    let mut acc = 0.0;
    for c in coefficients {
        acc += c * inv;
        inv /= z2;
    }
    acc
}

/// `ln(4pq)`, accurate near `p = 1/2`.
fn ln_four_pq(w: &WalkParams) -> f64 {
    let b = w.bias();
    if b.abs() < 0.5 {
        (-b * b).ln_1p()
    } else {
        (4.0 * w.p() * w.q()).ln()
    }
}

/// `P_1(V_0 = 2k + 1) = Cat_k p^{k+1} q^k`: the walk hits `0` for the first
/// time after `2k + 1` steps.
pub fn hitting_pmf(w: &WalkParams, k: u64) -> f64 {
    let (p, q) = (w.p(), w.q());
    if k < EXACT_CATALAN {
        return catalan(k) as f64 * p.powi(k as i32 + 1) * q.powi(k as i32);
    }
    let kf = k as f64;
    // Cat_k = 4^k / (sqrt(pi k) (k + 1)) * exp(s(2k) - 2 s(k)).
    let ln = kf * ln_four_pq(w) + p.ln() - 0.5 * (std::f64::consts::PI * kf).ln() - (kf + 1.0).ln()
        + stirling_remainder(2.0 * kf)
        - 2.0 * stirling_remainder(kf);
    ln.exp()
}

/// `g(s) = E_1(s^{V_0}) = (1 - sqrt(1 - 4pq s^2)) / (2qs)`.
pub fn hitting_gf(w: &WalkParams, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s = {s} outside [0, 1]")));
    }
    let b = w.bias();
    // Rationalized form; 1 - 4pq s^2 = (1 - s^2) + b^2 s^2.
    let root = ((1.0 - s * s) + b * b * s * s).sqrt();
    Ok(2.0 * w.p() * s / (1.0 + root))
}

/// `P_1(V_0 = infinity)`.
pub fn escape_probability(w: &WalkParams) -> f64 {
    if w.p() >= 0.5 {
        0.0
    } else {
        w.bias() / w.q()
    }
}

/// [`escape_probability`] in exact rational arithmetic.
pub fn escape_probability_exact(p: Ratio<i64>) -> Result<Ratio<i64>> {
    let zero = Ratio::from_integer(0);
    let one = Ratio::from_integer(1);
    if p <= zero || p >= one {
        return Err(Error::InvalidArgument(format!("p = {p} outside (0, 1)")));
    }
    let q = one - p;
    if p * 2 >= one {
        Ok(zero)
    } else {
        Ok((q - p) / q)
    }
}

/// `P_1(V_0 > r)` for `r = 0..=max_r`.
fn tail_values(w: &WalkParams, max_r: usize) -> Vec<f64> {
    let kmax = max_r.div_ceil(2) as u64;
    let mut tails = vec![0.0; max_r + 1];
    let ln_decay = ln_four_pq(w);
    // For p > 1/2 the tails decay geometrically and `1 - sum` would lose
    // all relative precision, so sum the upper tail directly when the
    // truncation point is affordable.
    let extension = if w.p() > 0.5 && ln_decay < 0.0 {
        Some((45.0 / -ln_decay).ceil())
    } else {
        None
    };
    match extension {
        Some(ext) if ext <= 1e7 => {
            let top = kmax + ext as u64;
            let mut upper = CompensatedSum::default();
            let mut by_k = vec![0.0; kmax as usize + 1];
            for k in (0..=top).rev() {
                upper.add(hitting_pmf(w, k));
                if k <= kmax {
                    by_k[k as usize] = upper.value();
                }
            }
            for (r, t) in tails.iter_mut().enumerate() {
                *t = by_k[r.div_ceil(2)];
            }
        }
        _ => {
            let escape = escape_probability(w);
            let mut hit = CompensatedSum::default();
            for (r, t) in tails.iter_mut().enumerate() {
                if r % 2 == 1 {
                    hit.add(hitting_pmf(w, (r / 2) as u64));
                }
                *t = (1.0 - hit.value()).max(escape);
            }
        }
    }
    tails
}

/// `P_1(V_0 > m) = 1 - sum_{2k+1 <= m} P_1(V_0 = 2k+1)`.
pub fn hitting_tail(w: &WalkParams, m: usize) -> f64 {
    tail_values(w, m)[m]
}

/// Tables of `P_1(V_0 = j)`, `P_1(V_0 > r)` and `P_2(V_0 > r)` up to a
/// fixed horizon, with the conditional laws of the walk started at `2`.
///
/// From `2`, `V_1` takes odd values and `V_0` even ones, and
/// `V_0 = V_1 + V_0'` with `V_0'` an independent copy of `V_0` from `1`.
#[derive(Debug, Clone)]
pub struct HittingTables {
    params: WalkParams,
    max_m: usize,
    /// `P_1(V_0 = 2k + 1)` for `2k + 1 <= max_m`.
    pmf: Vec<f64>,
    /// `P_1(V_0 > r)` for `r <= max_m + 1`.
    tail1: Vec<f64>,
}

impl HittingTables {
    pub fn new(w: &WalkParams, max_m: usize) -> Self {
        let pmf = (0..max_m.div_ceil(2))
            .map(|k| hitting_pmf(w, k as u64))
            .collect();
        Self {
            params: *w,
            max_m,
            pmf,
            tail1: tail_values(w, max_m + 1),
        }
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    pub fn max_m(&self) -> usize {
        self.max_m
    }

    /// `P_1(V_0 = j)`; zero for even `j`.
    pub fn pmf_at(&self, j: usize) -> f64 {
        assert!(
            j <= self.max_m,
            "length {j} beyond table horizon {}",
            self.max_m
        );
        if j % 2 == 1 {
            self.pmf[j / 2]
        } else {
            0.0
        }
    }

    /// `P_1(V_0 > r)`.
    pub fn tail1(&self, r: usize) -> f64 {
        self.tail1[r]
    }

    /// `P_2(V_0 > r) = P_1(V_0 > r + 1) / q`.
    pub fn tail2(&self, r: usize) -> f64 {
        assert!(
            r <= self.max_m,
            "horizon {r} beyond table horizon {}",
            self.max_m
        );
        self.tail1[r + 1] / self.params.q()
    }

    /// `sum_{v odd, v < m or v <= m} f(v) P_1(V_1 = v) P_1(V_0 > m - v)`.
    fn survival_sum(&self, m: usize, inclusive: bool, f: impl Fn(usize) -> f64) -> f64 {
        let mut acc = CompensatedSum::default();
        let end = if inclusive { m + 1 } else { m };
        for v in (1..end).step_by(2) {
            acc.add(f(v) * self.pmf[v / 2] * self.tail1[m - v]);
        }
        acc.value()
    }

    fn check_m(&self, m: usize) -> Result<()> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "m = {m} must be at least 2"
            )));
        }
        if m > self.max_m {
            return Err(Error::InvalidArgument(format!(
                "m = {m} beyond table horizon {}",
                self.max_m
            )));
        }
        Ok(())
    }

    /// `P_2(V_1 < m | V_0 > m)`.
    pub fn conditional_probability(&self, m: usize) -> Result<f64> {
        self.check_m(m)?;
        Ok(self.survival_sum(m, false, |_| 1.0) / self.tail2(m))
    }

    /// `E_2(V_1 1{V_1 <= m} | V_0 > m)`.
    pub fn conditional_expectation(&self, m: usize) -> Result<f64> {
        self.check_m(m)?;
        Ok(self.survival_sum(m, true, |v| v as f64) / self.tail2(m))
    }

    /// `P_2(V_0 > m) - sum_{v odd <= m} P(V_1 = v) P_1(V_0 > m - v) - P_1(V_0 > m)`,
    /// which vanishes; exposed for consistency checks.
    pub fn decomposition_residual(&self, m: usize) -> f64 {
        self.tail2(m) - self.survival_sum(m, true, |_| 1.0) - self.tail1(m)
    }

    /// `P(I = 1)` for an excursion step with `r` steps of horizon left:
    /// the walk from `2` that survives `r` steps never visits `1`.
    pub(crate) fn trivial_probability(&self, r: usize) -> f64 {
        if r == 0 {
            return 1.0;
        }
        (self.tail1(r) / self.tail2(r)).min(1.0)
    }

    /// Samples `V_1` given `V_1 <= r < V_0` from `2` using a uniform `u`.
    pub(crate) fn sample_first_drop(&self, r: usize, u: f64) -> usize {
        let total = self.survival_sum(r, true, |_| 1.0);
        let target = u * total;
        let mut acc = 0.0;
        let mut last = 1;
        for v in (1..=r).step_by(2) {
            acc += self.pmf[v / 2] * self.tail1[r - v];
            last = v;
            if acc > target {
                return v;
            }
        }
        last
    }

    /// CSV with columns `length,pmf,tail`: `P_1(V_0 = j)` and `P_1(V_0 > j)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,pmf,tail\n");
        for j in 0..=self.max_m {
            let _ = writeln!(
                out,
                "{j},{},{}",
                sig12(self.pmf_at(j)),
                sig12(self.tail1(j))
            );
        }
        out
    }
}

/// `P_2(V_1 < m | V_0 > m)`.
pub fn conditional_hit_probability(w: &WalkParams, m: usize) -> Result<f64> {
    HittingTables::new(w, m.max(2)).conditional_probability(m)
}

/// `E_2(V_1 1{V_1 <= m} | V_0 > m)`.
pub fn conditional_hit_expectation(w: &WalkParams, m: usize) -> Result<f64> {
    HittingTables::new(w, m.max(2)).conditional_expectation(m)
}

/// Exact `P_1(V_0 = j)` for `j <= max_len` by summing the probabilities of
/// every first-passage path.
pub fn enumerate_hitting_oracle(w: &WalkParams, max_len: usize) -> Result<BTreeMap<usize, f64>> {
    if max_len > ORACLE_MAX_LEN {
        return Err(Error::TooLarge {
            what: "max_len",
            value: max_len,
            limit: ORACLE_MAX_LEN,
        });
    }
    fn walk(
        level: usize,
        len: usize,
        prob: f64,
        max_len: usize,
        w: &WalkParams,
        out: &mut [CompensatedSum],
    ) {
        if level == 0 {
            out[len].add(prob);
            return;
        }
        if level > max_len - len {
            return;
        }
        walk(level - 1, len + 1, prob * w.p(), max_len, w, out);
        walk(level + 1, len + 1, prob * w.q(), max_len, w, out);
    }
    let mut out = vec![CompensatedSum::default(); max_len + 1];
    walk(1, 0, 1.0, max_len, w, &mut out);
    Ok(out
        .into_iter()
        .map(|s| s.value())
        .enumerate()
        .filter(|&(_, v)| v > 0.0)
        .collect())
}
