//! Kolmogorov-Smirnov distances and empirical distributions.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::report::sig12;

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("NaN sample".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// `sup_x |F_n(x) - F(x)|` for a continuous or discrete `cdf`. Tied samples
/// are handled as one jump of the empirical CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let xs = sorted(samples)?;
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let f = cdf(x);
        // Just below x the ECDF is i/n; at x it is j/n. F(x-) <= F(x), so the
        // left limit is bounded through F(x) for continuous laws.
        d = d.max(f - i as f64 / n).max(j as f64 / n - f);
        i = j;
    }
    Ok(d.clamp(0.0, 1.0))
}

/// `sup_x |F_a(x) - F_b(x)|` between two empirical distributions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let xa = sorted(a)?;
    let xb = sorted(b)?;
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] == x {
            i += 1;
        }
        while j < xb.len() && xb[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Distinct sample values with their multiplicities, sorted.
pub fn ecdf_counts(samples: &[f64]) -> Result<Vec<(f64, u64)>> {
    let xs = sorted(samples)?;
    let mut out: Vec<(f64, u64)> = Vec::new();
    for x in xs {
        match out.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => out.push((x, 1)),
        }
    }
    Ok(out)
}

/// Equal-width histogram; `value` is the bin centre.
pub fn histogram(samples: &[f64], bins: usize) -> Result<Vec<(f64, u64)>> {
    let xs = sorted(samples)?;
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be positive".into()));
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let mut counts = vec![0u64; bins];
    for x in xs {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| (lo + (b as f64 + 0.5) * width, c))
        .collect())
}

/// `value,count` CSV preceded by `#` comment lines.
pub fn counts_csv(comments: &[String], rows: &[(f64, u64)]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("value,count\n");
    for (v, c) in rows {
        let _ = writeln!(out, "{},{c}", sig12(*v));
    }
    out
}
