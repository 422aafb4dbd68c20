//! Benchmarks live in `benches/`; this crate only hosts shared inputs.

use tasep_core::{sample_three_with_scp, TriString};

/// A Bernoulli string of length `n` with one second class particle.
pub fn fixture(n: usize, p: f64) -> TriString {
    sample_three_with_scp(n, p, 7, 0).expect("valid density").0
}
