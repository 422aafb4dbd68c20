//! Recomputes the frozen argmax oracles. Each run simulates 10^11 Gaussian
//! increments, so it is ignored by default:
//!
//! ```text
//! cargo test --release -p tasep-core --test oracle -- --ignored --nocapture
//! ```

use tasep_core::experiments::{
    simulate_brownian_functional, BrownianKind, BrownianOutput, ARGMAX_ORACLES,
};
use tasep_core::report::round_sig;

#[test]
#[ignore]
fn recompute_argmax_oracles() {
    let mut results = Vec::new();
    for oracle in ARGMAX_ORACLES {
        let out = simulate_brownian_functional(
            oracle.lambda,
            BrownianKind::ArgmaxExpectation,
            &oracle.grid,
        )
        .unwrap();
        let BrownianOutput::Estimate(e) = out else {
            panic!("argmax yields an estimate")
        };
        println!(
            "lambda={} value={:?} std_error={:?}",
            oracle.lambda, e.value, e.std_error
        );
        results.push((oracle, e));
    }
    for (oracle, e) in results {
        assert_eq!(round_sig(e.value), round_sig(oracle.estimate.value));
        assert_eq!(round_sig(e.std_error), round_sig(oracle.estimate.std_error));
    }
}
