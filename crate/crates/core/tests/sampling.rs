use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tasep_core::experiments::{
    ks_statistic, reference_cdf, run_excess_experiment, run_stabilization_experiment,
    ExperimentConfig, Mode, ReferenceLaw,
};
use tasep_core::sampling::place_second_class_with;
use tasep_core::{
    project, sample_three_with_scp, sample_two, stream_rng, u_position_cdf, BiString,
    InitialCondition, Projection, StreamTag,
};

fn chi_square_p_value(counts: &[u64], expected: &[f64]) -> f64 {
    let stat: f64 = counts
        .iter()
        .zip(expected)
        .map(|(&c, &e)| (c as f64 - e).powi(2) / e)
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

#[test]
fn backbone_density() {
    let (n, p, samples) = (50, 0.3, 4000u64);
    let twos: usize = (0..samples)
        .map(|i| sample_two(n, p, 17, i).unwrap().count(2))
        .sum();
    let mean = twos as f64 / (samples as usize * n) as f64;
    let se = (p * (1.0 - p) / (samples as usize * n) as f64).sqrt();
    assert!((mean - p).abs() < 5.0 * se, "mean {mean}");
}

#[test]
fn second_class_uniform_on_zeros() {
    let backbone: BiString = "0220002202200".parse().unwrap();
    let zeros: Vec<usize> = (0..backbone.len())
        .filter(|&i| backbone.symbols()[i] == 0)
        .map(|i| i + 1)
        .collect();
    let draws = 40_000u64;
    let mut counts = vec![0u64; zeros.len()];
    let mut positions = Vec::with_capacity(draws as usize);
    for i in 0..draws {
        let mut rng = stream_rng(3, StreamTag::TestStrings, i);
        let mut w = backbone.symbols().to_vec();
        let u = place_second_class_with(&mut rng, &mut w);
        assert_eq!(w[u - 1], 1);
        counts[zeros.iter().position(|&z| z == u).unwrap()] += 1;
        positions.push(u);
    }
    let expected = vec![draws as f64 / zeros.len() as f64; zeros.len()];
    let p = chi_square_p_value(&counts, &expected);
    assert!(p > 1e-4, "chi-square p-value {p}");

    // Empirical P(U <= m) against the exact prefix fraction.
    for m in 1..=backbone.len() {
        let empirical = positions.iter().filter(|&&u| u <= m).count() as f64 / draws as f64;
        let exact = u_position_cdf(&backbone, m).unwrap();
        let se = (exact * (1.0 - exact) / draws as f64).sqrt().max(1e-9);
        assert!((empirical - exact).abs() <= 5.0 * se, "m={m}");
    }
}

#[test]
fn all_twos_puts_the_particle_first() {
    let mut seen = false;
    for i in 0..2000 {
        let (t, u) = sample_three_with_scp(4, 0.9, 5, i).unwrap();
        if sample_two(4, 0.9, 5, i).unwrap().count(0) == 0 {
            seen = true;
            assert_eq!(u, 1);
            assert_eq!(t.to_string(), "1222");
        }
    }
    assert!(seen);
}

proptest! {
    #[test]
    fn three_type_sample_extends_backbone(n in 1usize..300, p in 0.01f64..0.99, seed: u64, index: u64) {
        let (t, u) = sample_three_with_scp(n, p, seed, index).unwrap();
        let b = sample_two(n, p, seed, index).unwrap();
        prop_assert_eq!(t.count(1), 1);
        prop_assert_eq!(t.unique_second_class().unwrap(), u);
        if b.count(0) > 0 {
            prop_assert_eq!(project(&t, Projection::First), b);
        } else {
            prop_assert_eq!(u, 1);
        }
    }

    #[test]
    fn sampling_is_a_pure_function(n in 1usize..200, p in 0.01f64..0.99, seed: u64, index: u64) {
        prop_assert_eq!(
            sample_three_with_scp(n, p, seed, index).unwrap(),
            sample_three_with_scp(n, p, seed, index).unwrap()
        );
    }
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn experiments_do_not_depend_on_thread_count() {
    let ic = InitialCondition::fixed(400, 0.5).unwrap();
    let cfg = ExperimentConfig::new(ic, 3000, 99, Mode::Both);
    let one = with_threads(1, || run_excess_experiment(&cfg).unwrap().without_timing());
    let four = with_threads(4, || run_excess_experiment(&cfg).unwrap().without_timing());
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&four).unwrap()
    );

    let ic = InitialCondition::fixed(400, 0.7).unwrap();
    let mut cfg = ExperimentConfig::new(ic, 2000, 5, Mode::Simulate);
    cfg.outputs.samples = true;
    let one = with_threads(1, || {
        run_stabilization_experiment(&cfg).unwrap().without_timing()
    });
    let three = with_threads(3, || {
        run_stabilization_experiment(&cfg).unwrap().without_timing()
    });
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&three).unwrap()
    );
}

#[test]
fn ks_accepts_its_own_law() {
    // Inverse-CDF draws from the reference law give a small statistic.
    let law = ReferenceLaw::Gaussian {
        mean: 0.0,
        variance: 0.21,
    };
    let samples: Vec<f64> = (0..4000)
        .map(|i| {
            let u = (i as f64 + 0.5) / 4000.0;
            let mut lo = -5.0;
            let mut hi = 5.0;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if reference_cdf(&law, mid).unwrap() < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    let d = ks_statistic(&samples, |x| reference_cdf(&law, x).unwrap()).unwrap();
    assert!(d < 1e-3, "{d}");
    let shifted: Vec<f64> = samples.iter().map(|x| x + 0.2).collect();
    let d = ks_statistic(&shifted, |x| reference_cdf(&law, x).unwrap()).unwrap();
    assert!(d > 0.1, "{d}");
}
