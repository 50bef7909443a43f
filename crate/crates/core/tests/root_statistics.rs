//! Statistical properties of the root counts over many seeds.

use proptest::prelude::*;

use randpoly::density::asympt_phase2;
use randpoly::experiments::localize::localize_spec;
use randpoly::experiments::{monte_carlo, ExperimentConfig};
use randpoly::quadrature::{expected_count_per_interval, mean_real_roots, DEFAULT_REL_TOL};
use randpoly::rootcount::{count_real_roots_with, ScanOptions, SturmChain};
use randpoly::EnsembleSpec;

#[test]
fn monte_carlo_mean_matches_quadrature() {
    let scan = ScanOptions::default();
    for spec in [
        EnsembleSpec::alpha(0.0, 64).unwrap(),
        EnsembleSpec::alpha(1.5, 64).unwrap(),
        EnsembleSpec::alpha(3.0, 32).unwrap(),
    ] {
        let q = mean_real_roots(&spec, DEFAULT_REL_TOL).unwrap();
        let m = monte_carlo(&spec, 10_000..20_000, &scan, 1000).unwrap();
        let combined = (m.stderr.powi(2) + q.estimated_error.powi(2)).sqrt();
        let z = (m.mean - q.mean_count).abs() / combined;
        assert!(
            z <= 3.0,
            "{spec}: {} vs {} +- {}",
            q.mean_count,
            m.mean,
            m.stderr
        );
    }
}

#[test]
fn condensed_intervals_hold_one_root_on_average() {
    let config = ExperimentConfig {
        samples: 1000,
        seed_base: 77,
        ..ExperimentConfig::default()
    };
    let spec = EnsembleSpec::alpha(3.0, 32).unwrap();
    let report = localize_spec(&spec, &config).unwrap();
    for o in report.intervals.iter().filter(|o| (8..=28).contains(&o.k)) {
        assert!((0.9..=1.1).contains(&o.mean), "k = {}: {}", o.k, o.mean);
    }
    let rates: Vec<f64> = report.sign_agreement[8..=28]
        .iter()
        .map(|s| s.rate)
        .collect();
    assert!(rates.iter().all(|&r| r > 0.95), "{rates:?}");
    // agreement can only saturate, so compare the ends of the bulk
    assert!(rates[rates.len() - 1] >= rates[0]);
}

#[test]
fn intermediate_phase_intervals_thin_out() {
    // expected count per interval against twice the integral of the
    // asymptotic density over the same cell, which decays as k^{(alpha-2)/2}
    let alpha = 1.5;
    let spec = EnsembleSpec::alpha(alpha, 400).unwrap();
    let mut pairs = Vec::new();
    for k in [40usize, 80, 160, 240] {
        let exact = expected_count_per_interval(&spec, k).unwrap();
        let simpson = (asympt_phase2(alpha, k as f64).unwrap()
            + 4.0 * asympt_phase2(alpha, k as f64 + 0.5).unwrap()
            + asympt_phase2(alpha, k as f64 + 1.0).unwrap())
            / 6.0;
        let asymptotic = 2.0 * simpson;
        assert!(exact < 0.5, "k = {k}: {exact}");
        assert!(
            (exact / asymptotic - 1.0).abs() < 0.05,
            "k = {k}: {exact} vs {asymptotic}"
        );
        pairs.push(((k as f64).ln(), exact.ln()));
    }
    let slope = (pairs[3].1 - pairs[0].1) / (pairs[3].0 - pairs[0].0);
    assert!((slope - 0.5 * (alpha - 2.0)).abs() < 0.05, "slope {slope}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn counts_are_bounded_and_have_the_parity_of_n(
        seed in 0u64..1_000_000,
        n in 1usize..40,
        which in 0usize..4,
    ) {
        let spec = match which {
            0 => EnsembleSpec::alpha(0.0, n),
            1 => EnsembleSpec::alpha(1.5, n),
            2 => EnsembleSpec::alpha(3.0, n),
            _ => EnsembleSpec::mu(0.5, n),
        }.unwrap();
        let draw = spec.sample(seed);
        let c = count_real_roots_with(&draw, &ScanOptions::default()).unwrap();
        prop_assert!(c.total_count <= n);
        prop_assert_eq!(c.total_count % 2, n % 2);
        prop_assert_eq!(c.total_count, c.positive_count + c.negative_count + usize::from(c.flags.zero_root));
        let tallied: u32 = c.interval_tallies.iter().flatten().map(|&(p, m)| p + m).sum();
        prop_assert!(tallied as usize <= c.total_count);
        if n <= 20 {
            let (neg, zero, pos) = SturmChain::from_draw(&draw, 64).unwrap().axis_counts();
            prop_assert_eq!((c.negative_count, c.positive_count), (neg, pos));
            prop_assert_eq!(c.flags.zero_root, zero);
        }
    }
}
