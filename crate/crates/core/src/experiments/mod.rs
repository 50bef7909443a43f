//! Orchestration of the numerical experiments: phase sweeps, localization
//! studies and the cross-validation suite, plus their CSV and NDJSON
//! output.
//!
//! Every cell and seed runs on the rayon pool; results are collected in
//! cell order and then seed order, so outputs are byte-identical for a
//! given configuration.

pub mod config;
pub mod localize;
pub mod output;
pub mod stats;
pub mod sweep;
pub mod verify;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleSpec, Profile};
use crate::error::Result;
use crate::rootcount::{count_real_roots_with, RootCountSample, ScanOptions};

pub use config::{DensityGrid, ExperimentConfig, Format};
pub use localize::{run_localization_study, LocalizationReport};
pub use sweep::{run_phase_sweep, SweepResult};
pub use verify::{run_verification_suite, VerificationReport, VerifyOptions};

/// Version string embedded in every output file.
pub const VERSION: &str = env!("RANDPOLY_VERSION");

/// Counts every seed in `seeds` for `spec`, in seed order.
pub fn count_samples(
    spec: &EnsembleSpec,
    seeds: std::ops::Range<u64>,
    scan: &ScanOptions,
) -> Result<Vec<RootCountSample>> {
    seeds
        .collect::<Vec<u64>>()
        .par_iter()
        .map(|&seed| count_real_roots_with(&spec.sample(seed), scan))
        .collect()
}

/// Sample mean of the root count with its bootstrap standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub mean: f64,
    pub stderr: f64,
    pub seeds_used: usize,
    /// Draws settled by the exact oracle.
    pub escalated: usize,
    /// Draws with at least one cell counted without a certificate.
    pub uncertified: usize,
}

impl MonteCarloSummary {
    /// The bootstrap generator is seeded from the first seed so that the
    /// standard error is reproducible along with the counts.
    pub fn from_samples(samples: &[RootCountSample], resamples: usize) -> Self {
        let counts: Vec<f64> = samples.iter().map(|s| s.total_count as f64).collect();
        let boot_seed = samples.first().map_or(0, |s| s.seed);
        MonteCarloSummary {
            mean: stats::mean(&counts),
            stderr: stats::bootstrap_stderr(&counts, resamples, boot_seed),
            seeds_used: samples.len(),
            escalated: samples
                .iter()
                .filter(|s| s.flags.escalated_to_oracle)
                .count(),
            uncertified: samples.iter().filter(|s| s.uncertified_cells > 0).count(),
        }
    }
}

/// Mean root count over `seeds`.
pub fn monte_carlo(
    spec: &EnsembleSpec,
    seeds: std::ops::Range<u64>,
    scan: &ScanOptions,
    resamples: usize,
) -> Result<MonteCarloSummary> {
    let mut quiet = *scan;
    quiet.tallies = false;
    let samples = count_samples(spec, seeds, &quiet)?;
    Ok(MonteCarloSummary::from_samples(&samples, resamples))
}

/// Short file-name-safe label such as `alpha1.5_n64`.
pub fn spec_tag(spec: &EnsembleSpec) -> String {
    let p = match spec.profile {
        Profile::Alpha { alpha } => format!("alpha{alpha}"),
        Profile::Mu { mu } => format!("mu{mu}"),
        Profile::Weyl => "weyl".to_string(),
        Profile::Kac => "kac".to_string(),
    };
    format!("{p}_n{}", spec.degree)
}
