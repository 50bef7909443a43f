//! Occupancy of the intervals `[x_k, x_{k+1}]` and agreement between the
//! sign of `P_n(x_m)` and the sign of its dominant coefficient.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::count_samples;
use super::stats::{bootstrap_stderr, mean};
use crate::correlator::y_to_logx;
use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::quadrature::expected_count_per_interval;
use crate::rootcount::sign_agreement;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalOccupancy {
    pub k: usize,
    pub logx_lo: f64,
    pub logx_hi: f64,
    /// Mean number of roots in `[x_k, x_{k+1}]` and its mirror.
    pub mean: f64,
    pub stderr: f64,
    /// The same expectation by quadrature (for `1 <= k < n`).
    pub expected: Option<f64>,
    /// `histogram[j]` draws had exactly `j` roots in the pair of intervals.
    pub histogram: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignAgreement {
    pub m: usize,
    /// Fraction of draws with `sign P_n(x_m) = sign a_m`.
    pub rate: f64,
    /// Draws where the sign of `P_n(x_m)` was resolved.
    pub resolved: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub spec: EnsembleSpec,
    pub seeds_used: usize,
    pub intervals: Vec<IntervalOccupancy>,
    pub sign_agreement: Vec<SignAgreement>,
}

impl LocalizationReport {
    /// Intervals away from both ends: `n/4 <= k <= n - 4`, and `k >= 2`.
    pub fn bulk(&self) -> impl Iterator<Item = &IntervalOccupancy> {
        let n = self.spec.degree;
        self.intervals
            .iter()
            .filter(move |o| o.k >= 2 && 4 * o.k >= n && o.k + 4 <= n)
    }
}

/// Localization statistics for one saddle-profile ensemble.
pub fn localize_spec(spec: &EnsembleSpec, config: &ExperimentConfig) -> Result<LocalizationReport> {
    if !spec.has_saddle() {
        return Err(Error::UnsupportedProfile(spec.profile.to_string()));
    }
    let mut scan = config.scan;
    scan.tallies = true;
    let samples = count_samples(spec, config.seeds(), &scan)?;
    let n = spec.degree;
    let draws = samples.len();

    let mut per_k: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); n];
    for s in &samples {
        let tallies = s
            .interval_tallies
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("scan returned no interval tallies".into()))?;
        for (k, &(pos, neg)) in tallies.iter().enumerate() {
            per_k[k].push(f64::from(pos + neg));
        }
    }
    let intervals = per_k
        .iter()
        .enumerate()
        .map(|(k, occ)| -> Result<IntervalOccupancy> {
            let mut histogram = Vec::new();
            for &o in occ {
                let j = o as usize;
                if histogram.len() <= j {
                    histogram.resize(j + 1, 0);
                }
                histogram[j] += 1;
            }
            let expected = if k >= 1 {
                Some(expected_count_per_interval(spec, k)?)
            } else {
                None
            };
            Ok(IntervalOccupancy {
                k,
                logx_lo: y_to_logx(spec, k as f64)?,
                logx_hi: y_to_logx(spec, (k + 1) as f64)?,
                mean: mean(occ),
                stderr: bootstrap_stderr(
                    occ,
                    config.bootstrap_resamples,
                    config.seed_base + k as u64,
                ),
                expected,
                histogram,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut agree = vec![0usize; n + 1];
    let mut resolved = vec![0usize; n + 1];
    for seed in config.seeds() {
        for (m, a) in sign_agreement(&spec.sample(seed))?.into_iter().enumerate() {
            if let Some(same) = a {
                resolved[m] += 1;
                agree[m] += usize::from(same);
            }
        }
    }
    let sign_agreement = (0..=n)
        .map(|m| SignAgreement {
            m,
            rate: agree[m] as f64 / resolved[m].max(1) as f64,
            resolved: resolved[m],
        })
        .collect();

    Ok(LocalizationReport {
        spec: *spec,
        seeds_used: draws,
        intervals,
        sign_agreement,
    })
}

/// Runs [`localize_spec`] for every saddle-profile cell of `config`.
/// Profiles without a `Y` coordinate (Kac, Weyl, `alpha <= 1`) are rejected.
pub fn run_localization_study(config: &ExperimentConfig) -> Result<Vec<LocalizationReport>> {
    config.validate()?;
    let specs = config.specs()?;
    if let Some(bad) = specs.iter().find(|s| !s.has_saddle()) {
        return Err(Error::UnsupportedProfile(bad.profile.to_string()));
    }
    specs.iter().map(|s| localize_spec(s, config)).collect()
}
