//! Mean root counts over a grid of profiles and degrees, with the
//! regression appropriate to each phase.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::stats::{fit_line, fit_power, fit_power_with_offset, LineFit, PowerFit};
use super::{monte_carlo, MonteCarloSummary};
use crate::ensemble::{EnsembleSpec, Profile};
use crate::error::Result;
use crate::quadrature::mean_real_roots;

/// Search range for the exponent of the offset power fit.
const POWER_EXPONENT_RANGE: (f64, f64) = (0.05, 1.5);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub spec: EnsembleSpec,
    pub quadrature: Option<f64>,
    pub quadrature_error: Option<f64>,
    pub monte_carlo: Option<MonteCarloSummary>,
    /// Why the Monte Carlo part was not run.
    pub skip_reason: Option<String>,
    /// Failures of either part; the sweep carries on past them.
    pub errors: Vec<String>,
    /// Seconds spent on the cell. Not serialized with the cell, so that
    /// outputs stay deterministic; see [`SweepResult::timings`].
    #[serde(skip)]
    pub wallclock: f64,
}

impl SweepCell {
    pub fn failed(&self) -> bool {
        !self.errors.is_empty()
    }
}

/// Growth law fitted for one profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    /// `<N> = slope ln n + intercept`.
    Logarithmic,
    /// `<N> = A n^b (+ C)`.
    Power,
    /// `<N> = slope n + intercept`, with the fractions `<N>/n` alongside.
    Linear,
    /// No law is asserted, as at `alpha = 1`.
    None,
}

pub fn law_for(profile: &Profile) -> Law {
    match *profile {
        Profile::Kac => Law::Logarithmic,
        Profile::Alpha { alpha } if alpha < 1.0 => Law::Logarithmic,
        Profile::Alpha { alpha } if alpha > 1.0 && alpha < 2.0 => Law::Power,
        Profile::Alpha { alpha } if alpha >= 2.0 => Law::Linear,
        Profile::Mu { .. } => Law::Linear,
        Profile::Weyl => Law::Power,
        Profile::Alpha { .. } => Law::None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub profile: Profile,
    pub law: Law,
    /// Cells with `n` below this were left out.
    pub min_n: usize,
    pub degrees: Vec<usize>,
    /// Logarithmic and linear laws.
    pub line: Option<LineFit>,
    /// Power law with a constant offset.
    pub power: Option<PowerFit>,
    /// Power law fitted on log-log axes, without offset.
    pub power_loglog: Option<PowerFit>,
    /// `<N>/n` per degree, for the linear law.
    pub fractions: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub fits: Vec<FitSummary>,
}

impl SweepResult {
    pub fn any_failed(&self) -> bool {
        self.cells.iter().any(SweepCell::failed)
    }

    /// `(spec, seconds)` per cell, for the timing sidecar.
    pub fn timings(&self) -> Vec<(EnsembleSpec, f64)> {
        self.cells.iter().map(|c| (c.spec, c.wallclock)).collect()
    }
}

fn run_cell(spec: EnsembleSpec, config: &ExperimentConfig) -> SweepCell {
    let start = Instant::now();
    let mut cell = SweepCell {
        spec,
        quadrature: None,
        quadrature_error: None,
        monte_carlo: None,
        skip_reason: None,
        errors: Vec::new(),
        wallclock: 0.0,
    };
    match mean_real_roots(&spec, config.rel_tol) {
        Ok(r) => {
            cell.quadrature = Some(r.mean_count);
            cell.quadrature_error = Some(r.estimated_error);
        }
        Err(e) => cell.errors.push(format!("quadrature: {e}")),
    }
    if spec.degree > config.mc_max_n {
        cell.skip_reason = Some(format!("n above mc_max_n = {}", config.mc_max_n));
    } else {
        match monte_carlo(
            &spec,
            config.seeds(),
            &config.scan,
            config.bootstrap_resamples,
        ) {
            Ok(s) => cell.monte_carlo = Some(s),
            Err(e) => cell.errors.push(format!("monte carlo: {e}")),
        }
    }
    cell.wallclock = start.elapsed().as_secs_f64();
    cell
}

/// Fits the phase law of `profile` to the quadrature values of `cells`.
pub fn fit_profile(profile: Profile, cells: &[SweepCell], min_n: usize) -> FitSummary {
    let (degrees, values): (Vec<usize>, Vec<f64>) = cells
        .iter()
        .filter(|c| c.spec.profile == profile && c.spec.degree >= min_n)
        .filter_map(|c| c.quadrature.map(|q| (c.spec.degree, q)))
        .unzip();
    let ns: Vec<f64> = degrees.iter().map(|&n| n as f64).collect();
    let law = law_for(&profile);
    let mut fit = FitSummary {
        profile,
        law,
        min_n,
        degrees: degrees.clone(),
        line: None,
        power: None,
        power_loglog: None,
        fractions: Vec::new(),
    };
    match law {
        Law::Logarithmic => {
            let ln_n: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
            fit.line = fit_line(&ln_n, &values);
        }
        Law::Power => {
            fit.power =
                fit_power_with_offset(&ns, &values, POWER_EXPONENT_RANGE.0, POWER_EXPONENT_RANGE.1);
            fit.power_loglog = fit_power(&ns, &values);
        }
        Law::Linear => {
            fit.line = fit_line(&ns, &values);
            fit.fractions = values.iter().zip(&ns).map(|(v, n)| v / n).collect();
        }
        Law::None => {}
    }
    fit
}

/// Quadrature and Monte Carlo means for every `(profile, n)` of `config`.
/// Cell failures are recorded in the result; only an invalid configuration
/// is an error.
pub fn run_phase_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let specs = config.specs()?;
    let cells: Vec<SweepCell> = specs.par_iter().map(|&s| run_cell(s, config)).collect();
    let fits = config
        .profiles()
        .into_iter()
        .map(|p| fit_profile(p, &cells, config.fit_min_n))
        .collect();
    Ok(SweepResult { cells, fits })
}
