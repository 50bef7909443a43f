//! Cross-checks between independent evaluations of the same quantities.
//!
//! Each check reports its worst measured deviation against a fixed
//! tolerance. Failures are report entries, never errors.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::monte_carlo;
use crate::correlator::{self, dlogx_dy, du_star_dx, u_star, y_to_logx};
use crate::density::{direct_log_density_per_log_x, exact_direct_per_log_x, exact_moments};
use crate::ensemble::{EnsembleSpec, Profile};
use crate::error::Result;
use crate::quadrature::{mean_real_roots, DEFAULT_REL_TOL};
use crate::rootcount::{count_real_roots_with, ScanOptions, SturmChain};

pub const COMPACT_FORM_TOLERANCE: f64 = 1e-4;
pub const MOMENTS_TOLERANCE: f64 = 1e-8;
pub const SADDLE_DERIVATIVE_TOLERANCE: f64 = 1e-6;
pub const PERIODICITY_TOLERANCE: f64 = 1e-6;
pub const TRIVIAL_COUNT_TOLERANCE: f64 = 1e-6;
/// Monte Carlo means must lie within this many standard errors.
pub const MC_SIGMAS: f64 = 3.0;
/// Bulk points for the equivalence checks need `Var k` at least this large.
const MIN_INDEX_VARIANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed_base: u64,
    /// Multiplies `c''` in the termwise density; anything but 1 must make
    /// the compact-form check fail.
    pub c2_scale: f64,
    pub oracle_draws: usize,
    /// Degrees `2..=oracle_max_n` are cycled through in the oracle gate.
    pub oracle_max_n: usize,
    pub mc_samples: usize,
    pub mc_degree: usize,
    pub bootstrap_resamples: usize,
    pub scan: ScanOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed_base: 1,
            c2_scale: 1.0,
            oracle_draws: 500,
            oracle_max_n: 25,
            mc_samples: 400,
            mc_degree: 16,
            bootstrap_resamples: 1000,
            scan: ScanOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst deviation seen (relative unless the check says otherwise).
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn within(name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail,
        }
    }
}

/// A draw where the sign scan and the exact oracle disagree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub seed: u64,
    pub spec: EnsembleSpec,
    pub scan_count: usize,
    pub exact_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleGate {
    pub draws: usize,
    pub agreements: usize,
    /// Draws the scan itself handed to the oracle.
    pub escalated: usize,
    pub discrepancies: Vec<Discrepancy>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub oracle: OracleGate,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `(1/pi) sqrt(d_u d_v ln c_n(sqrt(u v)))` at `u = v = x`, by central
/// differences with step `h = 1e-4 x`, returned per unit `ln x`.
///
/// `ln c_n` is differenced relative to its value at `(x, x)`, in the
/// normalized weights, so the large common part cancels exactly.
pub fn compact_form_by_differences(spec: &EnsembleSpec, logx: f64) -> f64 {
    let lw = correlator::log_weights(spec, logx);
    let top = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let p: Vec<f64> = lw.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = p.iter().sum();
    // ln c(sqrt(u v)) - ln c(x) with ln(u v / x^2) = s
    let shifted = |s: f64| -> f64 {
        let sum: f64 = p
            .iter()
            .enumerate()
            .map(|(k, w)| w * (k as f64 * s).exp())
            .sum();
        (sum / z).ln()
    };
    let h: f64 = 1e-4;
    let (up, down) = (h.ln_1p(), (-h).ln_1p());
    let mixed =
        (shifted(2.0 * up) - 2.0 * shifted(up + down) + shifted(2.0 * down)) / (4.0 * h * h);
    // d_u d_v in units of x^2, so x rho = sqrt(mixed) / pi
    mixed.max(0.0).sqrt() / PI
}

/// Termwise density against the finite-difference log-derivative form at
/// bulk points of several profiles.
pub fn compact_form_check(c2_scale: f64) -> CheckResult {
    let specs = [
        EnsembleSpec::alpha(0.0, 12).unwrap(),
        EnsembleSpec::alpha(0.5, 40).unwrap(),
        EnsembleSpec::alpha(1.5, 40).unwrap(),
        EnsembleSpec::alpha(3.0, 20).unwrap(),
        EnsembleSpec::mu(1.0, 30).unwrap(),
        EnsembleSpec::kac(40).unwrap(),
        EnsembleSpec::weyl(25).unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut at = String::new();
    let mut points = 0usize;
    for spec in &specs {
        let lo = spec.inner_edge_logx().min(0.0) - 1.0;
        let hi = spec.edge_logx().max(0.0) + 1.0;
        for i in 0..=60 {
            let t = lo + (hi - lo) * i as f64 / 60.0;
            if correlator::index_variance(spec, t) < MIN_INDEX_VARIANCE {
                continue;
            }
            let compact = compact_form_by_differences(spec, t);
            let direct = match direct_log_density_per_log_x(spec, t, c2_scale) {
                Ok(v) => v.exp(),
                Err(_) => f64::INFINITY,
            };
            points += 1;
            let d = rel_diff(direct, compact);
            if !(d <= worst) {
                worst = d;
                at = format!("{spec} at ln x = {t:.4}");
            }
        }
    }
    CheckResult::within(
        "compact_form",
        worst,
        COMPACT_FORM_TOLERANCE,
        format!("{points} points; worst {at}"),
    )
}

/// Saddle-centred moment form against the termwise form, in `Y`.
pub fn moments_check() -> CheckResult {
    let specs = [
        EnsembleSpec::alpha(1.5, 40).unwrap(),
        EnsembleSpec::alpha(3.0, 30).unwrap(),
        EnsembleSpec::mu(0.5, 60).unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut at = String::new();
    let mut points = 0usize;
    for spec in &specs {
        let n = spec.degree as f64;
        for i in 0..=40 {
            let y = 0.1 * n + 0.8 * n * i as f64 / 40.0;
            let Ok(logx) = y_to_logx(spec, y) else {
                worst = f64::INFINITY;
                continue;
            };
            if correlator::index_variance(spec, logx) < MIN_INDEX_VARIANCE {
                continue;
            }
            points += 1;
            let res = (|| -> Result<f64> {
                let via_moments = exact_moments(spec, y)?;
                let via_direct = exact_direct_per_log_x(spec, logx)? * dlogx_dy(spec, y)?;
                Ok(rel_diff(via_moments, via_direct))
            })();
            let d = res.unwrap_or(f64::INFINITY);
            if !(d <= worst) {
                worst = d;
                at = format!("{spec} at Y = {y:.3}");
            }
        }
    }
    CheckResult::within(
        "moments_vs_direct",
        worst,
        MOMENTS_TOLERANCE,
        format!("{points} points; worst {at}"),
    )
}

/// `d/dx u*(sqrt(x y))` against central differences.
pub fn saddle_derivative_check() -> CheckResult {
    let specs = [
        EnsembleSpec::alpha(1.5, 50).unwrap(),
        EnsembleSpec::alpha(3.0, 50).unwrap(),
        EnsembleSpec::mu(0.3, 50).unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut at = String::new();
    for spec in &specs {
        for &(lx, ly) in &[(2.0, 3.0), (5.0, 4.0), (10.0, 12.0), (30.0, 25.0)] {
            let (x, y) = (f64::exp(lx), f64::exp(ly));
            let res = (|| -> Result<f64> {
                let h = 1e-4 * x;
                let u = |xx: f64| u_star(spec, 0.5 * (xx.ln() + y.ln()));
                let fd = (u(x + h)? - u(x - h)?) / (2.0 * h);
                Ok(rel_diff(du_star_dx(spec, x, y)?, fd))
            })();
            let d = res.unwrap_or(f64::INFINITY);
            if !(d <= worst) {
                worst = d;
                at = format!("{spec} at ln x = {lx}, ln y = {ly}");
            }
        }
    }
    CheckResult::within(
        "saddle_derivative",
        worst,
        SADDLE_DERIVATIVE_TOLERANCE,
        format!("worst {at}"),
    )
}

pub fn periodicity_check() -> CheckResult {
    let cases = [(0.05, 256usize), (1.0, 100), (20.0, 60)];
    let mut worst = 0.0f64;
    let mut at = String::new();
    for &(mu, n) in &cases {
        let spec = EnsembleSpec::mu(mu, n).unwrap();
        let start = 0.4 * n as f64;
        for i in 0..20 {
            let y = start + 0.137 * i as f64;
            let d = match (exact_moments(&spec, y), exact_moments(&spec, y + 1.0)) {
                (Ok(a), Ok(b)) => rel_diff(b, a),
                _ => f64::INFINITY,
            };
            if !(d <= worst) {
                worst = d;
                at = format!("{spec} at Y = {y:.3}");
            }
        }
    }
    CheckResult::within(
        "mu_periodicity",
        worst,
        PERIODICITY_TOLERANCE,
        format!("worst {at}"),
    )
}

/// `<N_1> = 1` for every profile (absolute deviation).
pub fn trivial_count_check() -> CheckResult {
    let profiles = [
        Profile::Alpha { alpha: 0.0 },
        Profile::Alpha { alpha: 0.5 },
        Profile::Alpha { alpha: 1.5 },
        Profile::Alpha { alpha: 3.0 },
        Profile::Mu { mu: 0.05 },
        Profile::Mu { mu: 20.0 },
        Profile::Kac,
        Profile::Weyl,
    ];
    let mut worst = 0.0f64;
    let mut at = String::new();
    for p in profiles {
        let spec = EnsembleSpec::new(p, 1).unwrap();
        let d = mean_real_roots(&spec, DEFAULT_REL_TOL)
            .map(|r| (r.mean_count - 1.0).abs())
            .unwrap_or(f64::INFINITY);
        if !(d <= worst) {
            worst = d;
            at = p.to_string();
        }
    }
    CheckResult::within(
        "degree_one_count",
        worst,
        TRIVIAL_COUNT_TOLERANCE,
        format!("absolute; worst {at}"),
    )
}

fn quadrature_vs_mc_check(options: &VerifyOptions) -> CheckResult {
    let n = options.mc_degree;
    let specs = [
        EnsembleSpec::alpha(0.0, n).unwrap(),
        EnsembleSpec::alpha(1.5, n).unwrap(),
        EnsembleSpec::alpha(3.0, n).unwrap(),
    ];
    let seeds = options.seed_base..options.seed_base + options.mc_samples as u64;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for spec in &specs {
        let z = match (
            mean_real_roots(spec, DEFAULT_REL_TOL),
            monte_carlo(
                spec,
                seeds.clone(),
                &options.scan,
                options.bootstrap_resamples,
            ),
        ) {
            (Ok(q), Ok(mc)) => {
                parts.push(format!(
                    "{spec}: {:.4} vs {:.4} +- {:.4}",
                    q.mean_count, mc.mean, mc.stderr
                ));
                (mc.mean - q.mean_count).abs() / mc.stderr
            }
            _ => f64::INFINITY,
        };
        worst = worst.max(z);
    }
    CheckResult::within(
        "quadrature_vs_monte_carlo",
        worst,
        MC_SIGMAS,
        format!("in standard errors; {}", parts.join("; ")),
    )
}

/// Degree and profile of oracle-gate draw `i`.
pub fn oracle_gate_spec(i: usize, max_n: usize) -> EnsembleSpec {
    let alpha = [0.0, 1.5, 3.0][i % 3];
    let n = 2 + (i / 3) % (max_n.max(2) - 1);
    EnsembleSpec::alpha(alpha, n).unwrap()
}

/// Compares the sign scan with the exact Sturm count on `draws` draws.
pub fn run_oracle_gate(options: &VerifyOptions) -> Result<OracleGate> {
    let mut scan = options.scan;
    scan.tallies = false;
    let limit = scan.oracle_limit.max(options.oracle_max_n);
    let outcomes: Vec<(bool, bool, Option<Discrepancy>)> = (0..options.oracle_draws)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let spec = oracle_gate_spec(i, options.oracle_max_n);
            let seed = options.seed_base + i as u64;
            let draw = spec.sample(seed);
            let counted = count_real_roots_with(&draw, &scan)?;
            let (neg, zero, pos) = SturmChain::from_draw(&draw, limit)?.axis_counts();
            let exact = neg + pos + usize::from(zero);
            let agree = counted.total_count == exact;
            let discrepancy = (!agree).then_some(Discrepancy {
                seed,
                spec,
                scan_count: counted.total_count,
                exact_count: exact,
            });
            Ok((agree, counted.flags.escalated_to_oracle, discrepancy))
        })
        .collect::<Result<_>>()?;
    Ok(OracleGate {
        draws: outcomes.len(),
        agreements: outcomes.iter().filter(|o| o.0).count(),
        escalated: outcomes.iter().filter(|o| o.1).count(),
        discrepancies: outcomes.into_iter().filter_map(|o| o.2).collect(),
    })
}

/// Runs every cross-check.
pub fn run_verification_suite(options: &VerifyOptions) -> Result<VerificationReport> {
    let mut checks = vec![
        compact_form_check(options.c2_scale),
        moments_check(),
        saddle_derivative_check(),
        periodicity_check(),
        trivial_count_check(),
        quadrature_vs_mc_check(options),
    ];
    let oracle = run_oracle_gate(options)?;
    // at most one disagreement per 500 draws
    let allowed = oracle.draws / 500;
    let misses = oracle.draws - oracle.agreements;
    checks.push(CheckResult {
        name: "oracle_gate".into(),
        passed: misses <= allowed,
        measured: misses as f64,
        tolerance: allowed as f64,
        detail: format!(
            "disagreements out of {} draws, {} escalated by the scan",
            oracle.draws, oracle.escalated
        ),
    });
    Ok(VerificationReport { checks, oracle })
}
