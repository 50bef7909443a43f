//! Acceptance criteria, each run at its stated tolerance. Prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use randpoly::correlator::{dlogx_dy, y_to_logx};
use randpoly::density::density_per_log_x;
use randpoly::experiments::localize::localize_spec;
use randpoly::experiments::stats::{fit_line, fit_power_with_offset};
use randpoly::experiments::verify::{
    compact_form_check, moments_check, run_oracle_gate, saddle_derivative_check, VerifyOptions,
    COMPACT_FORM_TOLERANCE, MOMENTS_TOLERANCE, SADDLE_DERIVATIVE_TOLERANCE,
};
use randpoly::experiments::{monte_carlo, ExperimentConfig, MonteCarloSummary};
use randpoly::quadrature::{mean_real_roots, DEFAULT_REL_TOL};
use randpoly::rootcount::ScanOptions;
use randpoly::{EnsembleSpec, Profile};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

const MC_SEEDS: u64 = 1000;

fn quad(spec: &EnsembleSpec) -> Result<f64, String> {
    mean_real_roots(spec, DEFAULT_REL_TOL)
        .map(|r| r.mean_count)
        .map_err(|e| format!("{spec}: {e}"))
}

fn mc(spec: &EnsembleSpec) -> Result<MonteCarloSummary, String> {
    monte_carlo(spec, 1..1 + MC_SEEDS, &ScanOptions::default(), 1000).map_err(|e| e.to_string())
}

/// `|mc - q|` in Monte Carlo standard errors.
fn sigmas(q: f64, m: &MonteCarloSummary) -> f64 {
    (m.mean - q).abs() / m.stderr
}

fn kac_phase() -> Outcome {
    let ns: Vec<usize> = (6..=12).map(|j| 1usize << j).collect();
    let mut counts = Vec::new();
    for &n in &ns {
        counts.push(quad(&EnsembleSpec::kac(n).unwrap())?);
    }
    let ln_n: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let fit = fit_line(&ln_n, &counts).ok_or("degenerate fit")?;
    Ok((
        (0.57..=0.70).contains(&fit.slope),
        format!(
            "slope {:.4} over n = 64..4096 (2/pi = {:.4})",
            fit.slope,
            2.0 / PI
        ),
    ))
}

fn intermediate_phase() -> Outcome {
    let ns = [64usize, 128, 256, 512];
    let mut counts = Vec::new();
    for &n in &ns {
        counts.push(quad(&EnsembleSpec::alpha(1.5, n).unwrap())?);
    }
    let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let fit = fit_power_with_offset(&nf, &counts, 0.05, 1.5).ok_or("degenerate fit")?;
    let target = (2.0 / PI) * (1.0f64 / 3.0).sqrt();
    let spec = EnsembleSpec::alpha(1.5, 64).unwrap();
    let m = mc(&spec)?;
    let z = sigmas(counts[0], &m);
    let ok = (fit.exponent - 0.75).abs() <= 0.05
        && (fit.amplitude / target - 1.0).abs() <= 0.15
        && z <= 3.0;
    Ok((
        ok,
        format!(
            "exponent {:.4}, amplitude {:.4} ({:+.1}% of {target:.4}), offset {:.3}; n=64 quadrature {:.4} vs MC {:.4} +- {:.4} ({z:.2} sigma)",
            fit.exponent,
            fit.amplitude,
            100.0 * (fit.amplitude / target - 1.0),
            fit.offset,
            counts[0],
            m.mean,
            m.stderr
        ),
    ))
}

fn condensed_phase() -> Outcome {
    let mut fractions = Vec::new();
    for n in [16usize, 32, 64] {
        fractions.push(quad(&EnsembleSpec::alpha(3.0, n).unwrap())? / n as f64);
    }
    let spec = EnsembleSpec::alpha(3.0, 32).unwrap();
    let q = fractions[1] * 32.0;
    let m = mc(&spec)?;
    let z = sigmas(q, &m);
    let ok = fractions.iter().all(|f| (0.9..=1.02).contains(f))
        && fractions.windows(2).all(|w| w[1] > w[0])
        && z <= 3.0;
    Ok((
        ok,
        format!(
            "<N>/n = {:.5}, {:.5}, {:.5} for n = 16, 32, 64; n=32 MC {:.4} +- {:.4} vs {q:.4} ({z:.2} sigma)",
            fractions[0], fractions[1], fractions[2], m.mean, m.stderr
        ),
    ))
}

fn localization() -> Outcome {
    let config = ExperimentConfig {
        alpha: vec![3.0],
        n: vec![32],
        samples: MC_SEEDS as usize,
        ..ExperimentConfig::default()
    };
    let report = localize_spec(&EnsembleSpec::alpha(3.0, 32).unwrap(), &config)
        .map_err(|e| e.to_string())?;
    let bulk: Vec<(usize, f64)> = report
        .intervals
        .iter()
        .filter(|o| (8..=28).contains(&o.k))
        .map(|o| (o.k, o.mean))
        .collect();
    let (lo, hi) = bulk
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, m)| {
            (lo.min(m), hi.max(m))
        });
    Ok((
        bulk.len() == 21 && bulk.iter().all(|&(_, m)| (0.9..=1.1).contains(&m)),
        format!(
            "occupancy for k = 8..28 in [{lo:.4}, {hi:.4}] over {} draws",
            report.seeds_used
        ),
    ))
}

/// `rho^(Y)` from the index variance, independent of the moment form.
fn rho_hat(spec: &EnsembleSpec, y: f64) -> f64 {
    density_per_log_x(spec, y_to_logx(spec, y).unwrap()) * dlogx_dy(spec, y).unwrap()
}

fn critical_family() -> Outcome {
    let mut residual = 0.0f64;
    for (mu, n) in [(0.05, 256usize), (1.0, 100), (20.0, 60)] {
        let spec = EnsembleSpec::mu(mu, n).unwrap();
        for i in 0..25 {
            let y = 0.4 * n as f64 + 0.173 * i as f64;
            let (a, b) = (rho_hat(&spec, y), rho_hat(&spec, y + 1.0));
            residual = residual.max((b - a).abs() / a);
        }
    }
    let small = quad(&EnsembleSpec::mu(0.05, 256).unwrap())? / 256.0;
    let target = (2.0f64 * 0.05).sqrt() / PI;
    let large = quad(&EnsembleSpec::mu(20.0, 64).unwrap())? / 64.0;
    let ok =
        residual < 1e-6 && (small / target - 1.0).abs() <= 0.10 && (0.9..=1.0).contains(&large);
    Ok((
        ok,
        format!(
            "periodicity residual {residual:.2e}; mu=0.05 n=256 <N>/n = {small:.5} ({:+.1}% of {target:.5}); mu=20 n=64 <N>/n = {large:.5}",
            100.0 * (small / target - 1.0)
        ),
    ))
}

fn equivalences() -> Outcome {
    let checks = [
        compact_form_check(1.0),
        moments_check(),
        saddle_derivative_check(),
    ];
    let tolerances = [
        COMPACT_FORM_TOLERANCE,
        MOMENTS_TOLERANCE,
        SADDLE_DERIVATIVE_TOLERANCE,
    ];
    let ok = tolerances == [1e-4, 1e-8, 1e-6] && checks.iter().all(|c| c.passed);
    let detail = checks
        .iter()
        .map(|c| format!("{} {:.2e}", c.name, c.measured))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, detail))
}

fn oracle_gate() -> Outcome {
    let gate = run_oracle_gate(&VerifyOptions::default()).map_err(|e| e.to_string())?;
    for d in &gate.discrepancies {
        println!(
            "    discrepancy: seed {} {}: scan {} exact {}",
            d.seed, d.spec, d.scan_count, d.exact_count
        );
    }
    Ok((
        gate.draws == 500 && gate.agreements >= 499,
        format!(
            "{}/{} draws agree, {} escalated by the scan",
            gate.agreements, gate.draws, gate.escalated
        ),
    ))
}

fn trivial_integrals() -> Outcome {
    let profiles = [
        Profile::Alpha { alpha: 0.0 },
        Profile::Alpha { alpha: 0.7 },
        Profile::Alpha { alpha: 1.0 },
        Profile::Alpha { alpha: 1.5 },
        Profile::Alpha { alpha: 2.0 },
        Profile::Alpha { alpha: 3.0 },
        Profile::Alpha { alpha: 6.0 },
        Profile::Mu { mu: 0.05 },
        Profile::Mu { mu: 20.0 },
        Profile::Kac,
        Profile::Weyl,
    ];
    let mut worst = 0.0f64;
    for p in profiles {
        worst = worst.max((quad(&EnsembleSpec::new(p, 1).unwrap())? - 1.0).abs());
    }
    Ok((
        worst <= 1e-6,
        format!(
            "max |<N_1> - 1| = {worst:.2e} over {} profiles",
            profiles.len()
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("kac phase", kac_phase),
        ("intermediate phase", intermediate_phase),
        ("condensed phase", condensed_phase),
        ("localization", localization),
        ("critical family", critical_family),
        ("formula equivalences", equivalences),
        ("oracle gate", oracle_gate),
        ("trivial integrals", trivial_integrals),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {}. {name}: {detail} [{:.1} s]",
            i + 1,
            start.elapsed().as_secs_f64()
        );
        failures += usize::from(!passed);
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
