use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use randpoly::density::{Coordinate, DensityProfile, Method};
use randpoly::experiments::output::{self, Header, Table};
use randpoly::experiments::{
    count_samples, run_localization_study, run_phase_sweep, run_verification_suite,
    ExperimentConfig, Format, MonteCarloSummary, VerifyOptions, VERSION,
};
use randpoly::Result;

#[derive(Parser)]
#[command(name = "randpoly", version = VERSION, about = "Real roots of Gaussian random polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed_base: Option<u64>,
    /// Monte Carlo draws per cell.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Profile exponents, comma separated.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    alpha: Vec<f64>,
    /// Gaussian profile widths `exp(-mu k^2)`, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    mu: Vec<f64>,
    /// Include the Kac profile (all variances 1).
    #[arg(long, global = true)]
    kac: bool,
    /// Include the Weyl profile (variances 1/k!).
    #[arg(long, global = true)]
    weyl: bool,
    /// Degrees, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Relative tolerance of the quadrature.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Scan grid points per unit of Y.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Maximum bisection depth below a grid cell.
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Largest degree handed to the exact oracle.
    #[arg(long, global = true)]
    oracle_limit: Option<usize>,
    /// Largest degree that gets Monte Carlo in a sweep.
    #[arg(long, global = true)]
    mc_max_n: Option<usize>,
    /// Smallest degree used in the sweep fits.
    #[arg(long, global = true)]
    fit_min_n: Option<usize>,
    /// Bootstrap resamples for standard errors.
    #[arg(long, global = true)]
    bootstrap: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoordinateArg {
    X,
    Logx,
    Y,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    ExactDirect,
    ExactMoments,
    AsymptPhase2,
    AsymptPhase3,
    AsymptMu,
    Tail,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the mean root density.
    Density {
        #[arg(long, value_enum)]
        coordinate: Option<CoordinateArg>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Count the real roots of sampled polynomials.
    Count,
    /// Quadrature and Monte Carlo means over profiles and degrees, with fits.
    Sweep,
    /// Root occupancy per interval and sign agreement.
    Localize,
    /// Run the cross-validation suite.
    Verify {
        /// Factor applied to c'' in the termwise density (1 = uncorrupted).
        #[arg(long, default_value_t = 1.0)]
        c2_scale: f64,
        #[arg(long)]
        oracle_draws: Option<usize>,
        /// Largest degree in the oracle gate.
        #[arg(long)]
        oracle_max_n: Option<usize>,
    },
}

fn build_config(c: &Common) -> Result<ExperimentConfig> {
    let mut config = match &c.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if !c.alpha.is_empty() || !c.mu.is_empty() || c.kac || c.weyl {
        config.alpha = c.alpha.clone();
        config.mu = c.mu.clone();
        config.kac = c.kac;
        config.weyl = c.weyl;
    }
    if !c.n.is_empty() {
        config.n = c.n.clone();
    }
    if let Some(v) = c.seed_base {
        config.seed_base = v;
    }
    if let Some(v) = c.samples {
        config.samples = v;
    }
    if let Some(v) = &c.out_dir {
        config.out_dir = v.clone();
    }
    if let Some(f) = c.format {
        config.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(v) = c.rel_tol {
        config.rel_tol = v;
    }
    if let Some(v) = c.grid {
        config.scan.grid_points_per_unit_y = v;
    }
    if let Some(v) = c.depth {
        config.scan.max_refine_depth = v;
    }
    if let Some(v) = c.oracle_limit {
        config.scan.oracle_limit = v;
    }
    if let Some(v) = c.mc_max_n {
        config.mc_max_n = v;
    }
    if let Some(v) = c.fit_min_n {
        config.fit_min_n = v;
    }
    if let Some(v) = c.bootstrap {
        config.bootstrap_resamples = v;
    }
    Ok(config)
}

fn write_all(config: &ExperimentConfig, header: &Header, tables: &[Table]) -> Result<()> {
    for t in tables {
        let path = output::write_table(&config.out_dir, header, t, config.format)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Runs one subcommand; `Ok(false)` means it completed with failures.
fn run(cli: Cli) -> Result<bool> {
    let mut config = build_config(&cli.common)?;
    match cli.command {
        Command::Density {
            coordinate,
            method,
            from,
            to,
            points,
        } => {
            if let Some(c) = coordinate {
                config.density.coordinate = Some(match c {
                    CoordinateArg::X => Coordinate::X,
                    CoordinateArg::Logx => Coordinate::Logx,
                    CoordinateArg::Y => Coordinate::Y,
                });
            }
            if let Some(m) = method {
                config.density.method = Some(match m {
                    MethodArg::ExactDirect => Method::ExactDirect,
                    MethodArg::ExactMoments => Method::ExactMoments,
                    MethodArg::AsymptPhase2 => Method::AsymptPhase2,
                    MethodArg::AsymptPhase3 => Method::AsymptPhase3,
                    MethodArg::AsymptMu => Method::AsymptMu,
                    MethodArg::Tail => Method::Tail,
                });
            }
            config.density.from = from.or(config.density.from);
            config.density.to = to.or(config.density.to);
            config.density.points = points.or(config.density.points);
            config.validate()?;
            let mut ok = true;
            for spec in config.specs()? {
                let grid = config.density.resolve(&spec);
                match DensityProfile::evaluate(&spec, grid.coordinate, grid.method, &grid.values) {
                    Ok(profile) => {
                        let header = Header::new("density", &config, vec![spec]);
                        write_all(&config, &header, &[output::density_table(&profile)])?;
                    }
                    Err(e) => {
                        eprintln!("{spec}: {e}");
                        ok = false;
                    }
                }
            }
            Ok(ok)
        }
        Command::Count => {
            config.validate()?;
            let mut summaries = Vec::new();
            for spec in config.specs()? {
                let samples = count_samples(&spec, config.seeds(), &config.scan)?;
                let summary = MonteCarloSummary::from_samples(&samples, config.bootstrap_resamples);
                println!(
                    "{spec}: mean {:.6} +- {:.6} over {} draws",
                    summary.mean, summary.stderr, summary.seeds_used
                );
                let header = Header::new("count", &config, vec![spec]);
                write_all(&config, &header, &[output::count_table(&spec, &samples)])?;
                summaries.push((spec, summary));
            }
            let header = Header::new("count", &config, config.specs()?);
            write_all(&config, &header, &[output::count_summary_table(&summaries)])?;
            Ok(true)
        }
        Command::Sweep => {
            let result = run_phase_sweep(&config)?;
            for c in &result.cells {
                let mc = c.monte_carlo.as_ref().map_or_else(
                    || "-".to_string(),
                    |m| format!("{:.4} +- {:.4}", m.mean, m.stderr),
                );
                let q = c
                    .quadrature
                    .map_or_else(|| "-".to_string(), |q| format!("{q:.6}"));
                println!("{}: quadrature {q}, monte carlo {mc}", c.spec);
                for e in &c.errors {
                    eprintln!("{}: {e}", c.spec);
                }
            }
            let header = Header::new("sweep", &config, config.specs()?);
            write_all(&config, &header, &output::sweep_tables(&result))?;
            let path = output::write_timings(&config.out_dir, &result)?;
            println!("wrote {}", path.display());
            Ok(!result.any_failed())
        }
        Command::Localize => {
            for report in run_localization_study(&config)? {
                let bulk: Vec<f64> = report.bulk().map(|o| o.mean).collect();
                let lo = bulk.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = bulk.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                println!("{}: bulk occupancy in [{lo:.4}, {hi:.4}]", report.spec);
                let header = Header::new("localize", &config, vec![report.spec]);
                write_all(&config, &header, &output::localization_tables(&report))?;
            }
            Ok(true)
        }
        Command::Verify {
            c2_scale,
            oracle_draws,
            oracle_max_n,
        } => {
            config.validate()?;
            let defaults = VerifyOptions::default();
            let options = VerifyOptions {
                seed_base: config.seed_base,
                c2_scale,
                oracle_draws: oracle_draws.unwrap_or(defaults.oracle_draws),
                oracle_max_n: oracle_max_n.unwrap_or(defaults.oracle_max_n),
                mc_samples: cli.common.samples.unwrap_or(defaults.mc_samples),
                mc_degree: cli.common.n.first().copied().unwrap_or(defaults.mc_degree),
                bootstrap_resamples: config.bootstrap_resamples,
                scan: config.scan,
            };
            let report = run_verification_suite(&options)?;
            for c in &report.checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "{verdict} {}: {:e} (tolerance {:e}) {}",
                    c.name, c.measured, c.tolerance, c.detail
                );
            }
            for d in &report.oracle.discrepancies {
                eprintln!(
                    "oracle discrepancy: seed {} {}: scan {} exact {}",
                    d.seed, d.spec, d.scan_count, d.exact_count
                );
            }
            let header = Header::new("verify", &options, Vec::new());
            write_all(&config, &header, &output::verification_tables(&report))?;
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
