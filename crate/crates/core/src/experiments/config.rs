//! Experiment configuration, read from TOML and overridden by CLI flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::density::{Coordinate, Method};
use crate::ensemble::{EnsembleSpec, Profile};
use crate::error::{Error, Result};
use crate::rootcount::ScanOptions;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Grid for `density` runs. Unset fields are chosen per ensemble: the `Y`
/// coordinate with the moment form over `[0.5, n - 0.5]` when the profile
/// has a saddle, otherwise `ln x` with the direct form from two units below
/// the inner crossover to two above the outer one.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityGrid {
    pub coordinate: Option<Coordinate>,
    pub method: Option<Method>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
}

/// A [`DensityGrid`] with every choice made.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedGrid {
    pub coordinate: Coordinate,
    pub method: Method,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn resolve(&self, spec: &EnsembleSpec) -> ResolvedGrid {
        let coordinate = self.coordinate.unwrap_or(if spec.has_saddle() {
            Coordinate::Y
        } else {
            Coordinate::Logx
        });
        let method = self.method.unwrap_or(match coordinate {
            Coordinate::Y => Method::ExactMoments,
            _ => Method::ExactDirect,
        });
        let (lo, hi) = match coordinate {
            Coordinate::Y => (0.5, spec.degree as f64 - 0.5),
            Coordinate::Logx => (
                spec.inner_edge_logx().min(0.0) - 2.0,
                spec.edge_logx().max(0.0) + 2.0,
            ),
            Coordinate::X => (0.0, spec.edge_logx().max(0.0).exp() * 1.5),
        };
        let from = self.from.unwrap_or(lo);
        let to = self.to.unwrap_or(hi);
        let points = self.points.unwrap_or(200).max(1);
        let values = if points == 1 {
            vec![from]
        } else {
            (0..points)
                .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
                .collect()
        };
        ResolvedGrid {
            coordinate,
            method,
            values,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seeds are `seed_base, seed_base + 1, ...`.
    pub seed_base: u64,
    /// Monte Carlo draws per cell.
    pub samples: usize,
    pub alpha: Vec<f64>,
    pub mu: Vec<f64>,
    pub kac: bool,
    pub weyl: bool,
    pub n: Vec<usize>,
    /// Not embedded in output headers.
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
    pub format: Format,
    pub rel_tol: f64,
    /// Cells with larger `n` are run by quadrature only.
    pub mc_max_n: usize,
    /// Fits use only cells with `n >= fit_min_n`.
    pub fit_min_n: usize,
    pub bootstrap_resamples: usize,
    pub scan: ScanOptions,
    pub density: DensityGrid,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed_base: 1,
            samples: 1000,
            alpha: vec![1.5],
            mu: Vec::new(),
            kac: false,
            weyl: false,
            n: vec![64],
            out_dir: PathBuf::from("out"),
            format: Format::Csv,
            rel_tol: 1e-8,
            mc_max_n: 512,
            fit_min_n: 64,
            bootstrap_resamples: 1000,
            scan: ScanOptions::default(),
            density: DensityGrid::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Every profile named by the configuration, in a fixed order.
    pub fn profiles(&self) -> Vec<Profile> {
        let mut out: Vec<Profile> = self
            .alpha
            .iter()
            .map(|&alpha| Profile::Alpha { alpha })
            .collect();
        out.extend(self.mu.iter().map(|&mu| Profile::Mu { mu }));
        if self.kac {
            out.push(Profile::Kac);
        }
        if self.weyl {
            out.push(Profile::Weyl);
        }
        out
    }

    /// The `(profile, n)` grid, profile-major.
    pub fn specs(&self) -> Result<Vec<EnsembleSpec>> {
        let mut out = Vec::new();
        for p in self.profiles() {
            for &n in &self.n {
                out.push(EnsembleSpec::new(p, n)?);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        if self.n.is_empty() || self.profiles().is_empty() {
            return Err(Error::Config(
                "need at least one profile and one degree".into(),
            ));
        }
        if !(self.rel_tol > 1e-10 && self.rel_tol < 1e-2) {
            return Err(Error::Config(format!(
                "rel_tol {} outside (1e-10, 1e-2)",
                self.rel_tol
            )));
        }
        if self.scan.grid_points_per_unit_y < 4 {
            return Err(Error::Config(
                "scan.grid_points_per_unit_y must be at least 4".into(),
            ));
        }
        self.specs().map(|_| ())
    }

    pub fn seeds(&self) -> std::ops::Range<u64> {
        self.seed_base..self.seed_base + self.samples as u64
    }
}
