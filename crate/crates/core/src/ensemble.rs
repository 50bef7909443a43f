//! The random-polynomial family and reproducible coefficient draws.
//!
//! Coefficients are `a_k = g_k * exp(logVariance(k) / 2)` with `g_k` i.i.d.
//! standard normal. The draw keeps `a_k` in signed log form so profiles with
//! super-exponentially small variances never materialize an underflowing
//! float.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lognum::SignedLogValue;

/// Variance profile `<a_k^2>` of the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    /// `exp(-k^alpha)`, with the `k = 0` term fixed to 1.
    Alpha { alpha: f64 },
    /// `exp(-mu k^2)`.
    Mu { mu: f64 },
    /// `1 / k!`.
    Weyl,
    /// All variances equal to 1.
    Kac,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Alpha { alpha } => write!(f, "alpha={alpha}"),
            Profile::Mu { mu } => write!(f, "mu={mu}"),
            Profile::Weyl => write!(f, "weyl"),
            Profile::Kac => write!(f, "kac"),
        }
    }
}

/// A profile together with the polynomial degree `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub profile: Profile,
    pub degree: usize,
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={}", self.profile, self.degree)
    }
}

impl EnsembleSpec {
    pub fn new(profile: Profile, degree: usize) -> Result<Self> {
        let spec = EnsembleSpec { profile, degree };
        spec.validate()?;
        Ok(spec)
    }

    pub fn alpha(alpha: f64, degree: usize) -> Result<Self> {
        Self::new(Profile::Alpha { alpha }, degree)
    }

    pub fn mu(mu: f64, degree: usize) -> Result<Self> {
        Self::new(Profile::Mu { mu }, degree)
    }

    pub fn weyl(degree: usize) -> Result<Self> {
        Self::new(Profile::Weyl, degree)
    }

    pub fn kac(degree: usize) -> Result<Self> {
        Self::new(Profile::Kac, degree)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::InvalidSpec("degree must be at least 1".into()));
        }
        match self.profile {
            Profile::Alpha { alpha } if !(alpha.is_finite() && alpha >= 0.0) => Err(
                Error::InvalidSpec(format!("alpha must be finite and >= 0, got {alpha}")),
            ),
            Profile::Mu { mu } if !(mu.is_finite() && mu > 0.0) => Err(Error::InvalidSpec(
                format!("mu must be finite and > 0, got {mu}"),
            )),
            _ => Ok(()),
        }
    }

    /// `ln <a_k^2>`.
    pub fn log_variance(&self, k: usize) -> Result<f64> {
        if k > self.degree {
            return Err(Error::IndexOutOfRange {
                k,
                degree: self.degree,
            });
        }
        Ok(match self.profile {
            Profile::Alpha { .. } | Profile::Mu { .. } | Profile::Kac => {
                self.log_variance_unchecked(k)
            }
            Profile::Weyl => -(2..=k).map(|j| (j as f64).ln()).sum::<f64>(),
        })
    }

    fn log_variance_unchecked(&self, k: usize) -> f64 {
        match self.profile {
            Profile::Alpha { alpha } => {
                if k == 0 {
                    0.0
                } else {
                    -(k as f64).powf(alpha)
                }
            }
            Profile::Mu { mu } => -mu * (k * k) as f64,
            Profile::Weyl => -(2..=k).map(|j| (j as f64).ln()).sum::<f64>(),
            Profile::Kac => 0.0,
        }
    }

    /// `ln <a_k^2>` for every `k` in `0..=n`.
    pub fn log_variances(&self) -> Vec<f64> {
        match self.profile {
            Profile::Weyl => {
                let mut out = Vec::with_capacity(self.degree + 1);
                let mut acc = 0.0;
                out.push(0.0);
                for k in 1..=self.degree {
                    acc -= (k as f64).ln();
                    out.push(acc);
                }
                out
            }
            _ => (0..=self.degree)
                .map(|k| self.log_variance_unchecked(k))
                .collect(),
        }
    }

    /// Profiles with a saddle point `u*(x)` and a `Y` coordinate.
    pub fn has_saddle(&self) -> bool {
        match self.profile {
            Profile::Alpha { alpha } => alpha > 1.0,
            Profile::Mu { .. } => true,
            Profile::Weyl | Profile::Kac => false,
        }
    }

    /// Profiles whose correlator reduces to Kac's after rescaling `x`.
    pub fn is_kac_like(&self) -> bool {
        match self.profile {
            Profile::Alpha { alpha } => alpha <= 1.0,
            Profile::Kac => true,
            Profile::Mu { .. } | Profile::Weyl => false,
        }
    }

    /// Values of `ln x` at which terms `k` and `k + 1` of `c_n(x)` are equal.
    pub fn crossovers(&self) -> Vec<f64> {
        let lv = self.log_variances();
        lv.windows(2).map(|w| 0.5 * (w[0] - w[1])).collect()
    }

    /// `ln x` beyond which the leading term of `c_n(x)` dominates:
    /// `ln sqrt(<a_{n-1}^2> / <a_n^2>)`.
    pub fn edge_logx(&self) -> f64 {
        let lv = self.log_variances();
        0.5 * (lv[self.degree - 1] - lv[self.degree])
    }

    /// `ln x` below which the constant term dominates:
    /// `ln sqrt(<a_0^2> / <a_1^2>)`.
    pub fn inner_edge_logx(&self) -> f64 {
        let lv = self.log_variances();
        0.5 * (lv[0] - lv[1])
    }

    /// Draws a coefficient vector; a pure function of `(self, seed)`.
    pub fn sample(&self, seed: u64) -> CoefficientDraw {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normals: Vec<f64> = (0..=self.degree)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        CoefficientDraw::from_normals(*self, seed, normals)
    }
}

/// One polynomial from the ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDraw {
    pub seed: u64,
    pub spec: EnsembleSpec,
    /// Unit-variance normals `g_k`.
    pub normals: Vec<f64>,
    /// `a_k = g_k exp(logVariance(k) / 2)` in signed log form.
    pub log_coeffs: Vec<SignedLogValue>,
}

impl CoefficientDraw {
    /// Builds a draw from explicit unit-variance normals `g_0..g_n`.
    pub fn from_normals(spec: EnsembleSpec, seed: u64, normals: Vec<f64>) -> Self {
        assert_eq!(normals.len(), spec.degree + 1, "need n + 1 normals");
        let log_coeffs = normals
            .iter()
            .zip(spec.log_variances())
            .map(|(&g, lv)| SignedLogValue::from_real(g).scale_log(0.5 * lv))
            .collect();
        CoefficientDraw {
            seed,
            spec,
            normals,
            log_coeffs,
        }
    }

    /// Builds a draw whose coefficients are given directly in log form.
    pub fn from_log_coeffs(spec: EnsembleSpec, seed: u64, log_coeffs: Vec<SignedLogValue>) -> Self {
        assert_eq!(log_coeffs.len(), spec.degree + 1, "need n + 1 coefficients");
        let normals = log_coeffs
            .iter()
            .zip(spec.log_variances())
            .map(|(a, lv)| a.scale_log(-0.5 * lv).to_real())
            .collect();
        CoefficientDraw {
            seed,
            spec,
            normals,
            log_coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.spec.degree
    }

    /// Coefficients as plain floats; underflow to zero where not representable.
    pub fn values(&self) -> Vec<f64> {
        self.log_coeffs.iter().map(|a| a.to_real()).collect()
    }

    /// The same polynomial multiplied by `exp(log_factor)`.
    pub fn scaled(&self, log_factor: f64) -> Self {
        CoefficientDraw {
            seed: self.seed,
            spec: self.spec,
            normals: self.normals.clone(),
            log_coeffs: self
                .log_coeffs
                .iter()
                .map(|a| a.scale_log(log_factor))
                .collect(),
        }
    }
}
