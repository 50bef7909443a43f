//! The diagonal correlator `c_n(x) = sum_k <a_k^2> x^{2k}` and its saddle
//! point structure.
//!
//! Every function takes `ln x` rather than `x`: for steep profiles the
//! relevant `x` reach `exp(1e4)` and beyond.

use crate::ensemble::{EnsembleSpec, Profile};
use crate::error::{Error, Result};
use crate::lognum::{log_sum_exp_signed, Sign, SignedLogValue};

fn saddle_profile(spec: &EnsembleSpec) -> Result<()> {
    match spec.profile {
        Profile::Alpha { alpha } if alpha <= 1.0 => Err(Error::NoInteriorMinimum { alpha }),
        Profile::Alpha { .. } | Profile::Mu { .. } => Ok(()),
        other => Err(Error::UnsupportedProfile(other.to_string())),
    }
}

/// `phi(k, x) = k^alpha - 2 k ln x` (or `mu k^2 - 2 k ln x`), so that the
/// `k`-th term of `c_n(x)` is `exp(-phi(k, x))`. `0^alpha` is taken as 0.
pub fn phi(spec: &EnsembleSpec, k: f64, logx: f64) -> Result<f64> {
    let power = match spec.profile {
        Profile::Alpha { alpha } => {
            if k == 0.0 {
                0.0
            } else {
                k.powf(alpha)
            }
        }
        Profile::Mu { mu } => mu * k * k,
        other => return Err(Error::UnsupportedProfile(other.to_string())),
    };
    Ok(power - 2.0 * k * logx)
}

/// Minimizer of `u -> phi(u, x)` over `u >= 0`.
///
/// For `ln x <= 0` the minimum sits on the boundary and 0 is returned.
pub fn u_star(spec: &EnsembleSpec, logx: f64) -> Result<f64> {
    saddle_profile(spec)?;
    if logx <= 0.0 {
        return Ok(0.0);
    }
    Ok(match spec.profile {
        Profile::Alpha { alpha } => (2.0 / alpha * logx).powf(1.0 / (alpha - 1.0)),
        Profile::Mu { mu } => logx / mu,
        _ => unreachable!(),
    })
}

/// `d^2 phi / du^2` at `u`.
pub fn phi_curvature(spec: &EnsembleSpec, u: f64) -> Result<f64> {
    saddle_profile(spec)?;
    Ok(match spec.profile {
        Profile::Alpha { alpha } => alpha * (alpha - 1.0) * u.powf(alpha - 2.0),
        Profile::Mu { mu } => 2.0 * mu,
        _ => unreachable!(),
    })
}

/// Maps the saddle coordinate `Y = u*(x)` back to `ln x`.
pub fn y_to_logx(spec: &EnsembleSpec, y: f64) -> Result<f64> {
    saddle_profile(spec)?;
    if !(y >= 0.0) {
        return Err(Error::InvalidArgument(format!("Y must be >= 0, got {y}")));
    }
    Ok(match spec.profile {
        Profile::Alpha { alpha } => 0.5 * alpha * y.powf(alpha - 1.0),
        Profile::Mu { mu } => mu * y,
        _ => unreachable!(),
    })
}

/// `Y = u*(x)` for `ln x >= 0`.
pub fn logx_to_y(spec: &EnsembleSpec, logx: f64) -> Result<f64> {
    saddle_profile(spec)?;
    if !(logx >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "the Y coordinate covers x >= 1 only, got ln x = {logx}"
        )));
    }
    u_star(spec, logx)
}

/// Jacobian `d ln x / dY`.
pub fn dlogx_dy(spec: &EnsembleSpec, y: f64) -> Result<f64> {
    saddle_profile(spec)?;
    Ok(match spec.profile {
        Profile::Alpha { alpha } => 0.5 * alpha * (alpha - 1.0) * y.powf(alpha - 2.0),
        Profile::Mu { mu } => mu,
        _ => unreachable!(),
    })
}

/// `d/dx u*(sqrt(x y)) = u*^{2 - alpha} / (alpha (alpha - 1) x)`, or
/// `1 / (2 mu x)` for the mu profile.
pub fn du_star_dx(spec: &EnsembleSpec, x: f64, y: f64) -> Result<f64> {
    let u = u_star(spec, 0.5 * (x.ln() + y.ln()))?;
    Ok(match spec.profile {
        Profile::Alpha { alpha } => u.powf(2.0 - alpha) / (alpha * (alpha - 1.0) * x),
        Profile::Mu { mu } => 1.0 / (2.0 * mu * x),
        _ => unreachable!(),
    })
}

/// Saddle data at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaddleContext {
    pub spec: EnsembleSpec,
    pub logx: f64,
    pub u_star: f64,
    pub floor_u_star: i64,
    /// Fractional part `b` of `u_star`.
    pub b: f64,
}

impl SaddleContext {
    pub fn new(spec: &EnsembleSpec, logx: f64) -> Result<Self> {
        let u = u_star(spec, logx)?;
        let floor = u.floor();
        Ok(SaddleContext {
            spec: *spec,
            logx,
            u_star: u,
            floor_u_star: floor as i64,
            b: u - floor,
        })
    }
}

/// `ln(exp(-phi(k, x)))` for `k = 0..=n`: `logVariance(k) + 2 k ln x`.
pub fn log_weights(spec: &EnsembleSpec, logx: f64) -> Vec<f64> {
    spec.log_variances()
        .into_iter()
        .enumerate()
        .map(|(k, lv)| {
            if k == 0 {
                lv
            } else {
                lv + 2.0 * k as f64 * logx
            }
        })
        .collect()
}

/// `c_n(x) = C_n(x, x)` in log form. Accepts `ln x = -inf` (x = 0).
pub fn correlator_diagonal(spec: &EnsembleSpec, logx: f64) -> SignedLogValue {
    let terms: Vec<SignedLogValue> = log_weights(spec, logx)
        .into_iter()
        .map(SignedLogValue::positive)
        .collect();
    log_sum_exp_signed(&terms)
}

/// The sums `S_j = sum_k (k - u*)^j exp(-phi~(k, x))` for `j = 0, 1, 2`,
/// with `phi~(k, x) = phi(k, x) - phi(u*, x)` so the dominant term is O(1).
#[derive(Clone, Copy, Debug)]
pub struct Moments {
    pub u_star: f64,
    pub s0: SignedLogValue,
    pub s1: SignedLogValue,
    pub s2: SignedLogValue,
}

impl Moments {
    /// `S1 / S0`.
    pub fn mean_offset(&self) -> f64 {
        self.s1.div(self.s0).to_real()
    }

    /// `S2 / S0`.
    pub fn second_moment(&self) -> f64 {
        self.s2.div(self.s0).to_real()
    }
}

pub fn correlator_moments(spec: &EnsembleSpec, logx: f64) -> Result<Moments> {
    let u = u_star(spec, logx)?;
    let phi_star = phi(spec, u, logx)?;
    let lv = spec.log_variances();
    let mut t0 = Vec::with_capacity(lv.len());
    let mut t1 = Vec::with_capacity(lv.len());
    let mut t2 = Vec::with_capacity(lv.len());
    for (k, lv_k) in lv.iter().enumerate() {
        let phi_k = -lv_k - 2.0 * k as f64 * logx;
        let w = -(phi_k - phi_star);
        let d = k as f64 - u;
        let ld = d.abs().ln();
        t0.push(SignedLogValue::positive(w));
        t1.push(SignedLogValue::new(Sign::of(d), w + ld));
        t2.push(SignedLogValue::positive(w + 2.0 * ld));
    }
    Ok(Moments {
        u_star: u,
        s0: log_sum_exp_signed(&t0),
        s1: log_sum_exp_signed(&t1),
        s2: log_sum_exp_signed(&t2),
    })
}

/// Variance of the index `k` under the normalized weights `exp(-phi(k, x))`.
///
/// This is `x^2 d_u d_v ln C_n(u, v)` at `u = v = x`, computed in two passes
/// around the heaviest term so it stays accurate when the weights are
/// concentrated on a single index.
pub fn index_variance(spec: &EnsembleSpec, logx: f64) -> f64 {
    let lw = log_weights(spec, logx);
    index_variance_of(&lw)
}

pub(crate) fn index_variance_of(lw: &[f64]) -> f64 {
    let (mode, max) = lw
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (k, &l)| {
            if l > acc.1 {
                (k, l)
            } else {
                acc
            }
        });
    let mut z = 0.0;
    let mut first = 0.0;
    let p: Vec<f64> = lw.iter().map(|l| (l - max).exp()).collect();
    for (k, &pk) in p.iter().enumerate() {
        z += pk;
        first += pk * (k as f64 - mode as f64);
    }
    let shift = first / z;
    let mut second = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        let d = (k as f64 - mode as f64) - shift;
        second += pk * d * d;
    }
    second / z
}
