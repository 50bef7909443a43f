//! Mean density of real roots.
//!
//! Three exact evaluations of the same Kac–Rice density are provided:
//!
//! * [`exact_direct`]: `sqrt(c (c'/x + c'') - c'^2) / (2 pi c)` from the
//!   termwise derivatives of `c_n(x)`, valid for every profile;
//! * [`exact_moments`]: `(1/pi x) sqrt(S2/S0 - (S1/S0)^2)` from the sums
//!   centred on the saddle `u*(x)`, in the `Y` coordinate;
//! * [`density_per_log_x`]: `sqrt(Var k) / pi` per unit `ln x`, the form the
//!   quadrature integrates.
//!
//! The asymptotic forms are standalone closed formulas and are never used
//! as fallbacks.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlator::{self, correlator_moments, dlogx_dy, y_to_logx};
use crate::ensemble::{EnsembleSpec, Profile};
use crate::error::{Error, Result};
use crate::lognum::{log_sum_exp_signed, Sign, SignedLogValue};

/// Relative size of a negative radicand that is treated as roundoff.
pub const RADICAND_TOLERANCE: f64 = 1e-10;

fn times_log(power: f64, logx: f64) -> f64 {
    if power == 0.0 {
        0.0
    } else {
        power * logx
    }
}

/// `ln(x rho_n(x))` from the termwise form, with `c''` multiplied by
/// `c2_scale` (1 for the true density).
///
/// The sums are written for `x^{-s} P_n(x)` where `s` is the heaviest index;
/// this process has the same zeros on `x > 0`, and the shift keeps the final
/// subtraction well conditioned.
pub(crate) fn direct_log_density_per_log_x(
    spec: &EnsembleSpec,
    logx: f64,
    c2_scale: f64,
) -> Result<f64> {
    let lv = spec.log_variances();
    let lw = correlator::log_weights(spec, logx);
    let s = lw
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (k, &l)| {
            if l > acc.1 {
                (k, l)
            } else {
                acc
            }
        })
        .0 as f64;

    let mut c = Vec::with_capacity(lv.len());
    let mut c1_over_x = Vec::with_capacity(lv.len());
    let mut c2 = Vec::with_capacity(lv.len());
    let mut c1 = Vec::with_capacity(lv.len());
    for (k, &lv_k) in lv.iter().enumerate() {
        let j = 2.0 * (k as f64 - s);
        c.push(SignedLogValue::positive(lv_k + times_log(j, logx)));
        if j == 0.0 {
            continue;
        }
        let lower = lv_k + times_log(j - 2.0, logx);
        let factor1 = SignedLogValue::from_real(j);
        c1_over_x.push(factor1.scale_log(lower));
        c2.push(SignedLogValue::from_real(j * (j - 1.0) * c2_scale).scale_log(lower));
        c1.push(factor1.scale_log(lv_k + times_log(j - 1.0, logx)));
    }
    let c = log_sum_exp_signed(&c);
    let c1 = log_sum_exp_signed(&c1);
    let curvature = log_sum_exp_signed(&[log_sum_exp_signed(&c1_over_x), log_sum_exp_signed(&c2)]);

    let first = c * curvature;
    let second = c1 * c1;
    let radicand = first.sub(second);
    let scale = first.logmag.max(second.logmag);
    let radicand = match radicand.sign {
        Sign::Positive => radicand.logmag,
        Sign::Zero => f64::NEG_INFINITY,
        Sign::Negative => {
            if radicand.logmag - scale > RADICAND_TOLERANCE.ln() {
                return Err(Error::NumericalInstability {
                    logx,
                    radicand: -(radicand.logmag - scale).exp(),
                    scale: scale.exp(),
                });
            }
            f64::NEG_INFINITY
        }
    };
    // x rho = x sqrt(radicand) / (2 pi c)
    let log_x = if logx == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        logx
    };
    Ok(log_x + 0.5 * radicand - c.logmag - (2.0 * PI).ln())
}

/// `rho_n(x)` at `x = exp(logx)` from the termwise derivatives of `c_n`.
///
/// `logx = -inf` evaluates at `x = 0`, where `c'/x` is taken from its
/// series. Values below the `f64` range underflow to 0.
pub fn exact_direct(spec: &EnsembleSpec, logx: f64) -> Result<f64> {
    if logx == f64::NEG_INFINITY {
        // x rho(x) -> 0, so evaluate rho itself: sqrt(c (c'/x + c''))/(2 pi c) at 0
        let lv = spec.log_variances();
        return Ok((0.5 * (lv[1] - lv[0])).exp() / PI);
    }
    let log_per_logx = direct_log_density_per_log_x(spec, logx, 1.0)?;
    Ok((log_per_logx - logx).exp())
}

/// Density per unit `ln x` (that is `x rho_n(x)`) from the termwise form.
pub fn exact_direct_per_log_x(spec: &EnsembleSpec, logx: f64) -> Result<f64> {
    Ok(direct_log_density_per_log_x(spec, logx, 1.0)?.exp())
}

/// Density per unit `ln x`: `sqrt(Var k) / pi` under the weights of `c_n`.
pub fn density_per_log_x(spec: &EnsembleSpec, logx: f64) -> f64 {
    correlator::index_variance(spec, logx).max(0.0).sqrt() / PI
}

/// `rho^_n(Y) = rho_n(x) dx/dY` from the saddle-centred sums.
pub fn exact_moments(spec: &EnsembleSpec, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::InvalidArgument(format!("Y must be > 0, got {y}")));
    }
    let logx = y_to_logx(spec, y)?;
    let m = correlator_moments(spec, logx)?;
    let second = m.second_moment();
    let mean = m.mean_offset();
    let mut radicand = second - mean * mean;
    if radicand < 0.0 {
        if -radicand > RADICAND_TOLERANCE * second {
            return Err(Error::NumericalInstability {
                logx,
                radicand,
                scale: second,
            });
        }
        radicand = 0.0;
    }
    Ok(dlogx_dy(spec, y)? * radicand.sqrt() / PI)
}

/// Large-`Y` density for `1 < alpha < 2`:
/// `sqrt(alpha (alpha - 1)) / (2 pi) * Y^{-(2 - alpha) / 2}`.
pub fn asympt_phase2(alpha: f64, y: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "phase-2 asymptotics need 1 < alpha < 2, got {alpha}"
        )));
    }
    Ok((alpha * (alpha - 1.0)).sqrt() / (2.0 * PI) * y.powf(-0.5 * (2.0 - alpha)))
}

/// `alpha (alpha - 1) Y^{alpha-2} / (2 pi cosh[alpha (alpha - 1) Y^{alpha-2} (1 - 2b) / 2])`
/// with `b` the fractional part of `Y`.
///
/// This is the leading-order peaked form for `alpha > 2`. Reducing the exact
/// density to its two dominant terms instead gives half this peak height and
/// twice the width; both carry half a root per unit cell.
pub fn asympt_phase3(alpha: f64, y: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidArgument(format!(
            "phase-3 asymptotics need alpha > 2, got {alpha}"
        )));
    }
    let b = y - y.floor();
    let height = alpha * (alpha - 1.0) * y.powf(alpha - 2.0);
    Ok(height / (2.0 * PI * (0.5 * height * (1.0 - 2.0 * b)).cosh()))
}

/// Bulk density of the `mu` family, a 1-periodic function of `Y`:
/// `(mu / pi) sqrt(<(m - b)^2>_w - <m - b>_w^2)`, `w = exp(-mu (m - b)^2)`,
/// summed over all integers `m`.
pub fn asympt_mu(mu: f64, y: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be > 0, got {mu}")));
    }
    let b = y - y.floor();
    let reach = (60.0 / mu).sqrt().ceil() as i64 + 2;
    let offsets: Vec<f64> = (-reach..=reach).map(|m| m as f64 - b).collect();
    let lw: Vec<f64> = offsets.iter().map(|d| -mu * d * d).collect();
    Ok(mu * correlator::index_variance_of(&lw).sqrt() / PI)
}

/// `ln` of the large-`x` tail `sqrt(<a_{n-1}^2> / <a_n^2>) / (pi x^2)`.
pub fn tail_log(spec: &EnsembleSpec, logx: f64) -> f64 {
    spec.edge_logx() - PI.ln() - 2.0 * logx
}

/// The large-`x` tail density, `0` once it underflows.
pub fn tail(spec: &EnsembleSpec, logx: f64) -> f64 {
    tail_log(spec, logx).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Coordinate {
    /// Density per unit `x`.
    X,
    /// Density per unit `ln x`.
    Logx,
    /// Density per unit `Y`.
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    ExactDirect,
    ExactMoments,
    AsymptPhase2,
    AsymptPhase3,
    AsymptMu,
    Tail,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ExactDirect => "EXACT_DIRECT",
            Method::ExactMoments => "EXACT_MOMENTS",
            Method::AsymptPhase2 => "ASYMPT_PHASE2",
            Method::AsymptPhase3 => "ASYMPT_PHASE3",
            Method::AsymptMu => "ASYMPT_MU",
            Method::Tail => "TAIL",
        };
        f.write_str(s)
    }
}

/// Density sampled on a grid of one coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub spec: EnsembleSpec,
    pub coordinate: Coordinate,
    pub method: Method,
    pub points: Vec<(f64, f64)>,
}

fn alpha_of(spec: &EnsembleSpec) -> Result<f64> {
    match spec.profile {
        Profile::Alpha { alpha } => Ok(alpha),
        other => Err(Error::UnsupportedProfile(other.to_string())),
    }
}

/// Density per unit `ln x` at `logx` using `method`.
fn per_log_x(spec: &EnsembleSpec, method: Method, logx: f64) -> Result<f64> {
    let via_y = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let y = correlator::logx_to_y(spec, logx)?;
        Ok(f(y)? / dlogx_dy(spec, y)?)
    };
    match method {
        Method::ExactDirect => exact_direct_per_log_x(spec, logx),
        Method::ExactMoments => via_y(&|y| exact_moments(spec, y)),
        Method::AsymptPhase2 => {
            let alpha = alpha_of(spec)?;
            via_y(&|y| asympt_phase2(alpha, y))
        }
        Method::AsymptPhase3 => {
            let alpha = alpha_of(spec)?;
            via_y(&|y| asympt_phase3(alpha, y))
        }
        Method::AsymptMu => match spec.profile {
            Profile::Mu { mu } => via_y(&|y| asympt_mu(mu, y)),
            other => Err(Error::UnsupportedProfile(other.to_string())),
        },
        Method::Tail => Ok((tail_log(spec, logx) + logx).exp()),
    }
}

impl DensityProfile {
    /// Evaluates `method` at each coordinate value; values are densities
    /// with respect to `coordinate`.
    pub fn evaluate(
        spec: &EnsembleSpec,
        coordinate: Coordinate,
        method: Method,
        coords: &[f64],
    ) -> Result<Self> {
        if coords.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "coordinate values must be strictly increasing".into(),
            ));
        }
        let points = coords
            .par_iter()
            .map(|&u| -> Result<(f64, f64)> {
                let value = match coordinate {
                    Coordinate::X => {
                        if u == 0.0 && method == Method::ExactDirect {
                            exact_direct(spec, f64::NEG_INFINITY)?
                        } else if u <= 0.0 {
                            return Err(Error::InvalidArgument(
                                "the density is tabulated on x >= 0; it is even in x".into(),
                            ));
                        } else {
                            per_log_x(spec, method, u.ln())? / u
                        }
                    }
                    Coordinate::Logx => per_log_x(spec, method, u)?,
                    Coordinate::Y => match method {
                        Method::ExactMoments => exact_moments(spec, u)?,
                        Method::AsymptPhase2 => asympt_phase2(alpha_of(spec)?, u)?,
                        Method::AsymptPhase3 => asympt_phase3(alpha_of(spec)?, u)?,
                        Method::AsymptMu => match spec.profile {
                            Profile::Mu { mu } => asympt_mu(mu, u)?,
                            other => return Err(Error::UnsupportedProfile(other.to_string())),
                        },
                        _ => per_log_x(spec, method, y_to_logx(spec, u)?)? * dlogx_dy(spec, u)?,
                    },
                };
                Ok((u, value.max(0.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DensityProfile {
            spec: *spec,
            coordinate,
            method,
            points,
        })
    }

    /// CSV with columns `coord,value,method`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("coord,value,method\n");
        for (c, v) in &self.points {
            out.push_str(&format!("{c:e},{v:e},{}\n", self.method));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(a: f64, n: usize) -> EnsembleSpec {
        EnsembleSpec::alpha(a, n).unwrap()
    }

    /// Cauchy density of the single root `-a_0 / a_1`.
    fn linear_density(s0: f64, s1: f64, x: f64) -> f64 {
        s0 * s1 / (PI * (s0 * s0 + s1 * s1 * x * x))
    }

    #[test]
    fn degree_one_at_origin() {
        let spec = alpha(1.0, 1);
        let rho = exact_direct(&spec, f64::NEG_INFINITY).unwrap();
        let want = (-0.5f64).exp() / PI;
        assert!((rho - want).abs() < 1e-15);
        assert!((rho - 0.193_064).abs() < 1e-6);
    }

    #[test]
    fn degree_one_kac_at_one() {
        let rho = exact_direct(&EnsembleSpec::kac(1).unwrap(), 0.0).unwrap();
        assert!((rho - 0.5 / PI).abs() < 1e-15);
    }

    #[test]
    fn degree_one_matches_cauchy_everywhere() {
        for spec in [
            alpha(0.0, 1),
            alpha(2.5, 1),
            EnsembleSpec::mu(3.0, 1).unwrap(),
        ] {
            let lv = spec.log_variances();
            let (s0, s1) = ((0.5 * lv[0]).exp(), (0.5 * lv[1]).exp());
            for logx in [-5.0, -1.0, 0.0, 0.3, 2.0, 6.0] {
                let x = f64::exp(logx);
                let want = linear_density(s0, s1, x);
                let got = exact_direct(&spec, logx).unwrap();
                assert!((got - want).abs() < 1e-13 * want, "{spec} {logx}");
                let stable = density_per_log_x(&spec, logx) / x;
                assert!((stable - want).abs() < 1e-13 * want);
            }
        }
    }

    #[test]
    fn direct_density_at_extreme_x() {
        let spec = alpha(3.0, 100);
        let logx = y_to_logx(&spec, 60.5).unwrap();
        let per_logx = exact_direct_per_log_x(&spec, logx).unwrap();
        assert!(per_logx.is_finite() && per_logx > 0.0);
        assert_eq!(exact_direct(&spec, logx).unwrap(), 0.0);
    }

    #[test]
    fn moments_agree_with_direct() {
        let spec = alpha(1.5, 50);
        let ys = [
            2.3, 3.9, 5.5, 7.15, 9.0, 11.7, 13.2, 15.05, 17.8, 19.5, 21.25, 23.6, 25.0, 27.4, 29.9,
            31.1, 34.6, 38.25, 42.8, 47.5,
        ];
        for y in ys {
            let logx = y_to_logx(&spec, y).unwrap();
            let jac = dlogx_dy(&spec, y).unwrap();
            let moments = exact_moments(&spec, y).unwrap();
            let direct = exact_direct_per_log_x(&spec, logx).unwrap() * jac;
            assert!(
                (moments - direct).abs() < 1e-8 * moments,
                "Y={y}: {moments} vs {direct}"
            );
        }
    }

    #[test]
    fn exact_mu_density_matches_periodic_formula() {
        let mu = 0.8;
        let spec = EnsembleSpec::mu(mu, 80).unwrap();
        for y in [20.0, 20.25, 33.5, 41.9] {
            let exact = exact_moments(&spec, y).unwrap();
            let formula = asympt_mu(mu, y).unwrap();
            assert!(
                (exact - formula).abs() < 1e-9 * formula,
                "{exact} vs {formula}"
            );
        }
    }

    #[test]
    fn mu_density_is_periodic() {
        let spec = EnsembleSpec::mu(1.0, 40).unwrap();
        for y in [6.1, 10.5, 17.77, 30.2] {
            let a = exact_moments(&spec, y).unwrap();
            let b = exact_moments(&spec, y + 1.0).unwrap();
            assert!((a - b).abs() < 1e-6 * a);
        }
    }

    #[test]
    fn phase2_examples() {
        let v = asympt_phase2(1.5, 100.0).unwrap();
        assert!((v - 0.043_586).abs() < 1e-6);
        let near_two = asympt_phase2(2.0 - 1e-9, 37.0).unwrap();
        assert!((near_two - 2f64.sqrt() / (2.0 * PI)).abs() < 1e-6);
        assert!(asympt_phase2(2.5, 10.0).is_err());
    }

    #[test]
    fn phase2_matches_exact_in_bulk() {
        let spec = alpha(1.5, 400);
        let mut y = 50.0;
        while y <= 350.0 {
            let exact = exact_moments(&spec, y).unwrap();
            let asym = asympt_phase2(1.5, y).unwrap();
            assert!(
                (exact - asym).abs() / asym < 0.05,
                "Y={y}: {exact} vs {asym}"
            );
            y += 12.5;
        }
    }

    #[test]
    fn phase3_examples() {
        let peak = asympt_phase3(3.0, 20.5).unwrap();
        assert!((peak - 6.0 * 20.5 / (2.0 * PI)).abs() < 1e-12);
        assert!((peak - 19.576).abs() < 1e-3);
        assert!(asympt_phase3(3.0, 40.001).unwrap() < 1e-20);
        assert!(asympt_phase3(3.0, 40.999).unwrap() < 1e-20);
        assert!(asympt_phase3(2.0, 5.0).is_err());
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
        let h = (b - a) / steps as f64;
        let mut s = f(a) + f(b);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn phase3_cell_carries_half_a_root() {
        for k in [5.0, 20.0, 80.0] {
            let cell = simpson(
                |b| asympt_phase3(3.0, k + b).unwrap(),
                0.0,
                1.0 - 1e-12,
                20_000,
            );
            assert!((cell - 0.5).abs() < 0.02, "k={k}: {cell}");
        }
    }

    #[test]
    fn exact_peaks_are_half_the_closed_form() {
        let spec = alpha(3.0, 64);
        for k in [15.0, 20.0, 30.0] {
            let exact = exact_moments(&spec, k + 0.5).unwrap();
            let closed = asympt_phase3(3.0, k + 0.5).unwrap();
            assert!(
                (exact / closed - 0.5).abs() < 0.02,
                "k={k}: {exact} vs {closed}"
            );
            let cell = simpson(|b| exact_moments(&spec, k + b).unwrap(), 1e-9, 1.0, 4000);
            assert!((cell - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn tail_examples() {
        let kac = EnsembleSpec::kac(10).unwrap();
        assert!((tail(&kac, 2.0) - 1.0 / (PI * f64::exp(4.0))).abs() < 1e-15);
        let a2 = alpha(2.0, 10);
        assert!((tail_log(&a2, 0.0) - (9.5 - PI.ln())).abs() < 1e-12);
        let spec = alpha(1.5, 50);
        let logx = 2.0 * 0.75 * 50f64.sqrt();
        let exact = exact_direct_per_log_x(&spec, logx).unwrap();
        let tail_val = (tail_log(&spec, logx) + logx).exp();
        assert!(exact / tail_val < 1.1 && tail_val / exact < 1.1);
    }

    #[test]
    fn radicand_is_nonnegative_across_profiles() {
        for spec in [
            alpha(0.5, 30),
            alpha(1.5, 30),
            alpha(3.0, 30),
            EnsembleSpec::weyl(30).unwrap(),
            EnsembleSpec::kac(30).unwrap(),
        ] {
            for i in -40..=200 {
                let logx = i as f64 * 0.25;
                assert!(exact_direct_per_log_x(&spec, logx).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn profile_csv_and_validation() {
        let spec = alpha(1.5, 20);
        let p =
            DensityProfile::evaluate(&spec, Coordinate::Y, Method::ExactMoments, &[1.0, 2.0, 3.5])
                .unwrap();
        assert_eq!(p.points.len(), 3);
        let csv = p.to_csv();
        assert!(csv.starts_with("coord,value,method\n"));
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().ends_with("EXACT_MOMENTS"));
        assert!(
            DensityProfile::evaluate(&spec, Coordinate::Y, Method::ExactMoments, &[2.0, 1.0])
                .is_err()
        );
        // the same density in three coordinates
        let y = 7.3;
        let logx = y_to_logx(&spec, y).unwrap();
        let in_y =
            DensityProfile::evaluate(&spec, Coordinate::Y, Method::ExactDirect, &[y]).unwrap();
        let in_logx =
            DensityProfile::evaluate(&spec, Coordinate::Logx, Method::ExactMoments, &[logx])
                .unwrap();
        let jac = dlogx_dy(&spec, y).unwrap();
        assert!((in_y.points[0].1 - in_logx.points[0].1 * jac).abs() < 1e-8 * in_y.points[0].1);
    }
}
