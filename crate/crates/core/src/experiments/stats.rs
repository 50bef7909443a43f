//! Small statistics helpers: bootstrap standard errors and the regressions
//! behind the phase fits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean from `resamples` bootstrap resamples drawn
/// with a generator seeded by `seed`.
pub fn bootstrap_stderr(xs: &[f64], resamples: usize, seed: u64) -> f64 {
    if xs.len() < 2 || resamples < 2 {
        return f64::NAN;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = xs.len();
    let means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| xs[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    let m = mean(&means);
    (means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (resamples - 1) as f64).sqrt()
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Sum of squared residuals.
    pub rss: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Some(LineFit {
        slope,
        intercept,
        rss,
    })
}

/// `y = amplitude * n^exponent + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub rss: f64,
}

/// Least-squares fit of `A n^b + C`: linear in `(A, C)` for fixed `b`, with
/// `b` found by golden-section search on `[b_lo, b_hi]`.
pub fn fit_power_with_offset(ns: &[f64], ys: &[f64], b_lo: f64, b_hi: f64) -> Option<PowerFit> {
    if ns.len() < 3 {
        return None;
    }
    let at = |b: f64| -> Option<PowerFit> {
        let xs: Vec<f64> = ns.iter().map(|n| n.powf(b)).collect();
        let line = fit_line(&xs, ys)?;
        Some(PowerFit {
            exponent: b,
            amplitude: line.slope,
            offset: line.intercept,
            rss: line.rss,
        })
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (b_lo, b_hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    for _ in 0..200 {
        if at(c)?.rss < at(d)?.rss {
            b = d;
        } else {
            a = c;
        }
        c = b - ratio * (b - a);
        d = a + ratio * (b - a);
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    at(0.5 * (a + b))
}

/// `y = amplitude * n^exponent` fitted on log-log axes.
pub fn fit_power(ns: &[f64], ys: &[f64]) -> Option<PowerFit> {
    let lx: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let line = fit_line(&lx, &ly)?;
    Some(PowerFit {
        exponent: line.slope,
        amplitude: line.intercept.exp(),
        offset: 0.0,
        rss: line.rss,
    })
}
