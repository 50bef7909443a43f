//! Mean number of real roots by adaptive quadrature of the exact density.
//!
//! The integration variable is `t = ln x` on the positive axis, where the
//! density is `sqrt(Var k) / pi` and stays `O(1)` wide around every
//! crossover even when, in `Y`, the peaks shrink like `k^{2 - alpha}`.
//! Panels start from analytically known breakpoints (crossovers between
//! consecutive terms of `c_n`, the Kac-like transition, integer `Y`) and are
//! refined by global bisection of the worst Gauss–Kronrod panel.
//!
//! Beyond `ten` units of `ln x` outside the outermost crossovers only two
//! terms of `c_n` matter and the density is a pure exponential, which is
//! integrated in closed form.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlator::{index_variance_of, log_weights, y_to_logx};
use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};

/// Distance in `ln x` beyond the outermost crossovers where the analytic
/// tails take over.
const TAIL_MARGIN: f64 = 10.0;

/// Default tolerance for [`expected_count_per_interval`].
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Maximum number of panels before giving up.
pub const PANEL_BUDGET: usize = 400_000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_9,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_9,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod(f: &(impl Fn(f64) -> f64 + Sync), a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// Result of one adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Integral {
    value: f64,
    error: f64,
    panels: usize,
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Integrates `f` over the union of `[breaks[i], breaks[i + 1]]`.
///
/// Refinement bisects, each round, every panel whose error exceeds the
/// current mean allowance, so the panel set (and hence the result) does not
/// depend on thread scheduling.
fn adaptive(
    f: &(impl Fn(f64) -> f64 + Sync),
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Integral> {
    let mut panels: Vec<Panel> = breaks
        .par_windows(2)
        .map(|w| gauss_kronrod(f, w[0], w[1]))
        .collect();
    loop {
        let value = neumaier_sum(panels.iter().map(|p| p.value));
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = (rel_tol * value.abs()).max(abs_tol);
        if error <= target {
            return Ok(Integral {
                value,
                error,
                panels: panels.len(),
            });
        }
        if panels.len() >= PANEL_BUDGET {
            return Err(Error::NoConvergence {
                estimate: value,
                error,
                panels: panels.len(),
            });
        }
        let allowance = target / panels.len() as f64;
        let worst = panels.iter().map(|p| p.error).fold(0.0, f64::max);
        // split at least the worst panel, and everything not yet within its share
        let threshold = allowance.min(worst);
        let refined: Vec<Vec<Panel>> = panels
            .par_iter()
            .map(|p| {
                let mid = 0.5 * (p.a + p.b);
                if p.error >= threshold && mid > p.a && mid < p.b {
                    vec![gauss_kronrod(f, p.a, mid), gauss_kronrod(f, mid, p.b)]
                } else {
                    vec![*p]
                }
            })
            .collect();
        let before = panels.len();
        panels = refined.into_iter().flatten().collect();
        if panels.len() == before {
            // nothing left to split at floating-point resolution
            return Err(Error::NoConvergence {
                estimate: value,
                error,
                panels: before,
            });
        }
    }
}

/// Density of real roots per unit `ln x` on one half-axis.
fn integrand(spec: &EnsembleSpec) -> impl Fn(f64) -> f64 + Sync + '_ {
    move |t| index_variance_of(&log_weights(spec, t)).max(0.0).sqrt() / PI
}

/// Where the numerical integration starts and stops, and the analytic
/// exponential tails outside.
#[derive(Clone, Debug)]
struct Layout {
    lo: f64,
    hi: f64,
    /// Crossover of the first two terms; below `lo` the density is `exp(t - inner) / pi`.
    inner: f64,
    /// Crossover of the last two terms; above `hi` the density is `exp(outer - t) / pi`.
    outer: f64,
    breaks: Vec<f64>,
}

impl Layout {
    fn new(spec: &EnsembleSpec) -> Self {
        let crossovers = spec.crossovers();
        let min_c = crossovers.iter().copied().fold(f64::INFINITY, f64::min);
        let max_c = crossovers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut points = crossovers.clone();
        points.push(0.0);
        if spec.has_saddle() {
            for k in 1..=spec.degree {
                points.push(y_to_logx(spec, k as f64).expect("saddle profile"));
            }
        }
        let lo = (min_c - TAIL_MARGIN).min(points.iter().copied().fold(f64::INFINITY, f64::min));
        let hi =
            (max_c + TAIL_MARGIN).max(points.iter().copied().fold(f64::NEG_INFINITY, f64::max));

        // exponential flanks of every crossover
        let mut sorted = crossovers.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        for (i, &c) in sorted.iter().enumerate() {
            let left = if i == 0 {
                c - lo
            } else {
                0.5 * (c - sorted[i - 1])
            };
            let right = if i + 1 == sorted.len() {
                hi - c
            } else {
                0.5 * (sorted[i + 1] - c)
            };
            let mut step = 1.0;
            while step < left {
                points.push(c - step);
                step *= 2.0;
            }
            let mut step = 1.0;
            while step < right {
                points.push(c + step);
                step *= 2.0;
            }
        }
        if spec.is_kac_like() {
            // the crowd of crossovers near the Kac transition has width 1/n
            let lv = spec.log_variances();
            let n = spec.degree as f64;
            let centre = 0.5 * (lv[0] - lv[spec.degree]) / n;
            let mut step = 1.0 / n;
            while step < TAIL_MARGIN {
                points.push(centre - step);
                points.push(centre + step);
                step *= 2.0;
            }
            points.push(centre);
        }
        points.push(lo);
        points.push(hi);
        points.retain(|p| *p >= lo && *p <= hi);
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
        Layout {
            lo,
            hi,
            inner: 0.5 * (spec.log_variances()[0] - spec.log_variances()[1]),
            outer: spec.edge_logx(),
            breaks: points,
        }
    }

    /// `int_a^b` of the analytic flanks that lie outside `[lo, hi]`.
    fn analytic(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        let (la, lb) = (a, b.min(self.lo));
        if lb > la {
            total += ((lb - self.inner).exp() - (la - self.inner).exp()) / PI;
        }
        let (ua, ub) = (a.max(self.hi), b);
        if ub > ua {
            total += ((self.outer - ua).exp() - (self.outer - ub).exp()) / PI;
        }
        total
    }

    /// `int_a^b` of the density per unit `ln x`, `a` and `b` possibly infinite.
    fn integrate(
        &self,
        spec: &EnsembleSpec,
        a: f64,
        b: f64,
        rel_tol: f64,
        abs_tol: f64,
    ) -> Result<Integral> {
        let tails = self.analytic(a, b);
        let (na, nb) = (a.max(self.lo), b.min(self.hi));
        if !(nb > na) {
            return Ok(Integral {
                value: tails,
                error: 0.0,
                panels: 0,
            });
        }
        let mut breaks: Vec<f64> = std::iter::once(na)
            .chain(self.breaks.iter().copied().filter(|p| *p > na && *p < nb))
            .chain(std::iter::once(nb))
            .collect();
        breaks.dedup();
        let f = integrand(spec);
        let inner = adaptive(&f, &breaks, rel_tol, abs_tol)?;
        Ok(Integral {
            value: inner.value + tails,
            ..inner
        })
    }
}

/// `<N_n>` and its split over `|x| < 1`, the bulk `1 < |x| < x_edge` and
/// the region beyond, where `ln x_edge = ln sqrt(<a_{n-1}^2> / <a_n^2>)`
/// (`(alpha/2) n^{alpha-1}` to leading order). All contributions count both
/// half-axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanCountResult {
    pub spec: EnsembleSpec,
    pub mean_count: f64,
    pub inner: f64,
    pub bulk: f64,
    pub tail: f64,
    pub estimated_error: f64,
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 1e-10 && rel_tol < 1e-2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "relative tolerance must lie in (1e-10, 1e-2), got {rel_tol}"
        )))
    }
}

/// Mean number of real roots, `2 int_0^inf rho_n(x) dx`.
pub fn mean_real_roots(spec: &EnsembleSpec, rel_tol: f64) -> Result<MeanCountResult> {
    check_rel_tol(rel_tol)?;
    spec.validate()?;
    let layout = Layout::new(spec);
    let edge = spec.edge_logx().max(0.0);
    // each piece is held to a share of the total, which is at least 1/2
    let abs_tol = 0.25 * rel_tol;
    let inner = layout.integrate(spec, f64::NEG_INFINITY, 0.0, rel_tol, abs_tol)?;
    let bulk = layout.integrate(spec, 0.0, edge, rel_tol, abs_tol)?;
    let tail = layout.integrate(spec, edge, f64::INFINITY, rel_tol, abs_tol)?;
    let (inner_v, bulk_v, tail_v) = (2.0 * inner.value, 2.0 * bulk.value, 2.0 * tail.value);
    Ok(MeanCountResult {
        spec: *spec,
        mean_count: inner_v + bulk_v + tail_v,
        inner: inner_v,
        bulk: bulk_v,
        tail: tail_v,
        estimated_error: 2.0 * (inner.error + bulk.error + tail.error),
    })
}

/// Expected number of real roots with `a <= ln|x| <= b`, both signs of `x`.
pub fn expected_count_logx(spec: &EnsembleSpec, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    if !(b >= a) {
        return Err(Error::InvalidArgument(format!("empty range [{a}, {b}]")));
    }
    let layout = Layout::new(spec);
    Ok(2.0 * layout.integrate(spec, a, b, rel_tol, 1e-15)?.value)
}

/// `2 int_k^{k+1} rho^_n(Y) dY`: the expected number of roots in
/// `[x_k, x_{k+1}]` and its mirror image, `ln x_k = Y^{-1}(k)`.
pub fn expected_count_per_interval(spec: &EnsembleSpec, k: usize) -> Result<f64> {
    if !spec.has_saddle() {
        return Err(Error::UnsupportedProfile(spec.profile.to_string()));
    }
    if k < 1 || k >= spec.degree {
        return Err(Error::IndexOutOfRange {
            k,
            degree: spec.degree,
        });
    }
    let a = y_to_logx(spec, k as f64)?;
    let b = y_to_logx(spec, (k + 1) as f64)?;
    expected_count_logx(spec, a, b, DEFAULT_REL_TOL)
}
