//! Counting the real roots of a sampled polynomial.
//!
//! The scan works on each half-axis in `t = ln|x|`, where the polynomial is
//! `f(t) = sum_k s_k exp(c_k + k t)` and every term is evaluated in log form.
//! A deterministic grid places a few points per expected root; each grid
//! cell is then either certified (no root, or a single monotone branch) or
//! bisected up to a fixed depth. [`sturm`] provides the exact oracle used to
//! validate the scan and to settle draws whose sign is ambiguous at a grid
//! point.

pub mod sturm;

use serde::{Deserialize, Serialize};

use crate::correlator::y_to_logx;
use crate::ensemble::{CoefficientDraw, EnsembleSpec, Profile};
use crate::error::{Error, Result};
use crate::lognum::{
    log_sum_exp_signed_flagged, LogSum, Sign, SignedLogValue, CANCELLATION_THRESHOLD,
};

pub use sturm::{sturm_count, Bound, SturmChain, DEFAULT_ORACLE_LIMIT};

/// Default grid density in the coordinate where roots are evenly spaced.
pub const DEFAULT_GRID_POINTS_PER_UNIT_Y: usize = 16;

/// Default number of bisections allowed below a grid cell.
pub const DEFAULT_MAX_REFINE_DEPTH: u32 = 8;

/// Ratio by which consecutive padding cells grow outside the main grid.
const PADDING_GROWTH: f64 = 1.25;

/// Safety margin, in log units, required by the certificates.
const CERTIFICATE_MARGIN: f64 = 1e-9;

/// Signed log value of `P_n(x)` at `x = sign_of_x * exp(log_abs_x)`.
pub fn eval_signed_log(draw: &CoefficientDraw, log_abs_x: f64, sign_of_x: Sign) -> LogSum {
    let terms: Vec<SignedLogValue> = draw
        .log_coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let sign = if sign_of_x == Sign::Negative && k % 2 == 1 {
                -a.sign
            } else {
                a.sign
            };
            if k == 0 {
                SignedLogValue::new(sign, a.logmag)
            } else {
                SignedLogValue::new(sign, a.logmag + k as f64 * log_abs_x)
            }
        })
        .collect();
    log_sum_exp_signed_flagged(&terms)
}

/// Knobs of the sign scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub grid_points_per_unit_y: usize,
    pub max_refine_depth: u32,
    /// Largest degree handed to the exact oracle when a sign is ambiguous.
    pub oracle_limit: usize,
    /// Whether to tally roots per interval `[x_k, x_{k+1}]`.
    pub tallies: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            grid_points_per_unit_y: DEFAULT_GRID_POINTS_PER_UNIT_Y,
            max_refine_depth: DEFAULT_MAX_REFINE_DEPTH,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            tallies: true,
        }
    }
}

/// Irregularities met while counting one draw.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountFlags {
    /// A grid or bisection point had to be moved off a near-cancellation.
    pub nudged: bool,
    /// The sign stayed ambiguous and the exact oracle produced the counts.
    pub escalated_to_oracle: bool,
    /// Zero leading coefficients were dropped.
    pub degree_reduced: bool,
    /// `a_0 = 0`, so `x = 0` is a root.
    pub zero_root: bool,
}

/// Root counts of one draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootCountSample {
    pub seed: u64,
    pub spec: EnsembleSpec,
    pub total_count: usize,
    pub positive_count: usize,
    pub negative_count: usize,
    /// `(positive, negative)` counts in `[x_k, x_{k+1}]` and its mirror for
    /// `k = 0..n`, with `ln x_k = Y^{-1}(k)`; saddle profiles only.
    pub interval_tallies: Option<Vec<(u32, u32)>>,
    /// Deepest bisection reached below a grid cell.
    pub refinement_depth_used: u32,
    /// Cells at full depth without a certificate; each counted by its sign change.
    pub uncertified_cells: u32,
    pub flags: CountFlags,
}

/// One nonzero term `s * exp(c + k t)`.
#[derive(Clone, Copy, Debug)]
struct Term {
    k: f64,
    sign: f64,
    c: f64,
}

/// `f(t) = P(sign * e^t)` as a list of log-form terms.
#[derive(Clone, Debug)]
struct HalfAxis {
    terms: Vec<Term>,
    /// `ln(j / 2)` for `j = 0..=2n + 2`.
    ln_halves: Vec<f64>,
}

impl HalfAxis {
    fn new(draw: &CoefficientDraw, sign_of_x: Sign) -> Self {
        let terms = draw
            .log_coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| {
                let flip = sign_of_x == Sign::Negative && k % 2 == 1;
                let s = a.sign.as_f64();
                Term {
                    k: k as f64,
                    sign: if flip { -s } else { s },
                    c: a.logmag,
                }
            })
            .collect();
        let ln_halves = (0..=2 * draw.degree() + 2)
            .map(|j| (0.5 * j as f64).ln())
            .collect();
        HalfAxis { terms, ln_halves }
    }

    fn eval(&self, t: f64) -> LogSum {
        let max = self
            .terms
            .iter()
            .map(|term| term.c + term.k * t)
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut sum, mut comp, mut abs) = (0.0f64, 0.0f64, 0.0f64);
        for term in &self.terms {
            let e = (term.c + term.k * t - max).exp();
            abs += e;
            let v = term.sign * e;
            let s = sum + v;
            comp += if sum.abs() >= v.abs() {
                (sum - s) + v
            } else {
                (v - s) + sum
            };
            sum = s;
        }
        let total = sum + comp;
        if total.abs() <= CANCELLATION_THRESHOLD * abs {
            return LogSum {
                value: SignedLogValue::ZERO,
                near_cancellation: true,
            };
        }
        LogSum {
            value: SignedLogValue::new(Sign::of(total), max + total.abs().ln()),
            near_cancellation: false,
        }
    }

    /// Index of the largest term at `t`.
    fn mode(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .fold((0.0, f64::NEG_INFINITY), |acc, term| {
                let l = term.c + term.k * t;
                if l > acc.1 {
                    (term.k, l)
                } else {
                    acc
                }
            })
            .0
    }

    /// Certifies that `e^{-s t} f(t)` (`derivative = false`) or its
    /// derivative (`derivative = true`) keeps one sign on `[a, b]`.
    ///
    /// Two tests are tried: one sign's terms outweigh the other's at their
    /// least favourable endpoints, or the value at the midpoint exceeds the
    /// largest drift the derivative allows over half the cell.
    fn sign_definite(&self, s: f64, derivative: bool, a: f64, b: f64) -> bool {
        let mid = 0.5 * (a + b);
        let view = |term: &Term| -> Option<(bool, f64, f64, f64)> {
            let r = term.k - s;
            let ln_r = if r == 0.0 {
                f64::NEG_INFINITY
            } else {
                self.ln_half(r)
            };
            if derivative {
                if r == 0.0 {
                    return None;
                }
                let positive = (term.sign > 0.0) == (r > 0.0);
                Some((positive, term.c + ln_r, r, ln_r))
            } else {
                Some((term.sign > 0.0, term.c, r, ln_r))
            }
        };
        let ends = |c: f64, r: f64| {
            if r >= 0.0 {
                (c + r * a, c + r * b)
            } else {
                (c + r * b, c + r * a)
            }
        };

        let ninf = f64::NEG_INFINITY;
        let (mut mpl, mut mph, mut mnl, mut mnh, mut mslope, mut mmid) =
            (ninf, ninf, ninf, ninf, ninf, ninf);
        let (mut npos, mut nneg) = (0usize, 0usize);
        for (positive, c, r, ln_r) in self.terms.iter().filter_map(view) {
            let (lo, hi) = ends(c, r);
            if positive {
                npos += 1;
                mpl = mpl.max(lo);
                mph = mph.max(hi);
            } else {
                nneg += 1;
                mnl = mnl.max(lo);
                mnh = mnh.max(hi);
            }
            mslope = mslope.max(hi + ln_r);
            mmid = mmid.max(c + r * mid);
        }
        if npos + nneg == 0 {
            return false;
        }
        if nneg == 0 || npos == 0 {
            return true;
        }
        // cheap version of the dominance test: largest term against a count bound
        if mpl > mnh + (nneg as f64).ln() + CERTIFICATE_MARGIN
            || mnl > mph + (npos as f64).ln() + CERTIFICATE_MARGIN
        {
            return true;
        }

        let (mut sslope, mut mid_sum, mut mid_comp, mut mid_abs) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (positive, c, r, ln_r) in self.terms.iter().filter_map(view) {
            let at_mid = (c + r * mid - mmid).exp();
            mid_abs += at_mid;
            let v = if positive { at_mid } else { -at_mid };
            let t = mid_sum + v;
            mid_comp += if mid_sum.abs() >= v.abs() {
                (mid_sum - t) + v
            } else {
                (v - t) + mid_sum
            };
            mid_sum = t;
            if r != 0.0 {
                let (_, hi) = ends(c, r);
                sslope += (hi + ln_r - mslope).exp();
            }
        }
        let value = (mid_sum + mid_comp).abs();
        if value > CANCELLATION_THRESHOLD * mid_abs && sslope > 0.0 {
            let drift = (0.5 * (b - a)).ln() + mslope + sslope.ln();
            if mmid + value.ln() > drift + CERTIFICATE_MARGIN {
                return true;
            }
        }

        let (mut spl, mut sph, mut snl, mut snh) = (0.0, 0.0, 0.0, 0.0);
        for (positive, c, r, _) in self.terms.iter().filter_map(view) {
            let (lo, hi) = ends(c, r);
            if positive {
                spl += (lo - mpl).exp();
                sph += (hi - mph).exp();
            } else {
                snl += (lo - mnl).exp();
                snh += (hi - mnh).exp();
            }
        }
        let (pl, ph) = (mpl + spl.ln(), mph + sph.ln());
        let (nl, nh) = (mnl + snl.ln(), mnh + snh.ln());
        pl > nh + CERTIFICATE_MARGIN || nl > ph + CERTIFICATE_MARGIN
    }

    /// `ln |r|` for the integer and half-integer offsets used as shifts.
    fn ln_half(&self, r: f64) -> f64 {
        let j = (2.0 * r.abs()).round() as usize;
        if (j as f64 - 2.0 * r.abs()).abs() < 1e-9 && j < self.ln_halves.len() {
            self.ln_halves[j]
        } else {
            r.abs().ln()
        }
    }

    fn root_free(&self, a: f64, b: f64) -> bool {
        let mut shifts = vec![self.mode(0.5 * (a + b)), self.mode(a), self.mode(b)];
        shifts.dedup();
        shifts
            .into_iter()
            .any(|s| self.sign_definite(s, false, a, b))
    }

    fn monotone(&self, a: f64, b: f64) -> bool {
        let m = self.mode(0.5 * (a + b));
        [m - 0.5, m + 0.5, m]
            .into_iter()
            .any(|s| self.sign_definite(s, true, a, b))
    }
}

/// Outcome of scanning a half-axis.
#[derive(Clone, Debug, Default)]
struct AxisScan {
    count: usize,
    per_cell: Vec<usize>,
    depth_used: u32,
    uncertified: u32,
    nudged: bool,
}

struct Ambiguous;

struct Scanner<'a> {
    axis: &'a HalfAxis,
    max_depth: u32,
    depth_used: u32,
    uncertified: u32,
    nudged: bool,
}

impl Scanner<'_> {
    /// Sign of `f` at `t`, moved slightly inside `(lo, hi)` if `t` sits on a
    /// near-cancellation; returns the point actually used.
    fn sign_near(
        &mut self,
        t: f64,
        lo: f64,
        hi: f64,
    ) -> std::result::Result<(f64, Sign), Ambiguous> {
        let v = self.axis.eval(t);
        if !v.near_cancellation && !v.value.is_zero() {
            return Ok((t, v.value.sign));
        }
        let width = (hi - lo).max(f64::EPSILON * t.abs().max(1.0));
        for j in 1..=4 {
            for dir in [1.0, -1.0] {
                let u = t + dir * width * 1e-3 * j as f64;
                if u <= lo || u >= hi {
                    continue;
                }
                let v = self.axis.eval(u);
                if !v.near_cancellation && !v.value.is_zero() {
                    self.nudged = true;
                    return Ok((u, v.value.sign));
                }
            }
        }
        Err(Ambiguous)
    }

    fn count_cell(
        &mut self,
        a: f64,
        b: f64,
        sa: Sign,
        sb: Sign,
        depth: u32,
    ) -> std::result::Result<usize, Ambiguous> {
        self.depth_used = self.depth_used.max(depth);
        let change = usize::from(sa != sb);
        if sa == sb && self.axis.root_free(a, b) {
            return Ok(0);
        }
        if self.axis.monotone(a, b) {
            return Ok(change);
        }
        let mid = 0.5 * (a + b);
        if depth >= self.max_depth || !(mid > a && mid < b) {
            self.uncertified += 1;
            return Ok(change);
        }
        let (m, sm) = self.sign_near(mid, a, b)?;
        Ok(self.count_cell(a, m, sa, sm, depth + 1)? + self.count_cell(m, b, sm, sb, depth + 1)?)
    }
}

fn scan_axis(
    axis: &HalfAxis,
    grid: &[f64],
    max_depth: u32,
) -> std::result::Result<AxisScan, Ambiguous> {
    let mut scanner = Scanner {
        axis,
        max_depth,
        depth_used: 0,
        uncertified: 0,
        nudged: false,
    };
    let mut points = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let lo = if i == 0 { t - 1.0 } else { grid[i - 1] };
        let hi = if i + 1 == grid.len() {
            t + 1.0
        } else {
            grid[i + 1]
        };
        points.push(scanner.sign_near(t, lo, hi)?);
    }
    let mut per_cell = Vec::with_capacity(grid.len().saturating_sub(1));
    for w in points.windows(2) {
        let ((a, sa), (b, sb)) = (w[0], w[1]);
        per_cell.push(scanner.count_cell(a, b, sa, sb, 0)?);
    }
    Ok(AxisScan {
        count: per_cell.iter().sum(),
        per_cell,
        depth_used: scanner.depth_used,
        uncertified: scanner.uncertified,
        nudged: scanner.nudged,
    })
}

/// `ln` of bounds `[lo, hi]` on `|x|` for every nonzero root, from
/// Fujiwara's bound applied to the polynomial and its reversal.
fn root_bounds(terms: &[Term]) -> (f64, f64) {
    let first = terms.first().expect("nonzero polynomial");
    let last = terms.last().expect("nonzero polynomial");
    let ln2 = std::f64::consts::LN_2;
    let upper = terms[..terms.len() - 1]
        .iter()
        .map(|t| (t.c - last.c) / (last.k - t.k))
        .fold(f64::NEG_INFINITY, f64::max);
    let lower = terms[1..]
        .iter()
        .map(|t| (t.c - first.c) / (t.k - first.k))
        .fold(f64::NEG_INFINITY, f64::max);
    (-(ln2 + lower), ln2 + upper)
}

/// `ln x_k = Y^{-1}(k)`, `k = 0..=n`, for profiles with a saddle.
fn interval_edges(spec: &EnsembleSpec) -> Option<Vec<f64>> {
    if !spec.has_saddle() {
        return None;
    }
    Some(
        (0..=spec.degree)
            .map(|k| y_to_logx(spec, k as f64).expect("saddle profile"))
            .collect(),
    )
}

/// Centre of the Kac-like transition in `ln x`.
fn kac_centre(spec: &EnsembleSpec) -> f64 {
    match spec.profile {
        Profile::Alpha { alpha } => 0.5 * alpha * (spec.degree as f64).powf(alpha - 1.0),
        _ => 0.0,
    }
}

fn pad(points: &mut Vec<f64>, from: f64, to: f64, first_step: f64) {
    let dir = (to - from).signum();
    let mut step = first_step.max(1e-12);
    let mut t = from + dir * step;
    while (to - t) * dir > 0.0 {
        points.push(t);
        step *= PADDING_GROWTH;
        t += dir * step;
    }
}

/// The scan grid in `ln|x|`, sorted, covering `[lo, hi]`.
fn build_grid(spec: &EnsembleSpec, per_unit: usize, lo: f64, hi: f64) -> Vec<f64> {
    let n = spec.degree;
    let mut points = vec![lo, hi];
    let (core_lo, core_hi, step_lo, step_hi);
    if spec.has_saddle() {
        let count = per_unit * n;
        let ts: Vec<f64> = (0..=count)
            .map(|j| y_to_logx(spec, j as f64 / per_unit as f64).expect("saddle profile"))
            .collect();
        step_lo = ts[1] - ts[0];
        step_hi = ts[count] - ts[count - 1];
        core_lo = ts[0];
        core_hi = ts[count];
        points.extend(ts);
    } else if spec.is_kac_like() {
        let centre = kac_centre(spec);
        let half = 10.0 / n as f64;
        let count = per_unit * n;
        points.extend((0..=count).map(|j| centre - half + 2.0 * half * j as f64 / count as f64));
        step_lo = 2.0 * half / count as f64;
        step_hi = step_lo;
        core_lo = centre - half;
        core_hi = centre + half;
    } else {
        // per_unit points between consecutive crossovers of c_n
        let mut cross = spec.crossovers();
        cross.sort_by(f64::total_cmp);
        cross.dedup();
        for w in cross.windows(2) {
            points.extend((0..per_unit).map(|j| w[0] + (w[1] - w[0]) * j as f64 / per_unit as f64));
        }
        let first = cross[0];
        let last = *cross.last().unwrap();
        points.push(last);
        let typical = if cross.len() > 1 {
            (last - first) / (cross.len() - 1) as f64
        } else {
            1.0
        };
        step_lo = typical / per_unit as f64;
        step_hi = step_lo;
        core_lo = first;
        core_hi = last;
    }
    pad(&mut points, core_lo, lo, step_lo);
    pad(&mut points, core_hi, hi, step_hi);
    points.retain(|t| *t >= lo && *t <= hi);
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// Counts the real roots of `draw` with the default scan options.
pub fn count_real_roots(
    draw: &CoefficientDraw,
    grid_points_per_unit_y: usize,
    max_refine_depth: u32,
) -> Result<RootCountSample> {
    count_real_roots_with(
        draw,
        &ScanOptions {
            grid_points_per_unit_y,
            max_refine_depth,
            ..ScanOptions::default()
        },
    )
}

/// Counts the real roots of `draw` on both half-axes.
pub fn count_real_roots_with(
    draw: &CoefficientDraw,
    options: &ScanOptions,
) -> Result<RootCountSample> {
    if options.grid_points_per_unit_y < 4 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 4 points per unit, got {}",
            options.grid_points_per_unit_y
        )));
    }
    let spec = draw.spec;
    let mut flags = CountFlags {
        zero_root: draw.log_coeffs[0].is_zero(),
        degree_reduced: draw.log_coeffs[spec.degree].is_zero(),
        ..CountFlags::default()
    };
    let pos_axis = HalfAxis::new(draw, Sign::Positive);
    let neg_axis = HalfAxis::new(draw, Sign::Negative);
    if pos_axis.terms.is_empty() {
        return Err(Error::InvalidArgument(
            "the zero polynomial has no root count".into(),
        ));
    }
    let edges = if options.tallies {
        interval_edges(&spec)
    } else {
        None
    };
    let zero = usize::from(flags.zero_root);

    let sample = |pos: usize, neg: usize, tallies, depth, uncertified, flags| RootCountSample {
        seed: draw.seed,
        spec,
        total_count: pos + neg + zero,
        positive_count: pos,
        negative_count: neg,
        interval_tallies: tallies,
        refinement_depth_used: depth,
        uncertified_cells: uncertified,
        flags,
    };

    if pos_axis.terms.len() == 1 {
        // a monomial has no nonzero roots
        let tallies = edges.map(|e| vec![(0, 0); e.len() - 1]);
        return Ok(sample(0, 0, tallies, 0, 0, flags));
    }

    let (lo, hi) = root_bounds(&pos_axis.terms);
    let mut grid = build_grid(&spec, options.grid_points_per_unit_y, lo, hi);
    if let Some(e) = &edges {
        grid.extend(e.iter().copied().filter(|t| *t > lo && *t < hi));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
    }

    let scans = (
        scan_axis(&pos_axis, &grid, options.max_refine_depth),
        scan_axis(&neg_axis, &grid, options.max_refine_depth),
    );
    match scans {
        (Ok(p), Ok(q)) => {
            flags.nudged = p.nudged || q.nudged;
            let tallies = edges.map(|e| {
                let mut out = vec![(0u32, 0u32); e.len() - 1];
                for (i, w) in grid.windows(2).enumerate() {
                    let mid = 0.5 * (w[0] + w[1]);
                    if mid < e[0] || mid > e[e.len() - 1] {
                        continue;
                    }
                    let k = e
                        .partition_point(|x| *x <= mid)
                        .saturating_sub(1)
                        .min(e.len() - 2);
                    out[k].0 += p.per_cell[i] as u32;
                    out[k].1 += q.per_cell[i] as u32;
                }
                out
            });
            Ok(sample(
                p.count,
                q.count,
                tallies,
                p.depth_used.max(q.depth_used),
                p.uncertified + q.uncertified,
                flags,
            ))
        }
        _ => {
            let chain = SturmChain::from_draw(draw, options.oracle_limit)?;
            flags.escalated_to_oracle = true;
            flags.nudged = true;
            let (neg, _, pos) = chain.axis_counts();
            let tallies = match edges {
                Some(e) => Some(oracle_tallies(&chain, &e)?),
                None => None,
            };
            Ok(sample(pos, neg, tallies, 0, 0, flags))
        }
    }
}

fn oracle_tallies(chain: &SturmChain, edges: &[f64]) -> Result<Vec<(u32, u32)>> {
    let at = |t: f64, sign: Sign| Bound::from_signed_log(SignedLogValue::new(sign, t));
    edges
        .windows(2)
        .map(|w| {
            let pos = chain.count(&at(w[0], Sign::Positive), &at(w[1], Sign::Positive))?;
            let neg = chain.count(&at(w[1], Sign::Negative), &at(w[0], Sign::Negative))?;
            Ok((pos as u32, neg as u32))
        })
        .collect()
}

/// Whether `sign(P(x_m)) = sign(g_m)` at `ln x_m = Y^{-1}(m)` on the
/// positive axis, for `m = 0..=n`; `None` where the value cancels.
pub fn sign_agreement(draw: &CoefficientDraw) -> Result<Vec<Option<bool>>> {
    let spec = draw.spec;
    (0..=spec.degree)
        .map(|m| {
            let t = y_to_logx(&spec, m as f64)?;
            let v = eval_signed_log(draw, t, Sign::Positive);
            Ok(if v.near_cancellation || v.value.is_zero() {
                None
            } else {
                Some(v.value.sign == Sign::of(draw.normals[m]))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_normals(spec: EnsembleSpec, g: &[f64]) -> CoefficientDraw {
        CoefficientDraw::from_normals(spec, 0, g.to_vec())
    }

    #[test]
    fn constant_term_only_is_positive_everywhere() {
        let spec = EnsembleSpec::alpha(1.5, 4).unwrap();
        let d = with_normals(spec, &[1.0, 0.0, 0.0, 0.0, 0.0]);
        for t in [-50.0, 0.0, 3.0, 400.0] {
            for s in [Sign::Positive, Sign::Negative] {
                assert_eq!(eval_signed_log(&d, t, s).value.sign, Sign::Positive);
            }
        }
    }

    #[test]
    fn linear_kac_flips_at_minus_one() {
        let d = with_normals(EnsembleSpec::kac(1).unwrap(), &[1.0, 1.0]);
        assert_eq!(
            eval_signed_log(&d, 0.1, Sign::Negative).value.sign,
            Sign::Negative
        );
        assert_eq!(
            eval_signed_log(&d, -0.1, Sign::Negative).value.sign,
            Sign::Positive
        );
        let at_root = eval_signed_log(&d, 0.0, Sign::Negative);
        assert!(at_root.value.is_zero() && at_root.near_cancellation);
        for t in [-3.0, 0.0, 3.0] {
            assert_eq!(
                eval_signed_log(&d, t, Sign::Positive).value.sign,
                Sign::Positive
            );
        }
        let c = count_real_roots(&d, 16, 8).unwrap();
        assert_eq!((c.negative_count, c.positive_count), (1, 0));
    }

    #[test]
    fn common_scale_flips_no_sign() {
        let d = EnsembleSpec::alpha(1.5, 20).unwrap().sample(5);
        let big = d.scaled(1e3);
        for i in -20..60 {
            let t = i as f64 * 0.5;
            for s in [Sign::Positive, Sign::Negative] {
                assert_eq!(
                    eval_signed_log(&d, t, s).value.sign,
                    eval_signed_log(&big, t, s).value.sign
                );
            }
        }
    }

    #[test]
    fn linear_draws_have_one_root() {
        for spec in [
            EnsembleSpec::alpha(3.0, 1).unwrap(),
            EnsembleSpec::kac(1).unwrap(),
            EnsembleSpec::weyl(1).unwrap(),
        ] {
            for seed in 0..50 {
                assert_eq!(
                    count_real_roots(&spec.sample(seed), 16, 8)
                        .unwrap()
                        .total_count,
                    1
                );
            }
        }
    }

    #[test]
    fn quadratic_with_roots_at_plus_minus_one() {
        let d = with_normals(EnsembleSpec::kac(2).unwrap(), &[-1.0, 0.0, 1.0]);
        let c = count_real_roots(&d, 16, 8).unwrap();
        assert_eq!(
            (c.negative_count, c.positive_count, c.total_count),
            (1, 1, 2)
        );
    }

    #[test]
    fn zero_constant_term_is_a_root() {
        // x^3 - x
        let d = with_normals(EnsembleSpec::kac(3).unwrap(), &[0.0, -1.0, 0.0, 1.0]);
        let c = count_real_roots(&d, 16, 8).unwrap();
        assert!(c.flags.zero_root);
        assert_eq!(c.total_count, 3);
    }

    #[test]
    fn rejects_coarse_grids() {
        let d = EnsembleSpec::kac(3).unwrap().sample(0);
        assert!(count_real_roots(&d, 3, 8).is_err());
    }

    #[test]
    fn root_bounds_contain_known_roots() {
        // roots at 1e-5 and 1e7: (x - 1e-5)(x - 1e7)
        let spec = EnsembleSpec::kac(2).unwrap();
        let logs = vec![
            SignedLogValue::from_real(1e2),
            SignedLogValue::from_real(-(1e7 + 1e-5)),
            SignedLogValue::from_real(1.0),
        ];
        let d = CoefficientDraw::from_log_coeffs(spec, 0, logs);
        let axis = HalfAxis::new(&d, Sign::Positive);
        let (lo, hi) = root_bounds(&axis.terms);
        assert!(lo < 1e-5f64.ln() && hi > 1e7f64.ln());
        assert_eq!(count_real_roots(&d, 16, 8).unwrap().positive_count, 2);
    }

    #[test]
    fn counts_have_the_parity_of_the_degree() {
        for (spec, seeds) in [
            (EnsembleSpec::alpha(0.0, 17).unwrap(), 100),
            (EnsembleSpec::alpha(1.5, 30).unwrap(), 100),
            (EnsembleSpec::alpha(3.0, 24).unwrap(), 100),
            (EnsembleSpec::mu(0.3, 40).unwrap(), 50),
            (EnsembleSpec::weyl(31).unwrap(), 50),
        ] {
            for seed in 0..seeds {
                let c = count_real_roots(&spec.sample(seed), 16, 8).unwrap();
                assert_eq!(c.total_count % 2, spec.degree % 2, "{spec} seed {seed}");
                assert_eq!(c.total_count, c.positive_count + c.negative_count);
                assert!(c.total_count <= spec.degree);
            }
        }
    }

    #[test]
    fn refinement_never_loses_roots() {
        let spec = EnsembleSpec::alpha(0.5, 20).unwrap();
        for seed in 0..40 {
            let d = spec.sample(seed);
            let mut prev = 0;
            for depth in 0..=8 {
                let c = count_real_roots(&d, 4, depth).unwrap().total_count;
                assert!(c >= prev, "seed {seed} depth {depth}");
                prev = c;
            }
        }
    }

    #[test]
    fn agrees_with_the_oracle() {
        for spec in [
            EnsembleSpec::alpha(0.0, 25).unwrap(),
            EnsembleSpec::alpha(1.5, 25).unwrap(),
            EnsembleSpec::alpha(3.0, 12).unwrap(),
            EnsembleSpec::kac(9).unwrap(),
        ] {
            for seed in 0..30 {
                let d = spec.sample(seed);
                let c = count_real_roots(&d, 16, 8).unwrap();
                let chain = SturmChain::from_draw(&d, DEFAULT_ORACLE_LIMIT).unwrap();
                let (neg, _, pos) = chain.axis_counts();
                assert_eq!(
                    (c.negative_count, c.positive_count),
                    (neg, pos),
                    "{spec} seed {seed}"
                );
            }
        }
    }

    #[test]
    fn tallies_cover_the_bulk_roots() {
        let spec = EnsembleSpec::alpha(3.0, 20).unwrap();
        for seed in 0..20 {
            let c = count_real_roots(&spec.sample(seed), 16, 8).unwrap();
            let tallies = c.interval_tallies.unwrap();
            assert_eq!(tallies.len(), 20);
            let in_bins: u32 = tallies.iter().map(|(p, q)| p + q).sum();
            assert!(in_bins as usize <= c.total_count);
        }
        assert!(
            count_real_roots(&EnsembleSpec::kac(5).unwrap().sample(0), 16, 8)
                .unwrap()
                .interval_tallies
                .is_none()
        );
    }
}
