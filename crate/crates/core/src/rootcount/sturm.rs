//! Exact real-root counting by Sturm sequences over the integers.
//!
//! Each coefficient is rounded to a dyadic rational with 60 significant bits
//! and the whole polynomial is scaled to integers. The chain is built with
//! the subresultant pseudo-remainder recurrence, which divides out the
//! known common factors so coefficient growth stays linear; only the
//! magnitudes of those factors are used and the Sturm signs are fixed
//! explicitly, so every chain member is a positive multiple of the
//! corresponding Euclidean Sturm remainder.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ensemble::CoefficientDraw;
use crate::error::{Error, Result};
use crate::lognum::{Sign, SignedLogValue};

/// Default largest degree accepted by the oracle.
pub const DEFAULT_ORACLE_LIMIT: usize = 64;

/// Significant bits kept when a coefficient is rounded.
pub const MANTISSA_BITS: u32 = 60;

/// An endpoint of a counting interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    NegInfinity,
    Finite(BigRational),
    PosInfinity,
}

impl Bound {
    /// The dyadic rational nearest to `x` (exact for every finite `f64`).
    pub fn from_f64(x: f64) -> Bound {
        if x == f64::INFINITY {
            Bound::PosInfinity
        } else if x == f64::NEG_INFINITY {
            Bound::NegInfinity
        } else {
            Bound::Finite(BigRational::from_float(x).expect("finite endpoint"))
        }
    }

    /// The 60-bit dyadic rounding of a log-form value, which may lie far
    /// outside the `f64` range.
    pub fn from_signed_log(v: SignedLogValue) -> Bound {
        match round_dyadic(v) {
            None => Bound::Finite(BigRational::zero()),
            Some((m, e)) => {
                let pow = BigInt::one() << (e.unsigned_abs() as usize);
                Bound::Finite(if e >= 0 {
                    BigRational::from_integer(m * pow)
                } else {
                    BigRational::new(m, pow)
                })
            }
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Bound::NegInfinity => 0,
            Bound::Finite(_) => 1,
            Bound::PosInfinity => 2,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.partial_cmp(b),
            _ => self.rank().partial_cmp(&other.rank()),
        }
    }
}

/// Rounds `sign * exp(logmag)` to `mantissa * 2^exponent` with a
/// `MANTISSA_BITS`-bit mantissa.
fn round_dyadic(v: SignedLogValue) -> Option<(BigInt, i64)> {
    if v.is_zero() {
        return None;
    }
    let log2 = v.logmag / std::f64::consts::LN_2;
    let exponent = log2.floor();
    let frac = log2 - exponent;
    let mantissa = (frac.exp2() * 2f64.powi(MANTISSA_BITS as i32 - 1)).round() as u64;
    let sign = if v.sign == Sign::Negative {
        BigSign::Minus
    } else {
        BigSign::Plus
    };
    Some((
        BigInt::from_biguint(sign, mantissa.into()),
        exponent as i64 - (MANTISSA_BITS as i64 - 1),
    ))
}

/// Integer polynomial with ascending coefficients and no trailing zeros.
type Poly = Vec<BigInt>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn degree(p: &Poly) -> usize {
    p.len() - 1
}

fn derivative(p: &Poly) -> Poly {
    let mut d: Poly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigInt::from(k))
        .collect();
    trim(&mut d);
    d
}

/// `lc(b)^{deg a - deg b + 1} a mod b`.
fn pseudo_remainder(a: &Poly, b: &Poly) -> Poly {
    let db = degree(b);
    let lc = b.last().expect("nonzero divisor");
    let mut r = a.clone();
    let mut steps = 0u32;
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let lead = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= lc;
        }
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &lead * bj;
        }
        trim(&mut r);
        steps += 1;
    }
    let full = (degree(a) - db + 1) as u32;
    if full > steps {
        let factor = lc.pow(full - steps);
        for c in r.iter_mut() {
            *c *= &factor;
        }
    }
    r
}

fn exact_div(p: &mut Poly, d: &BigInt) {
    if d.is_one() {
        return;
    }
    for c in p.iter_mut() {
        *c /= d;
    }
}

fn sign_of(c: &BigInt) -> i8 {
    match c.sign() {
        BigSign::Minus => -1,
        BigSign::NoSign => 0,
        BigSign::Plus => 1,
    }
}

/// Sign of `q^{deg p} p(num / q)` for `q > 0`.
fn sign_at(p: &Poly, num: &BigInt, den: &BigInt) -> i8 {
    let mut acc = BigInt::zero();
    let mut qpow = BigInt::one();
    // Horner in homogeneous form, from the top coefficient down
    for c in p.iter().rev() {
        acc = acc * num + c * &qpow;
        qpow *= den;
    }
    sign_of(&acc)
}

/// A Sturm chain of a rounded draw.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Poly>,
    /// Power of two removed from the coefficients.
    pub scale_exponent: i64,
    /// The chain is in `y = x / 2^x_exponent`.
    pub x_exponent: i64,
    /// Degree after dropping zero leading coefficients.
    pub effective_degree: usize,
    /// Set when the rounded draw had zero leading coefficients.
    pub degree_reduced: bool,
}

impl SturmChain {
    /// Rounds `draw` and builds the chain; fails above `limit`.
    pub fn from_draw(draw: &CoefficientDraw, limit: usize) -> Result<Self> {
        if draw.degree() > limit {
            return Err(Error::OracleLimit {
                degree: draw.degree(),
                limit,
            });
        }
        let mut rounded: Vec<Option<(BigInt, i64)>> =
            draw.log_coeffs.iter().map(|&c| round_dyadic(c)).collect();
        // substitute x = 2^s y with s levelling the outermost exponents, which
        // shortens the integers without moving any root across zero
        let nonzero: Vec<(usize, i64)> = rounded
            .iter()
            .enumerate()
            .filter_map(|(k, r)| r.as_ref().map(|(_, e)| (k, *e)))
            .collect();
        let x_exponent = match (nonzero.first(), nonzero.last()) {
            (Some(&(k0, e0)), Some(&(k1, e1))) if k1 > k0 => {
                (-((e1 - e0) as f64) / (k1 - k0) as f64).round() as i64
            }
            _ => 0,
        };
        for (k, r) in rounded.iter_mut().enumerate() {
            if let Some((_, e)) = r {
                *e += x_exponent * k as i64;
            }
        }
        let min_exp = rounded.iter().flatten().map(|(_, e)| *e).min();
        let Some(min_exp) = min_exp else {
            return Err(Error::InvalidArgument(
                "the zero polynomial has no root count".into(),
            ));
        };
        let mut poly: Poly = rounded
            .into_iter()
            .map(|r| match r {
                Some((m, e)) => m << ((e - min_exp) as usize),
                None => BigInt::zero(),
            })
            .collect();
        trim(&mut poly);
        let effective_degree = degree(&poly);
        let mut chain = Self::from_integer_coeffs(poly)?;
        chain.scale_exponent = min_exp;
        chain.x_exponent = x_exponent;
        chain.degree_reduced = effective_degree < draw.degree();
        Ok(chain)
    }

    /// Builds the chain for an exact integer polynomial (ascending order).
    pub fn from_integer_coeffs(mut p: Vec<BigInt>) -> Result<Self> {
        trim(&mut p);
        if p.is_empty() {
            return Err(Error::InvalidArgument(
                "the zero polynomial has no root count".into(),
            ));
        }
        let effective_degree = degree(&p);
        let mut chain = vec![p.clone()];
        let d1 = derivative(&p);
        if !d1.is_empty() {
            chain.push(d1);
        }
        // |psi| and the previous degree gap of the subresultant recurrence
        let mut psi = BigInt::one();
        let mut prev_gap = 0usize;
        let mut first = true;
        while chain.len() >= 2 {
            let a = &chain[chain.len() - 2];
            let b = &chain[chain.len() - 1];
            let gap = degree(a) - degree(b);
            let lc_b = b.last().unwrap().clone();
            let beta = if first {
                BigInt::one()
            } else {
                // the leading coefficient of the member before `b`
                let lc_a = a.last().unwrap().abs();
                psi = if prev_gap == 0 {
                    psi.clone()
                } else {
                    lc_a.pow(prev_gap as u32) / psi.pow(prev_gap as u32 - 1)
                };
                &lc_a * psi.pow(gap as u32)
            };
            let mut r = pseudo_remainder(a, b);
            if r.is_empty() {
                break;
            }
            exact_div(&mut r, &beta);
            // Sturm wants -(a mod b); prem multiplied by lc(b)^{gap+1}
            let flip = !(lc_b.is_negative() && (gap + 1) % 2 == 1);
            if flip {
                for c in r.iter_mut() {
                    *c = -&*c;
                }
            }
            chain.push(r);
            prev_gap = gap;
            first = false;
        }
        Ok(SturmChain {
            chain,
            scale_exponent: 0,
            x_exponent: 0,
            effective_degree,
            degree_reduced: false,
        })
    }

    /// `at / 2^x_exponent`.
    fn to_chain_variable(&self, at: &Bound) -> Bound {
        match at {
            Bound::Finite(r) if self.x_exponent != 0 => {
                let pow = BigInt::one() << (self.x_exponent.unsigned_abs() as usize);
                Bound::Finite(if self.x_exponent > 0 {
                    r / BigRational::from_integer(pow)
                } else {
                    r * BigRational::from_integer(pow)
                })
            }
            other => other.clone(),
        }
    }

    fn signs_at(&self, at: &Bound) -> Vec<i8> {
        match at {
            Bound::PosInfinity => self
                .chain
                .iter()
                .map(|p| sign_of(p.last().unwrap()))
                .collect(),
            Bound::NegInfinity => self
                .chain
                .iter()
                .map(|p| {
                    let s = sign_of(p.last().unwrap());
                    if degree(p) % 2 == 1 {
                        -s
                    } else {
                        s
                    }
                })
                .collect(),
            Bound::Finite(r) => self
                .chain
                .iter()
                .map(|p| sign_at(p, r.numer(), r.denom()))
                .collect(),
        }
    }

    fn variations(&self, at: &Bound) -> usize {
        let signs: Vec<i8> = self.signs_at(at).into_iter().filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    fn is_root(&self, at: &Bound) -> bool {
        match at {
            Bound::Finite(r) => sign_at(&self.chain[0], r.numer(), r.denom()) == 0,
            _ => false,
        }
    }

    /// Distinct real roots in the open interval `(lo, hi)`.
    pub fn count(&self, lo: &Bound, hi: &Bound) -> Result<usize> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument("empty counting interval".into()));
        }
        let (lo, hi) = (self.to_chain_variable(lo), self.to_chain_variable(hi));
        let v_lo = self.variations(&lo);
        let v_hi = self.variations(&hi);
        // V(lo) - V(hi) counts roots in (lo, hi]
        Ok(v_lo - v_hi - usize::from(self.is_root(&hi)))
    }

    /// Whether `x = 0` is a root of the rounded polynomial.
    pub fn zero_is_root(&self) -> bool {
        self.chain[0][0].is_zero()
    }

    /// Roots on the negative axis, at zero, and on the positive axis.
    pub fn axis_counts(&self) -> (usize, bool, usize) {
        let zero = Bound::Finite(BigRational::zero());
        let neg = self.count(&Bound::NegInfinity, &zero).expect("ordered");
        let pos = self.count(&zero, &Bound::PosInfinity).expect("ordered");
        (neg, self.zero_is_root(), pos)
    }
}

/// Exact number of distinct real roots of the rounded draw in `(lo, hi)`.
pub fn sturm_count(draw: &CoefficientDraw, lo: &Bound, hi: &Bound) -> Result<usize> {
    SturmChain::from_draw(draw, DEFAULT_ORACLE_LIMIT)?.count(lo, hi)
}
