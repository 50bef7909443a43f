//! Signed log-domain reals.
//!
//! A [`SignedLogValue`] stores `sign * exp(logmag)`. Products are exact in the
//! representation (signs multiply, logs add) and sums go through
//! [`log_sum_exp_signed`], which factors out the largest magnitude so every
//! exponential it evaluates lies in `[0, 1]`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

/// Relative size below which a signed sum is declared an exact zero.
pub const CANCELLATION_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// A real number held as a sign and the natural log of its magnitude.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SignedLogValue {
    pub sign: Sign,
    pub logmag: f64,
}

#[allow(clippy::should_implement_trait)]
impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        sign: Sign::Zero,
        logmag: f64::NEG_INFINITY,
    };

    pub const ONE: SignedLogValue = SignedLogValue {
        sign: Sign::Positive,
        logmag: 0.0,
    };

    /// Builds a value, collapsing any zero sign or `-inf` magnitude to exact zero.
    pub fn new(sign: Sign, logmag: f64) -> Self {
        if sign == Sign::Zero || logmag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLogValue { sign, logmag }
        }
    }

    pub fn positive(logmag: f64) -> Self {
        Self::new(Sign::Positive, logmag)
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(Sign::of(x), x.abs().ln())
    }

    /// Converts back to `f64`; overflows to `±inf` and underflows to `±0`.
    pub fn to_real(self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            s => s.as_f64() * self.logmag.exp(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == Sign::Zero
    }

    /// Multiplies by `exp(log_factor)`.
    pub fn scale_log(self, log_factor: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            Self::new(self.sign, self.logmag + log_factor)
        }
    }

    /// Quotient `self / other`; panics on a zero divisor.
    pub fn div(self, other: SignedLogValue) -> Self {
        assert!(!other.is_zero(), "division by a zero SignedLogValue");
        if self.is_zero() {
            return self;
        }
        Self::new(self.sign * other.sign, self.logmag - other.logmag)
    }

    pub fn add(self, other: SignedLogValue) -> Self {
        log_sum_exp_signed(&[self, other])
    }

    pub fn sub(self, other: SignedLogValue) -> Self {
        log_sum_exp_signed(&[self, -other])
    }

    /// Compares magnitudes only.
    pub fn cmp_magnitude(&self, other: &SignedLogValue) -> Ordering {
        self.logmag.total_cmp(&other.logmag)
    }
}

impl Mul for SignedLogValue {
    type Output = SignedLogValue;

    fn mul(self, rhs: SignedLogValue) -> SignedLogValue {
        if self.is_zero() || rhs.is_zero() {
            return SignedLogValue::ZERO;
        }
        SignedLogValue::new(self.sign * rhs.sign, self.logmag + rhs.logmag)
    }
}

impl Neg for SignedLogValue {
    type Output = SignedLogValue;

    fn neg(self) -> SignedLogValue {
        SignedLogValue {
            sign: -self.sign,
            logmag: self.logmag,
        }
    }
}

impl PartialEq for SignedLogValue {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.is_zero() || self.logmag == other.logmag)
    }
}

impl fmt::Display for SignedLogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            Sign::Positive => write!(f, "+exp({})", self.logmag),
            Sign::Negative => write!(f, "-exp({})", self.logmag),
        }
    }
}

/// Result of a signed log-domain sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSum {
    pub value: SignedLogValue,
    /// Set when the terms cancelled to below [`CANCELLATION_THRESHOLD`] of
    /// their absolute sum and the value was forced to zero. Exact zeros
    /// produced by empty or all-zero input are not flagged.
    pub near_cancellation: bool,
}

/// Sums signed log-domain terms; see [`log_sum_exp_signed_flagged`].
pub fn log_sum_exp_signed(terms: &[SignedLogValue]) -> SignedLogValue {
    log_sum_exp_signed_flagged(terms).value
}

/// Sums signed log-domain terms by factoring out the largest magnitude.
///
/// The scaled terms are accumulated with Neumaier compensation. A result
/// whose magnitude falls below `CANCELLATION_THRESHOLD` times the sum of
/// absolute values is returned as zero with `near_cancellation` set.
pub fn log_sum_exp_signed_flagged(terms: &[SignedLogValue]) -> LogSum {
    let max = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.logmag)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogSum {
            value: SignedLogValue::ZERO,
            near_cancellation: false,
        };
    }

    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_sum = 0.0f64;
    for t in terms.iter().filter(|t| !t.is_zero()) {
        let v = (t.logmag - max).exp();
        abs_sum += v;
        let v = t.sign.as_f64() * v;
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    let total = sum + comp;

    if total.abs() <= CANCELLATION_THRESHOLD * abs_sum {
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

/// `ln(sum(exp(l)))` over plain log-magnitudes; `-inf` for an empty slice.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}
