//! Extended-range arithmetic for nonnegative reals kept as natural logarithms.
//!
//! A [`LogNum`] represents `exp(ln)` for a finite `ln`, or exactly zero when
//! `ln = -∞`. Values such as `exp(1/U) - 1` for `U ≈ 10⁻¹²` are ordinary
//! `LogNum`s even though their magnitude is far outside `f64`.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Sub};
use core::str::FromStr;

use crate::error::{invalid, Error};

/// Magnitudes with `|ln| <= PLAIN_LIMIT` are printed as plain decimals.
pub const PLAIN_LIMIT: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogNum {
    ln: f64,
}

impl LogNum {
    pub const ZERO: LogNum = LogNum {
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogNum = LogNum { ln: 0.0 };
    /// Largest representable value; stands in for quantities beyond range.
    pub const MAX: LogNum = LogNum { ln: f64::MAX };

    /// Builds a value from its natural logarithm. `-∞` is zero.
    ///
    /// Panics on NaN or `+∞`.
    pub fn from_ln(ln: f64) -> Self {
        assert!(
            !ln.is_nan() && ln != f64::INFINITY,
            "LogNum log value must be finite or -inf, got {ln}"
        );
        LogNum { ln }
    }

    pub fn try_from_ln(ln: f64) -> Result<Self, Error> {
        if ln.is_nan() || ln == f64::INFINITY {
            Err(Error::Overflow)
        } else {
            Ok(LogNum { ln })
        }
    }

    /// Panics if `x` is negative, NaN or infinite.
    pub fn from_value(x: f64) -> Self {
        assert!(
            x >= 0.0 && x.is_finite(),
            "LogNum represents finite nonnegative values, got {x}"
        );
        LogNum { ln: libm::log(x) }
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.ln
    }

    /// The represented value as an `f64`; saturates to `+∞` above `f64::MAX`.
    pub fn value(self) -> f64 {
        libm::exp(self.ln)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// `self - other`, or `None` when `other > self`.
    pub fn checked_sub(self, other: LogNum) -> Option<LogNum> {
        match self.cmp(&other) {
            Ordering::Less => None,
            Ordering::Equal => Some(LogNum::ZERO),
            Ordering::Greater if other.is_zero() => Some(self),
            Ordering::Greater => Some(LogNum {
                ln: self.ln + log1mexp(other.ln - self.ln),
            }),
        }
    }

    pub fn max(self, other: LogNum) -> LogNum {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Eq for LogNum {}

impl PartialOrd for LogNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogNum {
    fn cmp(&self, other: &Self) -> Ordering {
        // ln is never NaN, so total_cmp agrees with numeric order (-0.0 aside).
        if self.ln == other.ln {
            Ordering::Equal
        } else {
            self.ln.total_cmp(&other.ln)
        }
    }
}

impl Add for LogNum {
    type Output = LogNum;

    fn add(self, rhs: LogNum) -> LogNum {
        let (hi, lo) = if self.ln >= rhs.ln {
            (self.ln, rhs.ln)
        } else {
            (rhs.ln, self.ln)
        };
        if lo == f64::NEG_INFINITY {
            return LogNum { ln: hi };
        }
        LogNum {
            ln: hi + libm::log1p(libm::exp(lo - hi)),
        }
    }
}

impl AddAssign for LogNum {
    fn add_assign(&mut self, rhs: LogNum) {
        *self = *self + rhs;
    }
}

impl Sub for LogNum {
    type Output = LogNum;

    /// Panics when `rhs > self`; negative results are outside the domain.
    fn sub(self, rhs: LogNum) -> LogNum {
        match self.checked_sub(rhs) {
            Some(d) => d,
            None => panic!(
                "LogNum subtraction underflow: ln {} - ln {}",
                self.ln, rhs.ln
            ),
        }
    }
}

impl fmt::Display for LogNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("0")
        } else if self.ln.abs() <= PLAIN_LIMIT {
            write!(f, "{}", self.value())
        } else {
            write!(f, "log:{}", self.ln)
        }
    }
}

impl FromStr for LogNum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("log:") {
            let ln: f64 = rest
                .parse()
                .map_err(|_| invalid("malformed log-scale number"))?;
            LogNum::try_from_ln(ln)
        } else {
            let x: f64 = s.parse().map_err(|_| invalid("malformed number"))?;
            if !(x >= 0.0) || !x.is_finite() {
                return Err(invalid("LogNum must be finite and nonnegative"));
            }
            Ok(LogNum::from_value(x))
        }
    }
}

/// `ln(1 - e^d)` for `d <= 0`.
#[inline]
pub fn log1mexp(d: f64) -> f64 {
    if d > -core::f64::consts::LN_2 {
        libm::log(-libm::expm1(d))
    } else {
        libm::log1p(-libm::exp(d))
    }
}

/// `ln(1 + e^z)`.
#[inline]
pub fn softplus(z: f64) -> f64 {
    if z == f64::NEG_INFINITY {
        0.0
    } else if z > 40.0 {
        // ln(1 + e^-z) < e^-40 is below half an ulp of z.
        z
    } else if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}

/// `ln(e^z - 1)` for `z >= 0`; `-∞` at zero.
#[inline]
pub fn ln_expm1(z: f64) -> f64 {
    if z > 40.0 {
        z
    } else if z > 36.0 {
        z + libm::log1p(-libm::exp(-z))
    } else {
        libm::log(libm::expm1(z))
    }
}

impl core::ops::Mul for LogNum {
    type Output = LogNum;

    /// Product of the represented values.
    fn mul(self, other: LogNum) -> LogNum {
        if self.is_zero() || other.is_zero() {
            LogNum::ZERO
        } else {
            LogNum::from_ln(self.ln + other.ln)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(x: f64) -> LogNum {
        LogNum::from_value(x)
    }

    #[test]
    fn add_small_values() {
        let s = rep(2.0) + rep(3.0);
        assert!((s.value() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn zero_is_additive_identity() {
        let x = rep(7.25);
        assert_eq!(LogNum::ZERO + x, x);
        assert_eq!(x + LogNum::ZERO, x);
        assert_eq!(LogNum::ZERO + LogNum::ZERO, LogNum::ZERO);
    }

    #[test]
    fn add_equal_huge_terms() {
        let a = LogNum::from_ln(1e12);
        assert_eq!((a + a).ln(), 1e12 + core::f64::consts::LN_2);
    }

    #[test]
    fn sub_cases() {
        assert!(((rep(5.0) - rep(2.0)).value() - 3.0).abs() < 1e-14);
        let a = LogNum::from_ln(100.0);
        assert_eq!(a - a, LogNum::ZERO);
        let half = LogNum::from_ln(100.0 - core::f64::consts::LN_2);
        let d = (a - half).ln();
        assert!((d - (100.0 - core::f64::consts::LN_2)).abs() < 1e-13);
        assert_eq!(a - LogNum::ZERO, a);
    }

    #[test]
    #[should_panic(expected = "underflow")]
    fn sub_below_zero_panics() {
        let _ = rep(2.0) - rep(5.0);
    }

    #[test]
    fn checked_sub_reports_contract_violation() {
        assert_eq!(rep(2.0).checked_sub(rep(5.0)), None);
    }

    #[test]
    fn ordering() {
        assert_eq!(LogNum::ZERO.cmp(&rep(1.0)), Ordering::Less);
        assert_eq!(rep(2.0).cmp(&rep(2.0)), Ordering::Equal);
        assert_eq!(
            LogNum::from_ln(50.0).cmp(&LogNum::from_ln(49.999)),
            Ordering::Greater
        );
    }

    #[test]
    fn display_switches_to_log_form() {
        assert_eq!(LogNum::ZERO.to_string(), "0");
        assert_eq!(rep(2.5).to_string(), "2.5");
        assert_eq!(LogNum::from_ln(1e4).to_string(), "log:10000");
        let back: LogNum = "log:10000".parse().unwrap();
        assert_eq!(back.ln(), 1e4);
        let plain: LogNum = "2.5".parse().unwrap();
        assert_eq!(plain, rep(2.5));
        assert!("-1".parse::<LogNum>().is_err());
    }

    #[test]
    fn helper_functions() {
        assert!((softplus(0.0) - core::f64::consts::LN_2).abs() < 1e-16);
        assert_eq!(softplus(f64::NEG_INFINITY), 0.0);
        assert_eq!(softplus(1e6), 1e6);
        assert!((ln_expm1(2.0) - (2.0f64.exp() - 1.0).ln()).abs() < 1e-15);
        assert_eq!(ln_expm1(0.0), f64::NEG_INFINITY);
        assert_eq!(ln_expm1(1e5), 1e5);
        assert!((log1mexp(-1e-20) - (1e-20f64).ln()).abs() < 1e-12);
    }
}
