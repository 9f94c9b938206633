//! Scalar abstraction shared by every geometric routine.
//!
//! All algorithms are generic over [`Scalar`], which is implemented for `f32`,
//! `f64` and the arbitrary precision [`Rational`]. Exact arithmetic has a zero
//! tolerance, so every predicate degenerates to an exact sign test.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number, always kept in lowest terms.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{input}` as a scalar: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: &'static str,
}

/// Field-like number type the library computes with.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `true` for exact (rational) arithmetic.
    const EXACT: bool;
    /// Short name used in reports: `"exact"` or `"float"`.
    const MODE: &'static str;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn to_f64(&self) -> f64;

    /// Relative tolerance used by geometric predicates. Zero when exact.
    fn tolerance() -> Self;

    /// Lossless (exact) or 17-significant-digit (float) serialization.
    fn to_report_string(&self) -> String;

    /// Accepts `p`, `p/q` and plain decimals such as `-1.25`.
    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError>;

    fn half() -> Self {
        Self::one() / Self::from_i64(2)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            const MODE: &'static str = "float";

            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn tolerance() -> Self {
                $tol
            }

            fn to_report_string(&self) -> String {
                format!("{:.16e}", *self as f64)
            }

            fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
                let s = s.trim();
                if let Some((n, d)) = s.split_once('/') {
                    let n: $t = n.trim().parse().map_err(|_| bad(s, "bad numerator"))?;
                    let d: $t = d.trim().parse().map_err(|_| bad(s, "bad denominator"))?;
                    if d == 0.0 {
                        return Err(bad(s, "zero denominator"));
                    }
                    return Ok(n / d);
                }
                s.parse().map_err(|_| bad(s, "not a number"))
            }
        }
    };
}

impl_float_scalar!(f64, 1e-12);
impl_float_scalar!(f32, 1e-5);

fn bad(input: &str, reason: &'static str) -> ParseScalarError {
    ParseScalarError {
        input: input.to_string(),
        reason,
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        // Large numerators and denominators overflow f64 individually.
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let shift = self.denom().bits().max(self.numer().bits()) as i64 - 60;
                let n = (self.numer() >> shift.max(0) as usize).to_f64().unwrap_or(0.0);
                let d = (self.denom() >> shift.max(0) as usize).to_f64().unwrap_or(1.0);
                n / d
            }
        }
    }

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn to_report_string(&self) -> String {
        self.to_string()
    }

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(bad(s, "empty"));
        }
        if let Some((n, d)) = s.split_once('/') {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad(s, "bad numerator"))?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad(s, "bad denominator"))?;
            if d.is_zero() {
                return Err(bad(s, "zero denominator"));
            }
            return Ok(Rational::new(n, d));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let negative = int.trim_start().starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !frac.chars().all(|c| c.is_ascii_digit())
                || !int_digits.chars().all(|c| c.is_ascii_digit())
            {
                return Err(bad(s, "bad decimal"));
            }
            let digits = format!("{int_digits}{frac}");
            let digits = if digits.is_empty() { "0".to_string() } else { digits };
            let mut n = BigInt::from_str(&digits).map_err(|_| bad(s, "bad decimal"))?;
            if negative {
                n = -n;
            }
            let d = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Rational::new(n, d));
        }
        BigInt::from_str(s)
            .map(Rational::from_integer)
            .map_err(|_| bad(s, "not a rational"))
    }
}

/// `|x| <= tolerance * scale`; exact zero test in rational mode.
pub fn is_negligible<T: Scalar>(x: &T, scale: &T) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.abs() <= T::tolerance() * scale.abs()
    }
}

/// Sign of `x` with values below the tolerance treated as zero.
pub fn sign_with_tolerance<T: Scalar>(x: &T, scale: &T) -> Ordering {
    if is_negligible(x, scale) {
        Ordering::Equal
    } else if x.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

pub fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// A real number `coefficient * pi`.
///
/// Busemann-Hausdorff quantities are carried this way so that exact mode stays
/// exact; comparisons between two such values compare coefficients.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct PiMultiple<T>(pub T);

impl<T: Scalar> PiMultiple<T> {
    pub fn zero() -> Self {
        PiMultiple(T::zero())
    }

    pub fn coefficient(&self) -> &T {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64() * std::f64::consts::PI
    }

    /// `"pi/4"`, `"3*pi/2"`, `"-pi"` in exact mode; a decimal otherwise.
    pub fn to_report_string(&self) -> String {
        if !T::EXACT {
            return format!("{:.16e}", self.to_f64());
        }
        let (num, den) = split_fraction(&self.0.to_report_string());
        if num == "0" {
            return "0".to_string();
        }
        let head = match num.as_str() {
            "1" => "pi".to_string(),
            "-1" => "-pi".to_string(),
            n => format!("{n}*pi"),
        };
        match den {
            Some(d) => format!("{head}/{d}"),
            None => head,
        }
    }
}

/// A real number `coefficient / pi` (Holmes-Thompson values).
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct OverPi<T>(pub T);

impl<T: Scalar> OverPi<T> {
    pub fn coefficient(&self) -> &T {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64() / std::f64::consts::PI
    }

    /// `"2/pi"`, `"3/(4*pi)"` in exact mode; a decimal otherwise.
    pub fn to_report_string(&self) -> String {
        if !T::EXACT {
            return format!("{:.16e}", self.to_f64());
        }
        let (num, den) = split_fraction(&self.0.to_report_string());
        if num == "0" {
            return "0".to_string();
        }
        match den {
            Some(d) => format!("{num}/({d}*pi)"),
            None => format!("{num}/pi"),
        }
    }
}

fn split_fraction(s: &str) -> (String, Option<String>) {
    match s.split_once('/') {
        Some((n, d)) => (n.to_string(), Some(d.to_string())),
        None => (s.to_string(), None),
    }
}

impl<T: Scalar> fmt::Display for PiMultiple<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_report_string())
    }
}

impl<T: Scalar> fmt::Display for OverPi<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_report_string())
    }
}

/// Unit volumes of Euclidean balls, as multiples of a power of pi.
pub mod unit_ball {
    /// `eps_1 = 2`.
    pub const EPS1: f64 = 2.0;
    /// `eps_2 = pi`; exact code keeps it symbolic via [`super::PiMultiple`].
    pub const EPS2_PI_COEFF: (i64, i64) = (1, 1);
    /// `eps_3 = 4 pi / 3`.
    pub const EPS3_PI_COEFF: (i64, i64) = (4, 3);

    pub fn eps_f64(k: usize) -> Option<f64> {
        use std::f64::consts::PI;
        match k {
            1 => Some(EPS1),
            2 => Some(PI),
            3 => Some(4.0 * PI / 3.0),
            _ => None,
        }
    }
}
