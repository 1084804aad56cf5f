//! Exact rational scalars and the numeric literal parser shared by the CLI and
//! the library.
//!
//! Values that can certify exact statements (critical rays, facet
//! orthogonality, Turán densities) are carried as [`Rational`]. Inputs that
//! cannot be represented exactly fall back to [`Scalar::Float`].

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational with 128-bit numerator and denominator.
pub type Rational = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn qi(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64()
        .unwrap_or_else(|| *x.numer() as f64 / *x.denom() as f64)
}

/// Floor of a rational as an integer.
pub fn floor_i128(x: &Rational) -> i128 {
    x.floor().to_integer()
}

/// A user-supplied scalar: exact when written as an integer, a fraction or a
/// plain decimal literal, floating point otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<Rational> {
        match self {
            Scalar::Exact(r) => Some(*r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<i64> for Scalar {
    fn from(x: i64) -> Self {
        Scalar::Exact(qi(x as i128))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty numeric literal".into()));
        }
        if let Some((num, den)) = s.split_once('/') {
            let n = parse_exact_decimal(num.trim())
                .ok_or_else(|| Error::Parse(format!("bad numerator in `{s}`")))?;
            let d = parse_exact_decimal(den.trim())
                .ok_or_else(|| Error::Parse(format!("bad denominator in `{s}`")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            return Ok(Scalar::Exact(n / d));
        }
        if let Some(r) = parse_exact_decimal(s) {
            return Ok(Scalar::Exact(r));
        }
        let x: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: `{s}`")))?;
        if !x.is_finite() {
            return Err(Error::Parse(format!("non-finite value `{s}`")));
        }
        Ok(Scalar::Float(x))
    }
}

/// Parses `[-+]digits[.digits]` exactly; returns `None` for anything else
/// (exponents, overflow).
fn parse_exact_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if frac_part.len() > 30 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i128.checked_pow(frac_part.len() as u32)?;
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Parses a comma-separated pair such as `1,-3/4`.
pub fn parse_pair(s: &str) -> Result<(Scalar, Scalar)> {
    let mut parts = s.split(',');
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Parse(format!("expected two comma-separated numbers, got `{s}`")));
    };
    Ok((a.parse()?, b.parse()?))
}

/// Sign of an exact rational as -1, 0 or +1.
pub fn signum(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}
