//! Exact rational scalars used by the geometry and tropical modules.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number. 128-bit numerators keep products of scaled
/// coordinates and fitted coefficients well clear of overflow.
pub type Rational = num_rational::Ratio<i128>;

/// Largest denominator produced when converting a binary64 value.
pub const MAX_FLOAT_DENOMINATOR: i128 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("non-finite value")]
    NonFinite,
}

pub fn rat(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(v as i128)
}

/// Parses `"p/q"`, `"p"` or a decimal such as `"-0.375"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| malformed())?;
        let d: i128 = d.trim().parse().map_err(|_| malformed())?;
        if d == 0 {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
            return Err(malformed());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole_abs: i128 = whole
            .trim_start_matches(['-', '+'])
            .parse::<i128>()
            .or_else(|e| if whole.trim_start_matches(['-', '+']).is_empty() { Ok(0) } else { Err(e) })
            .map_err(|_| malformed())?;
        let den = 10i128.checked_pow(frac.len() as u32).ok_or_else(malformed)?;
        let frac_num: i128 = frac.parse().map_err(|_| malformed())?;
        let mag = Rational::new(whole_abs * den + frac_num, den);
        return Ok(if negative { -mag } else { mag });
    }
    let n: i128 = s.parse().map_err(|_| malformed())?;
    Ok(Rational::from_integer(n))
}

/// Best rational approximation of `x` with denominator at most
/// [`MAX_FLOAT_DENOMINATOR`] (continued-fraction convergents).
pub fn rational_from_f64(x: f64) -> Result<Rational, ParseRationalError> {
    if !x.is_finite() {
        return Err(ParseRationalError::NonFinite);
    }
    let floor = x.floor();
    // values within 2^-40 of an integer snap to it
    if (x - floor) < 2f64.powi(-40) {
        return Ok(Rational::from_integer(floor as i128));
    }
    if (floor + 1.0 - x) < 2f64.powi(-40) {
        return Ok(Rational::from_integer(floor as i128 + 1));
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > MAX_FLOAT_DENOMINATOR {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rem - a;
        if frac.abs() < 1e-15 || ((h1 as f64 / k1 as f64) - x).abs() < 2f64.powi(-40) {
            break;
        }
        rem = 1.0 / frac;
    }
    Ok(Rational::new(h1, k1))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn floor_to_i64(r: &Rational) -> i64 {
    r.floor().to_integer() as i64
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.abs().gcd(&b.abs())
}

/// Formats as `"p/q"` or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter: rationals travel as strings.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = NumOrString::deserialize(d)?;
        v.to_rational().map_err(serde::de::Error::custom)
    }
}

/// A JSON scalar that may be a number or a string fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumOrString {
    Int(i64),
    Float(f64),
    Str(String),
}

impl NumOrString {
    pub fn to_rational(&self) -> Result<Rational, ParseRationalError> {
        match self {
            NumOrString::Int(i) => Ok(Rational::from_integer(*i as i128)),
            NumOrString::Float(f) => rational_from_f64(*f),
            NumOrString::Str(s) => parse_rational(s),
        }
    }
}

impl From<&Rational> for NumOrString {
    fn from(r: &Rational) -> Self {
        NumOrString::Str(format_rational(r))
    }
}

/// Display wrapper for compact diagnostics.
pub struct Show<'a>(pub &'a Rational);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational(" -4/6 ").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational("0.375").unwrap(), rat(3, 8));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(matches!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn float_conversion_recovers_simple_fractions() {
        assert_eq!(rational_from_f64(0.5).unwrap(), rat(1, 2));
        assert_eq!(rational_from_f64(1.0 / 3.0).unwrap(), rat(1, 3));
        assert_eq!(rational_from_f64(0.3).unwrap(), rat(3, 10));
        assert_eq!(rational_from_f64(2.0 - 1e-13).unwrap(), int(2));
        assert_eq!(rational_from_f64(-1.25).unwrap(), rat(-5, 4));
        assert!(rational_from_f64(f64::NAN).is_err());
    }

    #[test]
    fn formatting_round_trips() {
        for r in [rat(-7, 3), int(4), rat(1, 256)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
}
