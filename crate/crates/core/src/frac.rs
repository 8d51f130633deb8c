//! Exact fractional parameters (ε, p, α, β, ...).
//!
//! Thresholds such as `(1 - ε) d |S|` are compared in integer arithmetic so
//! that boundary cases never depend on floating-point rounding.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A rational parameter. Serialized as `"num/den"`; parsed from either
/// `"num/den"` or a plain decimal such as `"0.3"` (converted exactly).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Frac(pub Rational64);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("cannot parse fraction {0:?}")]
pub struct FracParseError(pub String);

impl Frac {
    pub fn new(num: i64, den: i64) -> Self {
        Frac(Rational64::new(num, den))
    }

    pub fn from_integer(v: i64) -> Self {
        Frac(Rational64::from_integer(v))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn one_minus(&self) -> Frac {
        Frac(Rational64::one() - self.0)
    }

    /// `value <= self * scale`, exactly.
    pub fn bounds_above(&self, value: u64, scale: u64) -> bool {
        (value as i128) * (self.denom() as i128) <= (self.numer() as i128) * (scale as i128)
    }

    /// `value >= self * scale`, exactly.
    pub fn bounds_below(&self, value: u64, scale: u64) -> bool {
        (value as i128) * (self.denom() as i128) >= (self.numer() as i128) * (scale as i128)
    }

    /// `floor(self * scale)`; negative products clamp to zero.
    pub fn floor_times(&self, scale: u64) -> u64 {
        let p = (self.numer() as i128) * (scale as i128);
        if p <= 0 {
            0
        } else {
            (p / self.denom() as i128) as u64
        }
    }

    /// `ceil(self * scale)`; negative products clamp to zero.
    pub fn ceil_times(&self, scale: u64) -> u64 {
        let p = (self.numer() as i128) * (scale as i128);
        if p <= 0 {
            0
        } else {
            let den = self.denom() as i128;
            ((p + den - 1) / den) as u64
        }
    }

    /// Strictly inside `(lo, hi)`.
    pub fn in_open(&self, lo: Frac, hi: Frac) -> bool {
        *self > lo && *self < hi
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Frac {
    type Err = FracParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FracParseError(s.to_string());
        let t = s.trim();
        if let Some((a, b)) = t.split_once('/') {
            let num: i64 = a.trim().parse().map_err(|_| err())?;
            let den: i64 = b.trim().parse().map_err(|_| err())?;
            if den == 0 {
                return Err(err());
            }
            return Ok(Frac::new(num, den));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || frac_part.len() > 15
        {
            return Err(err());
        }
        let den = 10i64.pow(frac_part.len() as u32);
        let ip: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| err())? };
        let fp: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| err())? };
        let num = ip.checked_mul(den).and_then(|v| v.checked_add(fp)).ok_or_else(err)?;
        let r = Rational64::new(num, den);
        Ok(Frac(if neg { -r } else { r }))
    }
}

impl Serialize for Frac {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Frac {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(v) => Ok(Frac::from_integer(v)),
            // Floats go through their shortest decimal rendering.
            Raw::Float(v) => format!("{v}").parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Zero for Frac {
    fn zero() -> Self {
        Frac(Rational64::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl std::ops::Add for Frac {
    type Output = Frac;
    fn add(self, rhs: Frac) -> Frac {
        Frac(self.0 + rhs.0)
    }
}
