//! Exact rational scale factors.
//!
//! Scale factors such as `0.01` are kept as reduced fractions so that
//! `ceil(base × SF)` is computed exactly; `0.01 × 6_000_000` in binary
//! floating point lands just above 60 000.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScaleFactor {
    num: u64,
    den: u64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ScaleFactorError {
    #[error("scale factor must be positive, got `{0}`")]
    NotPositive(String),
    #[error("invalid scale factor `{0}`")]
    Invalid(String),
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl ScaleFactor {
    pub const ONE: ScaleFactor = ScaleFactor { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, ScaleFactorError> {
        if num == 0 || den == 0 {
            return Err(ScaleFactorError::NotPositive(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(sf: u64) -> Result<Self, ScaleFactorError> {
        Self::new(sf, 1)
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_at_least_one(&self) -> bool {
        self.num >= self.den
    }

    /// `ceil(base × SF)`.
    pub fn scale_ceil(&self, base: u64) -> u64 {
        let p = u128::from(base) * u128::from(self.num);
        let d = u128::from(self.den);
        p.div_ceil(d) as u64
    }

    /// `floor(log2(SF))` for `SF ≥ 1`.
    pub fn floor_log2(&self) -> Option<u32> {
        if !self.is_at_least_one() {
            return None;
        }
        let mut k = 0u32;
        while u128::from(self.den) << (k + 1) <= u128::from(self.num) {
            k += 1;
        }
        Some(k)
    }

    pub fn times(&self, k: u64) -> Self {
        Self::new(self.num * k, self.den).expect("positive factor stays positive")
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl FromStr for ScaleFactor {
    type Err = ScaleFactorError;

    /// Accepts decimal (`0.01`, `10`) or fraction (`1/3`) notation.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let invalid = || ScaleFactorError::Invalid(s.to_string());
        if let Some((n, d)) = t.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| invalid())?;
            let d: u64 = d.trim().parse().map_err(|_| invalid())?;
            return Self::new(n, d).map_err(|_| ScaleFactorError::NotPositive(s.to_string()));
        }
        let (int_part, frac_part) = t.split_once('.').unwrap_or((t, ""));
        if (int_part.is_empty() && frac_part.is_empty())
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || frac_part.len() > 18
        {
            return Err(invalid());
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let digits = format!("{int_part}{frac_part}");
        let num: u64 = if digits.is_empty() {
            0
        } else {
            digits.parse().map_err(|_| invalid())?
        };
        Self::new(num, den).map_err(|_| ScaleFactorError::NotPositive(s.to_string()))
    }
}

impl fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            return write!(f, "{}", self.num);
        }
        // Terminating decimals print as decimals, everything else as n/d.
        let mut d = self.den;
        let mut digits = 0u32;
        for p in [2u64, 5] {
            while d % p == 0 {
                d /= p;
            }
        }
        if d == 1 {
            let mut den = self.den;
            while 10u64.pow(digits) % den != 0 {
                digits += 1;
                if digits > 18 {
                    break;
                }
            }
            den = 10u64.pow(digits);
            let scaled = u128::from(self.num) * u128::from(den) / u128::from(self.den);
            let int = scaled / u128::from(den);
            let frac = scaled % u128::from(den);
            write!(f, "{int}.{frac:0width$}", width = digits as usize)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for ScaleFactor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ScaleFactor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
