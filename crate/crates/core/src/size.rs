//! Fixed-point sizes measured in micro-units (six decimal places).

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Number of micro-units in one unit.
pub const SCALE: u64 = 1_000_000;

/// A non-negative fixed-point quantity with six decimal places.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Size(pub u64);

impl Size {
    pub const ZERO: Size = Size(0);

    pub fn from_micros(m: u64) -> Self {
        Size(m)
    }

    pub fn micros(self) -> u64 {
        self.0
    }

    pub fn from_units(u: u64) -> Self {
        Size(u * SCALE)
    }

    /// Rounds a float to the nearest micro-unit. Negative and non-finite inputs are rejected.
    pub fn from_f64(x: f64) -> Result<Self, Error> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Parse(format!("invalid size {x}")));
        }
        Ok(Size((x * SCALE as f64).round() as u64))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.0), BigInt::from(SCALE))
    }
}

impl std::ops::Add for Size {
    type Output = Size;
    fn add(self, o: Size) -> Size {
        Size(self.0.checked_add(o.0).expect("size overflow"))
    }
}

impl std::ops::AddAssign for Size {
    fn add_assign(&mut self, o: Size) {
        *self = *self + o;
    }
}

impl std::ops::Sub for Size {
    type Output = Size;
    fn sub(self, o: Size) -> Size {
        Size(self.0.checked_sub(o.0).expect("size underflow"))
    }
}

impl std::iter::Sum for Size {
    fn sum<I: Iterator<Item = Size>>(iter: I) -> Size {
        iter.fold(Size::ZERO, |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Size> for Size {
    fn sum<I: Iterator<Item = &'a Size>>(iter: I) -> Size {
        iter.fold(Size::ZERO, |a, b| a + *b)
    }
}

impl FromStr for Size {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let bad = || Error::Parse(format!("invalid size '{s}'"));
        if t.is_empty() || t.starts_with('-') || t.starts_with('+') {
            return Err(bad());
        }
        let (int, frac) = match t.split_once('.') {
            Some((i, f)) => (i, f),
            None => (t, ""),
        };
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if frac.len() > 6 {
            return Err(Error::Parse(format!("size '{s}' has more than 6 decimal places")));
        }
        let ip: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let mut fp: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        for _ in frac.len()..6 {
            fp *= 10;
        }
        ip.checked_mul(SCALE)
            .and_then(|v| v.checked_add(fp))
            .map(Size)
            .ok_or_else(bad)
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ip = self.0 / SCALE;
        let fp = self.0 % SCALE;
        if fp == 0 {
            return write!(f, "{ip}");
        }
        let s = format!("{fp:06}");
        write!(f, "{ip}.{}", s.trim_end_matches('0'))
    }
}

impl Serialize for Size {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Size {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(u64),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) => s.parse().map_err(|e: Error| match e {
                Error::Parse(m) => serde::de::Error::custom(m),
                other => serde::de::Error::custom(other),
            }),
            Raw::Int(i) => i
                .checked_mul(SCALE)
                .map(Size)
                .ok_or_else(|| serde::de::Error::custom("size overflow")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!("12.5".parse::<Size>().unwrap(), Size(12_500_000));
        assert_eq!("0.000001".parse::<Size>().unwrap(), Size(1));
        assert_eq!(".5".parse::<Size>().unwrap(), Size(500_000));
        assert_eq!(Size(12_500_000).to_string(), "12.5");
        assert_eq!(Size(3_000_000).to_string(), "3");
        assert_eq!(Size(1).to_string(), "0.000001");
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "-1", "1.0000001", "abc", "1.2.3", "."] {
            assert!(s.parse::<Size>().is_err(), "{s}");
        }
    }
}
