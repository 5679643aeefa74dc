//! Half-integer spin `j = N/2` and parsing of decimal / rational numeric input.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Collective spin `j`, stored as the atom count `N = 2j` so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin {
    twice: u64,
}

impl Spin {
    /// `j = twice / 2`. Rejects zero.
    pub fn from_twice(twice: u64) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin("0".into()));
        }
        Ok(Spin { twice })
    }

    /// Accepts `j` only when `2j` is a positive integer (within 1e-9).
    pub fn from_f64(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 0.5 || (twice - twice.round()).abs() > 1e-9 || twice > 1e15
        {
            return Err(Error::InvalidSpin(j.to_string()));
        }
        Self::from_twice(twice.round() as u64)
    }

    /// Nearest half-integer to `j`, never below 1/2. Used for swept `j` axes.
    pub fn nearest(j: f64) -> Result<Self> {
        if !j.is_finite() || j <= 0.0 {
            return Err(Error::InvalidSpin(j.to_string()));
        }
        Self::from_twice(((2.0 * j).round() as u64).max(1))
    }

    /// Number of atoms, `N = 2j`.
    pub fn twice(self) -> u64 {
        self.twice
    }

    pub fn value<T: Scalar>(self) -> T {
        T::from_count(self.twice) / T::lit(2.0)
    }

    pub fn n_atoms<T: Scalar>(self) -> T {
        T::from_count(self.twice)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let j = parse_number(s).map_err(|_| Error::InvalidSpin(s.to_string()))?;
        Spin::from_f64(j)
    }
}

/// Parses `"0.5"`, `"1e-3"` or a simple rational `"1/2"`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Config(format!("not a number: `{s}`"));
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            num / den
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_half_integers() {
        assert_eq!("1/2".parse::<Spin>().unwrap().twice(), 1);
        assert_eq!("0.5".parse::<Spin>().unwrap().twice(), 1);
        assert_eq!("10".parse::<Spin>().unwrap().twice(), 20);
        assert_eq!("7/2".parse::<Spin>().unwrap().to_string(), "7/2");
        assert_eq!(Spin::from_twice(20).unwrap().to_string(), "10");
    }

    #[test]
    fn rejects_bad_spins() {
        assert!("0".parse::<Spin>().is_err());
        assert!("-1".parse::<Spin>().is_err());
        assert!("0.3".parse::<Spin>().is_err());
        assert!("1/3".parse::<Spin>().is_err());
        assert!("abc".parse::<Spin>().is_err());
    }

    #[test]
    fn rational_numbers() {
        assert_eq!(parse_number("3/4").unwrap(), 0.75);
        assert_eq!(parse_number(" 2.5 ").unwrap(), 2.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("inf").is_err());
    }

    #[test]
    fn nearest_rounds_to_half_integers() {
        assert_eq!(Spin::nearest(3.3).unwrap().twice(), 7);
        assert_eq!(Spin::nearest(0.1).unwrap().twice(), 1);
        assert!(Spin::nearest(0.0).is_err());
    }
}
