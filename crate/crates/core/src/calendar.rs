//! Calendar months in ISO `YYYY-MM` form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A calendar month. Ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month {
    year: i32,
    month: u8,
}

impl Month {
    pub fn new(year: i32, month: u8) -> Result<Self, Error> {
        if !(1..=12).contains(&month) {
            return Err(Error::param(format!("month {month} out of range 1..=12")));
        }
        if !(0..=9999).contains(&year) {
            return Err(Error::param(format!("year {year} out of range 0..=9999")));
        }
        Ok(Month { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_ordinal(ord: i64) -> Self {
        Month {
            year: ord.div_euclid(12) as i32,
            month: (ord.rem_euclid(12) + 1) as u8,
        }
    }

    /// Number of months from `self` to `other` (negative when `other` is earlier).
    pub fn months_until(self, other: Month) -> i64 {
        other.ordinal() - self.ordinal()
    }

    pub fn add_months(self, n: i64) -> Month {
        Month::from_ordinal(self.ordinal() + n)
    }

    pub fn succ(self) -> Month {
        self.add_months(1)
    }

    /// Month index of `self` for a model whose origin maps to t = 1.
    pub fn index_from(self, origin: Month) -> f64 {
        (origin.months_until(self) + 1) as f64
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = Error;

    /// Accepts `YYYY-MM`. A trailing day (`YYYY-MM-DD`) is rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::param(format!("invalid month `{s}`, expected YYYY-MM"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u8 = m.parse().map_err(|_| bad())?;
        Month::new(year, month).map_err(|_| bad())
    }
}

impl Serialize for Month {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Month {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let m: Month = "2023-01".parse().unwrap();
        assert_eq!(m.to_string(), "2023-01");
        assert!("2023-1".parse::<Month>().is_err());
        assert!("2023-13".parse::<Month>().is_err());
        assert!("2023-01-01".parse::<Month>().is_err());
    }

    #[test]
    fn arithmetic() {
        let a: Month = "2006-01".parse().unwrap();
        let b: Month = "2023-01".parse().unwrap();
        assert_eq!(a.months_until(b), 204);
        assert_eq!(b.index_from(a), 205.0);
        assert_eq!(a.add_months(204), b);
        assert_eq!("2021-12".parse::<Month>().unwrap().succ().to_string(), "2022-01");
        assert_eq!(a.add_months(-1).to_string(), "2005-12");
    }
}
