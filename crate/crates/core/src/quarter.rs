use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Calendar quarter, ordered by (year, quarter). Serializes as `YYYYQn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct QuarterKey {
    pub year: i32,
    pub quarter: u8,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid quarter `{0}` (expected YYYYQn)")]
pub struct ParseQuarterError(pub String);

impl QuarterKey {
    /// Panics if `quarter` is not in 1..=4.
    pub fn new(year: i32, quarter: u8) -> Self {
        assert!((1..=4).contains(&quarter), "quarter must be 1..=4, got {quarter}");
        QuarterKey { year, quarter }
    }

    pub fn of_month(year: i32, month: u8) -> Self {
        QuarterKey::new(year, (month - 1) / 3 + 1)
    }

    pub fn next(self) -> Self {
        if self.quarter == 4 {
            QuarterKey::new(self.year + 1, 1)
        } else {
            QuarterKey::new(self.year, self.quarter + 1)
        }
    }

    pub fn prev(self) -> Self {
        if self.quarter == 1 {
            QuarterKey::new(self.year - 1, 4)
        } else {
            QuarterKey::new(self.year, self.quarter - 1)
        }
    }

    /// Months belonging to this quarter.
    pub fn months(self) -> [u8; 3] {
        let first = (self.quarter - 1) * 3 + 1;
        [first, first + 1, first + 2]
    }

    /// Decimal year at the quarter midpoint, for plotting.
    pub fn as_decimal_year(self) -> f64 {
        self.year as f64 + (self.quarter as f64 - 0.5) / 4.0
    }

    /// Inclusive range of quarters.
    pub fn range_inclusive(start: Self, end: Self) -> impl Iterator<Item = QuarterKey> {
        std::iter::successors(Some(start), |q| Some(q.next())).take_while(move |q| *q <= end)
    }
}

impl fmt::Display for QuarterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for QuarterKey {
    type Err = ParseQuarterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseQuarterError(s.to_string());
        let t = s.trim();
        let (year, q) = t.split_once(['Q', 'q']).ok_or_else(err)?;
        let year: i32 = year.parse().map_err(|_| err())?;
        let quarter: u8 = q.parse().map_err(|_| err())?;
        if !(1..=4).contains(&quarter) {
            return Err(err());
        }
        Ok(QuarterKey { year, quarter })
    }
}

impl From<QuarterKey> for String {
    fn from(q: QuarterKey) -> String {
        q.to_string()
    }
}

impl TryFrom<String> for QuarterKey {
    type Error = ParseQuarterError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
