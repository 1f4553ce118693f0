//! Power units accepted for the transmit budget.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerUnit {
    Watt,
    DbW,
    DbM,
}

impl PowerUnit {
    pub fn to_watts(self, value: f64) -> f64 {
        match self {
            PowerUnit::Watt => value,
            PowerUnit::DbW => 10f64.powf(value / 10.0),
            PowerUnit::DbM => 10f64.powf((value - 30.0) / 10.0),
        }
    }

    /// Whether the unit is logarithmic, in which case any value is allowed
    /// and sweep grids are spaced evenly in decibels.
    pub fn is_log(self) -> bool {
        !matches!(self, PowerUnit::Watt)
    }
}

impl fmt::Display for PowerUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PowerUnit::Watt => "W",
            PowerUnit::DbW => "dBW",
            PowerUnit::DbM => "dBm",
        })
    }
}

/// A parsed unit plus a flag set when a bare `dB` was read as dBm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParsedUnit {
    pub unit: PowerUnit,
    pub assumed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownUnit(pub String);

impl fmt::Display for UnknownUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown power unit `{}` (expected W, dBW or dBm)",
            self.0
        )
    }
}

impl FromStr for ParsedUnit {
    type Err = UnknownUnit;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (unit, assumed) = match s {
            "W" | "w" => (PowerUnit::Watt, false),
            "dBW" | "dBw" | "dbw" => (PowerUnit::DbW, false),
            "dBm" | "dbm" => (PowerUnit::DbM, false),
            "dB" | "db" => (PowerUnit::DbM, true),
            other => return Err(UnknownUnit(other.to_string())),
        };
        Ok(ParsedUnit { unit, assumed })
    }
}
