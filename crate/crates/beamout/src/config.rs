//! Scenario config files: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! # distance sweep
//! sigma1 = 1.0
//! sigma2 = 0.5
//! phi = pi/2
//! theta_3db = 0.1
//! a_m = 1e-4
//! lambda = 0.05
//! gamma_th = 1e-7
//! p_max = 100
//! sweep_axis = d
//! sweep_min = 1
//! sweep_max = 120
//! sweep_points = 120
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use beamout_core::channel::{pmax_for_budget, AntennaConfig, LinkConfig};
use beamout_core::optimizer::{optimal_beamwidth, BudgetedLink};
use beamout_core::{Covariance2x2, PositioningErrorModel};
use thiserror::Error;

use crate::units::{ParsedUnit, PowerUnit};

pub const KEYS: [&str; 18] = [
    "sigma1",
    "sigma2",
    "phi",
    "theta_3db",
    "a_m",
    "d",
    "lambda",
    "gamma_th",
    "p_max",
    "p_t",
    "p_t_unit",
    "sweep_axis",
    "sweep_min",
    "sweep_max",
    "sweep_points",
    "mc_samples",
    "mc_seed",
    "quad_tol",
];

pub const DEFAULT_SIGMA1: f64 = 1.0;
pub const DEFAULT_SIGMA2: f64 = 0.5;
pub const DEFAULT_MC_SAMPLES: u64 = 100_000;
pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key `{key}` (first set on line {first})")]
    Duplicate {
        line: usize,
        key: String,
        first: usize,
    },

    #[error("line {line}: invalid value for `{key}`: {reason}")]
    Invalid {
        line: usize,
        key: &'static str,
        reason: String,
    },

    #[error("missing required key `{0}`")]
    Missing(&'static str),

    #[error("line {line}: `{key}` {reason}")]
    Conflict {
        line: usize,
        key: &'static str,
        reason: &'static str,
    },

    #[error("{0}")]
    Command(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Distance,
    TransmitPower,
    Beamwidth,
}

impl SweepAxis {
    pub fn key(self) -> &'static str {
        match self {
            SweepAxis::Distance => "d",
            SweepAxis::TransmitPower => "p_t",
            SweepAxis::Beamwidth => "theta_3db",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Sweep {
    /// Evenly spaced values from `min` to `max` inclusive, in the units the
    /// config uses for the axis.
    pub fn grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Power {
    /// Fixed boresight power `P_max` in watts.
    Boresight(f64),
    /// Transmit budget `P_t` in watts; `P_max` follows from the beamwidth.
    Budget(f64),
    /// Budget supplied by the sweep axis.
    SweptBudget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: PositioningErrorModel,
    /// `None` means the per-point optimal beamwidth (budget mode only) or
    /// the sweep axis.
    pub theta_3db: Option<f64>,
    pub a_m: f64,
    pub d: Option<f64>,
    pub lambda: f64,
    pub gamma_th: f64,
    pub power: Power,
    pub p_t_unit: PowerUnit,
    pub sweep: Option<Sweep>,
    pub mc_samples: u64,
    pub mc_seed: u64,
    pub quad_tol: f64,
    /// Non-fatal notes produced while parsing, for standard error.
    pub warnings: Vec<String>,
}

/// One fully resolved evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub antenna: AntennaConfig,
    pub link: LinkConfig,
    pub covariance: Covariance2x2,
    pub p_t: Option<f64>,
}

/// Parses an angle: a plain number or a multiple of `pi` such as `pi/4`,
/// `3*pi/4`, `-pi/2` or `2pi`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().ok().filter(|d| *d != 0.0)?),
        None => (s.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi")?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    Some(c * PI / den)
}

struct Entries {
    values: HashMap<&'static str, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values: HashMap<&'static str, (usize, String)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            let known =
                KEYS.iter()
                    .find(|k| **k == key)
                    .ok_or_else(|| ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })?;
            if let Some((first, _)) = values.get(known) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                    first: *first,
                });
            }
            values.insert(known, (line, value.to_string()));
        }
        Ok(Self { values })
    }

    fn line(&self, key: &'static str) -> usize {
        self.values.get(key).map_or(0, |(l, _)| *l)
    }

    fn has(&self, key: &'static str) -> bool {
        self.values.contains_key(key)
    }

    fn invalid(&self, key: &'static str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            line: self.line(key),
            key,
            reason: reason.into(),
        }
    }

    fn get<T>(
        &self,
        key: &'static str,
        parse: impl Fn(&str) -> Option<T>,
        what: &str,
    ) -> Result<Option<T>, ConfigError> {
        match self.values.get(key) {
            None => Ok(None),
            Some((_, v)) => parse(v)
                .map(Some)
                .ok_or_else(|| self.invalid(key, format!("expected {what}, got `{v}`"))),
        }
    }

    fn number(&self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        let v = self.get(key, |s| s.parse::<f64>().ok(), "a number")?;
        match v {
            Some(x) if !x.is_finite() => Err(self.invalid(key, "must be finite")),
            _ => Ok(v),
        }
    }

    fn positive(&self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        match self.number(key)? {
            Some(x) if x <= 0.0 => Err(self.invalid(key, "must be > 0")),
            v => Ok(v),
        }
    }

    fn conflict(&self, key: &'static str, reason: &'static str) -> ConfigError {
        ConfigError::Conflict {
            line: self.line(key),
            key,
            reason,
        }
    }
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let e = Entries::parse(text)?;
        let mut warnings = Vec::new();

        let sigma1 = e.positive("sigma1")?.unwrap_or(DEFAULT_SIGMA1);
        let sigma2 = e.positive("sigma2")?.unwrap_or(DEFAULT_SIGMA2);
        let phi = e
            .get("phi", parse_angle, "an angle in radians (e.g. 0.5, pi/4)")?
            .unwrap_or(0.0);
        let model = PositioningErrorModel::new(sigma1, sigma2, phi).map_err(|err| {
            let key = if e.has("sigma2") { "sigma2" } else { "sigma1" };
            e.invalid(key, err.to_string())
        })?;

        let a_m = e.number("a_m")?.ok_or(ConfigError::Missing("a_m"))?;
        if !(a_m > 0.0 && a_m < 1.0) {
            return Err(e.invalid("a_m", "must lie in (0, 1)"));
        }
        let lambda = e
            .positive("lambda")?
            .ok_or(ConfigError::Missing("lambda"))?;
        let gamma_th = e
            .positive("gamma_th")?
            .ok_or(ConfigError::Missing("gamma_th"))?;
        let theta_3db = e.positive("theta_3db")?;
        let d = e.positive("d")?;

        let unit = match e.get(
            "p_t_unit",
            |s| s.parse::<ParsedUnit>().ok(),
            "one of W, dBW, dBm",
        )? {
            Some(p) => {
                if p.assumed {
                    warnings.push(format!(
                        "line {}: bare `dB` power unit read as dBm; write dBW or dBm to be explicit",
                        e.line("p_t_unit")
                    ));
                }
                p.unit
            }
            None => PowerUnit::Watt,
        };
        if e.has("p_t_unit") && !e.has("p_t") && !e.has("sweep_axis") {
            return Err(e.conflict("p_t_unit", "is set but no transmit budget is given"));
        }
        let p_t = if unit.is_log() {
            e.number("p_t")?
        } else {
            e.positive("p_t")?
        };
        let p_max = e.positive("p_max")?;

        let sweep = Self::parse_sweep(&e, unit)?;
        if let Some(s) = &sweep {
            let key = s.axis.key();
            if e.has(key) {
                return Err(e.conflict(key, "is given both as a value and as the sweep axis"));
            }
        }

        let swept_budget = matches!(
            sweep,
            Some(Sweep {
                axis: SweepAxis::TransmitPower,
                ..
            })
        );
        let power = match (p_max, p_t, swept_budget) {
            (Some(_), Some(_), _) => return Err(e.conflict("p_t", "cannot be combined with p_max")),
            (Some(_), None, true) => {
                return Err(e.conflict("p_max", "cannot be combined with a p_t sweep"))
            }
            (None, None, true) => Power::SweptBudget,
            (Some(w), None, false) => Power::Boresight(w),
            (None, Some(v), false) => Power::Budget(unit.to_watts(v)),
            (None, None, false) => return Err(ConfigError::Missing("p_max or p_t")),
            (None, Some(_), true) => unreachable!("rejected as an axis conflict"),
        };

        let theta_swept = matches!(
            sweep,
            Some(Sweep {
                axis: SweepAxis::Beamwidth,
                ..
            })
        );
        if theta_3db.is_none() && !theta_swept && matches!(power, Power::Boresight(_)) {
            return Err(ConfigError::Missing("theta_3db"));
        }
        let d_swept = matches!(
            sweep,
            Some(Sweep {
                axis: SweepAxis::Distance,
                ..
            })
        );
        if d.is_none() && !d_swept {
            return Err(ConfigError::Missing("d"));
        }

        let mc_samples = e
            .get(
                "mc_samples",
                |s| s.replace('_', "").parse::<u64>().ok(),
                "a non-negative integer",
            )?
            .unwrap_or(DEFAULT_MC_SAMPLES);
        let mc_seed = e
            .get(
                "mc_seed",
                |s| s.parse::<u64>().ok(),
                "a non-negative integer",
            )?
            .unwrap_or(0);
        let quad_tol = e.positive("quad_tol")?.unwrap_or(DEFAULT_QUAD_TOL);
        if !(quad_tol > 1e-14 && quad_tol < 1e-4) {
            return Err(e.invalid("quad_tol", "must lie in (1e-14, 1e-4)"));
        }

        Ok(Self {
            model,
            theta_3db,
            a_m,
            d,
            lambda,
            gamma_th,
            power,
            p_t_unit: unit,
            sweep,
            mc_samples,
            mc_seed,
            quad_tol,
            warnings,
        })
    }

    fn parse_sweep(e: &Entries, unit: PowerUnit) -> Result<Option<Sweep>, ConfigError> {
        let axis = e.get(
            "sweep_axis",
            |s| match s {
                "d" => Some(SweepAxis::Distance),
                "p_t" => Some(SweepAxis::TransmitPower),
                "theta_3db" => Some(SweepAxis::Beamwidth),
                _ => None,
            },
            "one of d, p_t, theta_3db",
        )?;
        let Some(axis) = axis else {
            for key in ["sweep_min", "sweep_max", "sweep_points"] {
                if e.has(key) {
                    return Err(e.conflict(key, "needs a sweep_axis"));
                }
            }
            return Ok(None);
        };
        let log_axis = axis == SweepAxis::TransmitPower && unit.is_log();
        let bound = |key| {
            if log_axis {
                e.number(key)
            } else {
                e.positive(key)
            }
        };
        let min = bound("sweep_min")?.ok_or(ConfigError::Missing("sweep_min"))?;
        let max = bound("sweep_max")?.ok_or(ConfigError::Missing("sweep_max"))?;
        let points = e
            .get(
                "sweep_points",
                |s| s.parse::<usize>().ok(),
                "a positive integer",
            )?
            .ok_or(ConfigError::Missing("sweep_points"))?;
        if points == 0 {
            return Err(e.invalid("sweep_points", "must be >= 1"));
        }
        if max < min || (max == min && points != 1) {
            return Err(e.invalid("sweep_max", "must exceed sweep_min"));
        }
        if points == 1 && max != min {
            return Err(e.invalid("sweep_points", "a range needs at least 2 points"));
        }
        Ok(Some(Sweep {
            axis,
            min,
            max,
            points,
        }))
    }

    pub fn covariance(&self) -> Covariance2x2 {
        self.model.covariance()
    }

    /// The transmit budget in watts, if the config fixes one.
    pub fn budget(&self) -> Option<f64> {
        match self.power {
            Power::Budget(w) => Some(w),
            _ => None,
        }
    }

    /// Resolves the scenario at one sweep value (`None` without a sweep).
    ///
    /// Values on the `p_t` axis are in the configured unit. A budget
    /// without a fixed beamwidth uses the optimal beamwidth for that budget.
    pub fn scenario_at(&self, axis_value: Option<f64>) -> Result<Scenario, beamout_core::Error> {
        let axis = self.sweep.map(|s| s.axis);
        let on = |a: SweepAxis| if axis == Some(a) { axis_value } else { None };

        let d = on(SweepAxis::Distance)
            .or(self.d)
            .expect("validated: d or a d sweep");
        let link = LinkConfig::new(d, self.lambda, self.gamma_th)?;
        let p_t = match self.power {
            Power::Budget(w) => Some(w),
            Power::SweptBudget => on(SweepAxis::TransmitPower).map(|v| self.p_t_unit.to_watts(v)),
            Power::Boresight(_) => None,
        };
        let theta = match on(SweepAxis::Beamwidth).or(self.theta_3db) {
            Some(t) => t,
            None => {
                let p_t = p_t.expect("validated: theta_3db or a budget");
                optimal_beamwidth(&BudgetedLink::new(p_t, link, self.a_m)?).theta_star
            }
        };
        let p_max = match (self.power, p_t) {
            (Power::Boresight(w), _) => w,
            (_, Some(p_t)) => pmax_for_budget(p_t, theta),
            (_, None) => unreachable!("budget resolved above"),
        };
        Ok(Scenario {
            antenna: AntennaConfig::new(theta, self.a_m, p_max)?,
            link,
            covariance: self.covariance(),
            p_t,
        })
    }
}
