//! Closed-form growth laws indexed by month.
//!
//! Every model maps a month index `t` (with the model's `t_origin` at
//! `t = 1`) to a cumulative value. Parameter layouts per family:
//!
//! | family            | params        | value                         |
//! |-------------------|---------------|-------------------------------|
//! | `Constant`        | `[b]`         | `b`                           |
//! | `Linear`          | `[a, b]`      | `a·t + b`                     |
//! | `Polynomial(d)`   | `[c0 … cd]`   | `Σ cₖ·tᵏ`                     |
//! | `Logarithmic`     | `[a, s, b]`   | `a·ln(t+s) + b`               |
//! | `ReciprocalLog`   | `[a, s, b]`   | `a / ln(t+s) + b`             |
//! | `TOverLnT`        | `[a, s, b]`   | `a·(t+s)/ln(t+s) + b`         |
//! | `LogIntegral`     | `[a, s, b]`   | `a·Li(t+s) + b`               |
//! | `TLnT`            | `[a, k, b]`   | `a·t·ln t + k·t + b`          |
//! | `ShiftedTLnT`     | `[a, s, b]`   | `a·(t+s)·ln(t+s) + b`         |
//! | `Exponential`     | `[r, b]`      | `exp(r·t + b)`                |
//! | `SubExponential`  | `[a, s, b]`   | `exp(a·t/ln(t+s) + b)`        |

mod catalog;
mod li;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::calendar::Month;
use crate::error::{Error, Result};

pub use catalog::{paper_catalog, CatalogEntry};
pub use li::{li_paper_approx, log_integral, MODEL_LI_TOL};

/// Growth-law family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Constant,
    Linear,
    Polynomial(u8),
    Logarithmic,
    ReciprocalLog,
    TOverLnT,
    LogIntegral,
    TLnT,
    ShiftedTLnT,
    Exponential,
    SubExponential,
}

impl Family {
    /// One representative of every family, with cubic standing in for `Polynomial`.
    pub const ALL: [Family; 11] = [
        Family::Constant,
        Family::Linear,
        Family::Polynomial(3),
        Family::Logarithmic,
        Family::ReciprocalLog,
        Family::TOverLnT,
        Family::LogIntegral,
        Family::TLnT,
        Family::ShiftedTLnT,
        Family::Exponential,
        Family::SubExponential,
    ];

    /// Families whose growth lies between `t/ln t` and `t·ln t`.
    pub const QUASI_LINEAR: [Family; 5] = [
        Family::Linear,
        Family::TOverLnT,
        Family::LogIntegral,
        Family::TLnT,
        Family::ShiftedTLnT,
    ];

    pub fn arity(self) -> usize {
        match self {
            Family::Constant => 1,
            Family::Linear | Family::Exponential => 2,
            Family::Polynomial(d) => d as usize + 1,
            _ => 3,
        }
    }

    /// Whether the family carries a shift `s` at params[1] inside a logarithm.
    pub fn has_shift(self) -> bool {
        matches!(
            self,
            Family::Logarithmic
                | Family::ReciprocalLog
                | Family::TOverLnT
                | Family::LogIntegral
                | Family::ShiftedTLnT
                | Family::SubExponential
        )
    }

    /// Smallest admissible value of `t + s` for shifted families.
    pub(crate) fn min_log_arg(self) -> f64 {
        match self {
            Family::LogIntegral => 2.0,
            Family::ReciprocalLog | Family::TOverLnT | Family::SubExponential => 1.0,
            _ => 0.0,
        }
    }

    pub(crate) fn log_arg_ok(self, u: f64) -> bool {
        match self {
            Family::LogIntegral => u >= 2.0,
            _ => u > self.min_log_arg(),
        }
    }

    /// Families fitted on log-values.
    pub fn fits_in_log_space(self) -> bool {
        matches!(self, Family::Exponential | Family::SubExponential)
    }

    /// Index of the coefficient that sets the direction of growth.
    pub fn leading_index(self) -> Option<usize> {
        match self {
            Family::Constant => None,
            Family::Polynomial(d) => Some(d as usize),
            _ => Some(0),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Polynomial(d) => write!(f, "Polynomial({d})"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("Polynomial(").and_then(|r| r.strip_suffix(')')) {
            let d: u8 = rest
                .parse()
                .map_err(|_| Error::param(format!("bad polynomial degree in `{s}`")))?;
            if d == 0 || d > 10 {
                return Err(Error::param(format!("polynomial degree {d} outside 1..=10")));
            }
            return Ok(Family::Polynomial(d));
        }
        Ok(match s {
            "Constant" => Family::Constant,
            "Linear" => Family::Linear,
            "Logarithmic" => Family::Logarithmic,
            "ReciprocalLog" => Family::ReciprocalLog,
            "TOverLnT" => Family::TOverLnT,
            "LogIntegral" => Family::LogIntegral,
            "TLnT" => Family::TLnT,
            "ShiftedTLnT" => Family::ShiftedTLnT,
            "Exponential" => Family::Exponential,
            "SubExponential" => Family::SubExponential,
            _ => return Err(Error::param(format!("unknown family `{s}`"))),
        })
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A parameterised growth law anchored to a calendar month.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthModel {
    family: Family,
    params: Vec<f64>,
    t_origin: Month,
}

#[derive(Deserialize)]
struct RawModel {
    family: Family,
    params: Vec<f64>,
    t_origin: Month,
}

impl<'de> Deserialize<'de> for GrowthModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawModel::deserialize(deserializer)?;
        GrowthModel::new(raw.family, raw.params, raw.t_origin).map_err(serde::de::Error::custom)
    }
}

impl GrowthModel {
    pub fn new(family: Family, params: Vec<f64>, t_origin: Month) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(Error::param(format!(
                "{family} takes {} parameters, got {}",
                family.arity(),
                params.len()
            )));
        }
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::param(format!("non-finite parameter {p}")));
        }
        // t = 1 must already be inside the domain.
        if family.has_shift() && !family.log_arg_ok(1.0 + params[1]) {
            return Err(Error::param(format!(
                "{family} shift {} leaves t = 1 outside the domain",
                params[1]
            )));
        }
        Ok(GrowthModel {
            family,
            params,
            t_origin,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn t_origin(&self) -> Month {
        self.t_origin
    }

    pub fn with_origin(mut self, origin: Month) -> Self {
        self.t_origin = origin;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 1.0 {
            return Err(Error::domain(format!("month index must be >= 1, got {t}")));
        }
        if self.family.has_shift() {
            let u = t + self.params[1];
            if !self.family.log_arg_ok(u) {
                return Err(Error::domain(format!(
                    "{}: argument t+s = {u} outside domain",
                    self.family
                )));
            }
        }
        Ok(())
    }

    /// Model value at month index `t`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let p = &self.params;
        let v = match self.family {
            Family::Constant => p[0],
            Family::Linear => p[0] * t + p[1],
            Family::Polynomial(_) => p.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Family::Logarithmic => p[0] * (t + p[1]).ln() + p[2],
            Family::ReciprocalLog => p[0] / (t + p[1]).ln() + p[2],
            Family::TOverLnT => {
                let u = t + p[1];
                p[0] * u / u.ln() + p[2]
            }
            Family::LogIntegral => p[0] * log_integral(t + p[1], MODEL_LI_TOL)? + p[2],
            Family::TLnT => p[0] * t * t.ln() + p[1] * t + p[2],
            Family::ShiftedTLnT => {
                let u = t + p[1];
                p[0] * u * u.ln() + p[2]
            }
            Family::Exponential => (p[0] * t + p[1]).exp(),
            Family::SubExponential => (p[0] * t / (t + p[1]).ln() + p[2]).exp(),
        };
        if !v.is_finite() {
            return Err(Error::domain(format!("{} is not finite at t = {t}", self.family)));
        }
        Ok(v)
    }

    /// Value at a calendar month.
    pub fn evaluate_month(&self, m: Month) -> Result<f64> {
        self.evaluate(m.index_from(self.t_origin))
    }

    /// Monthly increment at `t`.
    ///
    /// Analytic rate laws are used where one exists in closed form
    /// (`a/ln(t+s)` for `LogIntegral`, `a(ln t + 1) + k` for `TLnT`,
    /// `a(ln(t+s) + 1)` for `ShiftedTLnT`); other families return the
    /// forward difference `evaluate(t+1) − evaluate(t)`.
    pub fn increment(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let p = &self.params;
        Ok(match self.family {
            Family::Constant => 0.0,
            Family::Linear => p[0],
            Family::LogIntegral => p[0] / (t + p[1]).ln(),
            Family::TLnT => p[0] * (t.ln() + 1.0) + p[1],
            Family::ShiftedTLnT => p[0] * ((t + p[1]).ln() + 1.0),
            _ => self.evaluate(t + 1.0)? - self.evaluate(t)?,
        })
    }

    /// Partial derivatives of the value with respect to each parameter.
    /// For log-space families this is the gradient of the log-value.
    pub(crate) fn gradient(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.check_t(t)?;
        let p = &self.params;
        match self.family {
            Family::Constant => out[0] = 1.0,
            Family::Linear => {
                out[0] = t;
                out[1] = 1.0;
            }
            Family::Polynomial(_) => {
                let mut pow = 1.0;
                for o in out.iter_mut() {
                    *o = pow;
                    pow *= t;
                }
            }
            Family::Logarithmic => {
                let u = t + p[1];
                out[0] = u.ln();
                out[1] = p[0] / u;
                out[2] = 1.0;
            }
            Family::ReciprocalLog => {
                let u = t + p[1];
                let l = u.ln();
                out[0] = 1.0 / l;
                out[1] = -p[0] / (u * l * l);
                out[2] = 1.0;
            }
            Family::TOverLnT => {
                let u = t + p[1];
                let l = u.ln();
                out[0] = u / l;
                out[1] = p[0] * (l - 1.0) / (l * l);
                out[2] = 1.0;
            }
            Family::LogIntegral => {
                let u = t + p[1];
                out[0] = log_integral(u, MODEL_LI_TOL)?;
                out[1] = p[0] / u.ln();
                out[2] = 1.0;
            }
            Family::TLnT => {
                out[0] = t * t.ln();
                out[1] = t;
                out[2] = 1.0;
            }
            Family::ShiftedTLnT => {
                let u = t + p[1];
                let l = u.ln();
                out[0] = u * l;
                out[1] = p[0] * (l + 1.0);
                out[2] = 1.0;
            }
            Family::Exponential => {
                out[0] = t;
                out[1] = 1.0;
            }
            Family::SubExponential => {
                let u = t + p[1];
                let l = u.ln();
                out[0] = t / l;
                out[1] = -p[0] * t / (u * l * l);
                out[2] = 1.0;
            }
        }
        Ok(())
    }
}
