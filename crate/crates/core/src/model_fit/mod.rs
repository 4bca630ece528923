//! Fitting, scoring, selection and extrapolation of growth laws on monthly
//! series.

pub(crate) mod optimizer;
mod segment;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calendar::Month;
use crate::error::{Error, Result};
use crate::growth_models::{Family, GrowthModel};

pub use optimizer::DEFAULT_MAX_SHIFT;
pub use segment::{segment_break, SegmentBreak, LOW_CONTRAST_THRESHOLD, MIN_SEGMENT_LEN};

/// Mape differences below this are treated as ties in [`select`].
pub const SELECT_TIE_TOLERANCE: f64 = 1e-4;

/// Gap-free monthly observations of one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    origin: Month,
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub fn new(origin: Month, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::insufficient(format!(
                "time series needs at least 2 values, got {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::param(format!(
                "non-finite value {v} at {}",
                origin.add_months(i as i64)
            )));
        }
        Ok(TimeSeries {
            origin,
            values,
            label: label.into(),
        })
    }

    pub fn origin(&self) -> Month {
        self.origin
    }

    pub fn end(&self) -> Month {
        self.origin.add_months(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn months(&self) -> impl Iterator<Item = Month> + '_ {
        (0..self.values.len()).map(|i| self.origin.add_months(i as i64))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Month, f64)> + '_ {
        self.months().zip(self.values.iter().copied())
    }

    pub fn observations(&self) -> Observations {
        Observations {
            label: self.label.clone(),
            points: self.iter().collect(),
        }
    }

    /// Contiguous sub-range `[start, end)` by position.
    pub fn slice(&self, start: usize, end: usize) -> Result<TimeSeries> {
        TimeSeries::new(
            self.origin.add_months(start as i64),
            self.values[start..end].to_vec(),
            self.label.clone(),
        )
    }
}

/// Monthly observations with possible gaps, strictly increasing in month.
///
/// Used where source tables skip months; [`TimeSeries`] is the gap-free form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observations {
    label: String,
    points: Vec<(Month, f64)>,
}

impl Observations {
    pub fn new(points: Vec<(Month, f64)>, label: impl Into<String>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::insufficient("observations need at least 2 points"));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::param(format!(
                    "months must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some((m, v)) = points.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::param(format!("non-finite value {v} at {m}")));
        }
        Ok(Observations {
            label: label.into(),
            points,
        })
    }

    pub fn points(&self) -> &[(Month, f64)] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn first(&self) -> Month {
        self.points[0].0
    }

    pub fn last(&self) -> Month {
        self.points[self.points.len() - 1].0
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl From<&TimeSeries> for Observations {
    fn from(s: &TimeSeries) -> Self {
        s.observations()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitOptions {
    /// Levenberg–Marquardt iteration budget.
    pub max_iter: usize,
    /// Seeds the jittered extra shift starts.
    pub seed: u64,
    /// Optional `(lo, hi)` per parameter, in the family's parameter order.
    pub bounds: Option<Vec<(f64, f64)>>,
    /// Month mapped to `t = 1`; defaults to the first observation.
    pub t_origin: Option<Month>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: 200,
            seed: 0,
            bounds: None,
            t_origin: None,
        }
    }
}

/// A fitted model together with its error scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: GrowthModel,
    pub label: String,
    /// Mean |pred − actual| / actual over non-zero actuals.
    pub mape: f64,
    /// Mean (pred − actual) / actual over non-zero actuals.
    pub signed_mpe: f64,
    pub rmse: f64,
    /// pred − actual, one per observation.
    pub residuals: Vec<f64>,
    pub sse: f64,
    pub converged: bool,
    pub data_start: Month,
    pub data_end: Month,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapeScore {
    pub mape: f64,
    pub signed_mpe: f64,
}

fn predictions(model: &GrowthModel, obs: &Observations) -> Result<Vec<f64>> {
    obs.points
        .iter()
        .map(|&(m, _)| model.evaluate_month(m))
        .collect()
}

/// Percentage errors of `model` against a series; errors on a zero actual.
pub fn mape(series: &TimeSeries, model: &GrowthModel) -> Result<MapeScore> {
    mape_observations(&series.observations(), model)
}

pub fn mape_observations(obs: &Observations, model: &GrowthModel) -> Result<MapeScore> {
    if let Some((m, _)) = obs.points.iter().find(|(_, v)| *v == 0.0) {
        return Err(Error::domain(format!("zero actual at {m}; percentage error undefined")));
    }
    let preds = predictions(model, obs)?;
    let n = preds.len() as f64;
    let (abs, signed) = preds
        .iter()
        .zip(&obs.points)
        .map(|(p, (_, a))| (p - a) / a)
        .fold((0.0, 0.0), |(s1, s2), e| (s1 + e.abs(), s2 + e));
    Ok(MapeScore {
        mape: abs / n,
        signed_mpe: signed / n,
    })
}

fn score(model: GrowthModel, obs: &Observations, converged: bool) -> Result<FitResult> {
    let preds = predictions(&model, obs)?;
    let residuals: Vec<f64> = preds
        .iter()
        .zip(&obs.points)
        .map(|(p, (_, a))| p - a)
        .collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let (mut abs, mut signed, mut count) = (0.0, 0.0, 0usize);
    for (r, (_, a)) in residuals.iter().zip(&obs.points) {
        if *a != 0.0 {
            abs += (r / a).abs();
            signed += r / a;
            count += 1;
        }
    }
    let count = count.max(1) as f64;
    Ok(FitResult {
        model,
        label: obs.label.clone(),
        mape: abs / count,
        signed_mpe: signed / count,
        rmse: (sse / residuals.len() as f64).sqrt(),
        residuals,
        sse,
        converged,
        data_start: obs.first(),
        data_end: obs.last(),
    })
}

/// Least-squares fit of one family to a gap-free series.
pub fn fit(series: &TimeSeries, family: Family, options: &FitOptions) -> Result<FitResult> {
    fit_observations(&series.observations(), family, options)
}

/// Least-squares fit of one family to monthly observations.
///
/// Log-space families (`Exponential`, `SubExponential`) minimise squared
/// error of the log-values; all others minimise squared relative error
/// `(pred − y)/|y|`, the least-squares counterpart of mape. Zero values are
/// weighted by the mean magnitude instead.
pub fn fit_observations(obs: &Observations, family: Family, options: &FitOptions) -> Result<FitResult> {
    let n = obs.len();
    if n < family.arity() + 2 {
        return Err(Error::insufficient(format!(
            "{family} needs at least {} points, got {n}",
            family.arity() + 2
        )));
    }
    if obs.points.iter().all(|(_, v)| *v == 0.0) {
        return Err(Error::domain("all-zero series cannot be scored by percentage error"));
    }
    let origin = options.t_origin.unwrap_or(obs.first());
    if origin > obs.first() {
        return Err(Error::param(format!(
            "t_origin {origin} is after the first observation {}",
            obs.first()
        )));
    }
    let t: Vec<f64> = obs.points.iter().map(|(m, _)| m.index_from(origin)).collect();
    let target: Vec<f64> = if family.fits_in_log_space() {
        obs.points
            .iter()
            .map(|&(m, v)| {
                if v > 0.0 {
                    Ok(v.ln())
                } else {
                    Err(Error::domain(format!("{family} needs positive values; {v} at {m}")))
                }
            })
            .collect::<Result<_>>()?
    } else {
        obs.points.iter().map(|(_, v)| *v).collect()
    };
    let weight: Vec<f64> = if family.fits_in_log_space() {
        vec![1.0; n]
    } else {
        let mean_abs = obs.points.iter().map(|(_, v)| v.abs()).sum::<f64>() / n as f64;
        obs.points
            .iter()
            .map(|(_, v)| 1.0 / if *v != 0.0 { v.abs() } else { mean_abs })
            .collect()
    };
    let problem = optimizer::Problem {
        family,
        t: &t,
        target,
        weight,
        origin,
        bounds: options.bounds.as_deref(),
        max_iter: options.max_iter,
        seed: options.seed,
    };
    let sol = optimizer::solve(&problem)?;
    score(sol.model, obs, sol.converged)
}

/// Fits every family and ranks the results by mape.
///
/// Results within [`SELECT_TIE_TOLERANCE`] of the best remaining mape are
/// ordered by parameter count, then mape, then family, so the ranking does
/// not depend on the order of `families`.
pub fn select(series: &TimeSeries, families: &[Family], options: &FitOptions) -> Result<Vec<FitResult>> {
    select_observations(&series.observations(), families, options)
}

pub fn select_observations(
    obs: &Observations,
    families: &[Family],
    options: &FitOptions,
) -> Result<Vec<FitResult>> {
    if families.is_empty() {
        return Err(Error::param("select needs at least one family"));
    }
    let mut fams = families.to_vec();
    fams.sort();
    fams.dedup();
    let fits: Vec<FitResult> = fams
        .par_iter()
        .map(|&f| fit_observations(obs, f, options))
        .collect::<Result<_>>()?;
    Ok(rank_fits(fits))
}

fn rank_fits(mut pool: Vec<FitResult>) -> Vec<FitResult> {
    let mut ranked = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let best = pool.iter().map(|r| r.mape).fold(f64::INFINITY, f64::min);
        let pick = pool
            .iter()
            .enumerate()
            .filter(|(_, r)| r.mape - best < SELECT_TIE_TOLERANCE || (best.is_infinite() && r.mape.is_infinite()))
            .min_by(|(_, a), (_, b)| {
                a.model
                    .family()
                    .arity()
                    .cmp(&b.model.family().arity())
                    .then(a.mape.total_cmp(&b.mape))
                    .then(a.model.family().cmp(&b.model.family()))
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        ranked.push(pool.remove(pick));
    }
    ranked
}

/// Monthly extrapolation from the month after the data through `until`.
pub fn forecast(fit: &FitResult, until: Month) -> Result<TimeSeries> {
    if until <= fit.data_end {
        return Err(Error::param(format!(
            "forecast horizon {until} must be after the last observation {}",
            fit.data_end
        )));
    }
    let start = fit.data_end.succ();
    let n = start.months_until(until) + 1;
    let values = (0..n)
        .map(|i| fit.model.evaluate_month(start.add_months(i)))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(start, values, format!("{} forecast", fit.label)).or_else(|_| {
        // A one-month horizon is still a valid forecast.
        Ok(TimeSeries {
            origin: start,
            values: vec![fit.model.evaluate_month(start)?],
            label: format!("{} forecast", fit.label),
        })
    })
}

/// Model values over the observed months, for plotting against the data.
pub fn fitted_curve(fit: &FitResult) -> Result<Vec<(Month, f64)>> {
    let n = fit.data_start.months_until(fit.data_end);
    (0..=n)
        .map(|i| {
            let m = fit.data_start.add_months(i);
            Ok((m, fit.model.evaluate_month(m)?))
        })
        .collect()
}

/// Pointwise `num / den` over aligned series.
pub fn ratio_series(num: &TimeSeries, den: &TimeSeries) -> Result<TimeSeries> {
    if num.origin != den.origin || num.len() != den.len() {
        return Err(Error::param(format!(
            "series misaligned: {}..{} vs {}..{}",
            num.origin,
            num.end(),
            den.origin,
            den.end()
        )));
    }
    let values = num
        .iter()
        .zip(den.values())
        .map(|((m, a), &b)| {
            if b > 0.0 {
                Ok(a / b)
            } else {
                Err(Error::domain(format!("non-positive denominator {b} at {m}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(num.origin, values, format!("{}/{}", num.label, den.label))
}
