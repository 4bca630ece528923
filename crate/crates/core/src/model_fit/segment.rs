//! Two-phase breakpoint search (early growth regime vs mature regime).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit, FitOptions, FitResult, TimeSeries};
use crate::calendar::Month;
use crate::error::{Error, Result};
use crate::growth_models::Family;

/// Minimum points on each side of a split.
pub const MIN_SEGMENT_LEN: usize = 6;

/// Splits that remove less than this fraction of the better single-regime
/// SSE are flagged low-contrast.
pub const LOW_CONTRAST_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentBreak {
    /// First month of the late segment.
    pub break_month: Month,
    /// Position of `break_month` in the series (0-based).
    pub break_index: usize,
    pub early_fit: FitResult,
    pub late_fit: FitResult,
    /// Combined squared error of both segments.
    pub sse: f64,
    /// SSE of the better of the two families fitted to the whole series.
    pub single_sse: f64,
    /// Relative SSE reduction (single_sse − sse) / single_sse; 0 when a
    /// single regime already fits to rounding error.
    pub contrast: f64,
    pub low_contrast: bool,
}

/// Exhaustive scan over every admissible split.
///
/// Each segment is fitted with its own origin (`t = 1` at its first month).
/// Ties in SSE resolve to the earliest split.
pub fn segment_break(
    series: &TimeSeries,
    early_family: Family,
    late_family: Family,
    options: &FitOptions,
) -> Result<SegmentBreak> {
    let n = series.len();
    let min_early = MIN_SEGMENT_LEN.max(early_family.arity() + 2);
    let min_late = MIN_SEGMENT_LEN.max(late_family.arity() + 2);
    if n < 12 || n < min_early + min_late {
        return Err(Error::insufficient(format!(
            "segment_break needs at least {} points, got {n}",
            (min_early + min_late).max(12)
        )));
    }
    let opts = FitOptions {
        t_origin: None,
        ..options.clone()
    };

    let candidates: Vec<(usize, f64)> = (min_early..=n - min_late)
        .into_par_iter()
        .map(|k| {
            let sse = series
                .slice(0, k)
                .and_then(|s| fit(&s, early_family, &opts))
                .and_then(|e| {
                    let l = fit(&series.slice(k, n)?, late_family, &opts)?;
                    Ok(e.sse + l.sse)
                })
                .unwrap_or(f64::INFINITY);
            (k, sse)
        })
        .collect();

    let best_sse = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    if !best_sse.is_finite() {
        return Err(Error::domain(format!(
            "no admissible split could be fitted with {early_family}/{late_family}"
        )));
    }
    let scale = series.values().iter().map(|v| v * v).sum::<f64>();
    let tie = best_sse + 1e-12 * scale.max(f64::MIN_POSITIVE);
    let (k, sse) = candidates
        .iter()
        .copied()
        .find(|c| c.1 <= tie)
        .expect("best candidate exists");

    let early_fit = fit(&series.slice(0, k)?, early_family, &opts)?;
    let late_fit = fit(&series.slice(k, n)?, late_family, &opts)?;

    let single_sse = [early_family, late_family]
        .iter()
        .filter_map(|&f| fit(series, f, &opts).ok())
        .map(|r| r.sse)
        .fold(f64::INFINITY, f64::min);
    let mean = series.values().iter().sum::<f64>() / n as f64;
    let tss: f64 = series.values().iter().map(|v| (v - mean) * (v - mean)).sum();
    let contrast = if single_sse.is_finite() && single_sse > 1e-12 * tss && single_sse > 0.0 {
        ((single_sse - sse) / single_sse).clamp(0.0, 1.0)
    } else {
        0.0
    };

    Ok(SegmentBreak {
        break_month: series.origin().add_months(k as i64),
        break_index: k,
        early_fit,
        late_fit,
        sse,
        single_sse,
        contrast,
        low_contrast: contrast < LOW_CONTRAST_THRESHOLD,
    })
}
