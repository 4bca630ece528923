//! Least-squares engine shared by all families.
//!
//! Each family is linear in every parameter except (at most) the shift `s`.
//! For a fixed shift the linear coefficients come from an SVD least-squares
//! solve, so the search is one-dimensional: a fixed log-spaced grid of shift
//! starts (plus seed-jittered extras), Brent refinement around the best grid
//! minima, then a projected Levenberg–Marquardt pass over all parameters.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calendar::Month;
use crate::error::{Error, Result};
use crate::growth_models::{log_integral, Family, GrowthModel, MODEL_LI_TOL};

const GRID_POINTS: usize = 48;
const JITTER_POINTS: usize = 8;
const REFINE_STARTS: usize = 3;
const BRENT_TOL: f64 = 1e-10;
/// Upper end of the shift search when no bound is given.
pub const DEFAULT_MAX_SHIFT: f64 = 1e4;

/// Points in fitting space: month index and target (log-value for
/// log-space families). Residual `i` is multiplied by `weight[i]`.
pub(crate) struct Problem<'a> {
    pub family: Family,
    pub t: &'a [f64],
    pub target: Vec<f64>,
    pub weight: Vec<f64>,
    pub origin: Month,
    pub bounds: Option<&'a [(f64, f64)]>,
    pub max_iter: usize,
    pub seed: u64,
}

pub(crate) struct Solution {
    pub model: GrowthModel,
    pub converged: bool,
}

fn shift_basis(family: Family, t: f64, s: f64) -> Result<f64> {
    let u = t + s;
    if !family.log_arg_ok(u) {
        return Err(Error::domain(format!("{family}: t+s = {u} outside domain")));
    }
    Ok(match family {
        Family::Logarithmic => u.ln(),
        Family::ReciprocalLog => 1.0 / u.ln(),
        Family::TOverLnT => u / u.ln(),
        Family::LogIntegral => log_integral(u, MODEL_LI_TOL)?,
        Family::ShiftedTLnT => u * u.ln(),
        Family::SubExponential => t / u.ln(),
        _ => unreachable!("not a shifted family"),
    })
}

/// Design-matrix row for the linear coefficients at a given shift.
fn basis_row(family: Family, t: f64, s: f64, row: &mut Vec<f64>) -> Result<()> {
    row.clear();
    match family {
        Family::Constant => row.push(1.0),
        Family::Linear | Family::Exponential => row.extend([t, 1.0]),
        Family::Polynomial(d) => {
            let mut p = 1.0;
            for _ in 0..=d {
                row.push(p);
                p *= t;
            }
        }
        Family::TLnT => row.extend([t * t.ln(), t, 1.0]),
        _ => row.extend([shift_basis(family, t, s)?, 1.0]),
    }
    Ok(())
}

fn coeffs_to_params(family: Family, coeffs: &[f64], s: f64) -> Vec<f64> {
    if family.has_shift() {
        vec![coeffs[0], s, coeffs[1]]
    } else {
        coeffs.to_vec()
    }
}

/// Linear least squares at fixed shift. Returns (params, sse).
fn solve_at_shift(p: &Problem<'_>, s: f64) -> Result<(Vec<f64>, f64)> {
    let n = p.t.len();
    let k = p.family.arity() - usize::from(p.family.has_shift());
    let mut a = DMatrix::<f64>::zeros(n, k);
    let mut row = Vec::with_capacity(k);
    for (i, &t) in p.t.iter().enumerate() {
        basis_row(p.family, t, s, &mut row)?;
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = *v * p.weight[i];
        }
    }
    // Column scaling keeps polynomial and t·ln t bases well conditioned.
    let mut scale = vec![1.0; k];
    for (j, sc) in scale.iter_mut().enumerate() {
        let norm = a.column(j).norm();
        if norm > 0.0 {
            *sc = norm;
            a.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    let b = DVector::from_iterator(n, p.target.iter().zip(&p.weight).map(|(y, w)| y * w));
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::domain(format!("least-squares solve failed: {e}")))?;
    let resid = &a * &x - &b;
    let coeffs: Vec<f64> = x.iter().zip(&scale).map(|(v, s)| v / s).collect();
    Ok((coeffs_to_params(p.family, &coeffs, s), resid.norm_squared()))
}

fn sse_of(p: &Problem<'_>, params: &[f64]) -> Result<f64> {
    let model = GrowthModel::new(p.family, params.to_vec(), p.origin)?;
    let mut sse = 0.0;
    for ((&t, &y), &w) in p.t.iter().zip(&p.target).zip(&p.weight) {
        let r = (target_value(&model, t)? - y) * w;
        sse += r * r;
    }
    if sse.is_finite() {
        Ok(sse)
    } else {
        Err(Error::domain("non-finite residuals"))
    }
}

fn target_value(model: &GrowthModel, t: f64) -> Result<f64> {
    let p = model.params();
    if model.family().fits_in_log_space() {
        // Evaluate the exponent directly; exp() may overflow for log-space
        // targets that are perfectly representable.
        Ok(match model.family() {
            Family::Exponential => p[0] * t + p[1],
            _ => p[0] * t / (t + p[1]).ln() + p[2],
        })
    } else {
        model.evaluate(t)
    }
}

fn shift_range(p: &Problem<'_>) -> Result<(f64, f64)> {
    // Model must be valid at t = 1, and at every observed t.
    let t_min = p.t.iter().copied().fold(1.0, f64::min);
    let min_arg = match p.family {
        Family::LogIntegral => 2.0,
        f => f.min_log_arg(),
    };
    let mut lo = min_arg - t_min;
    if p.family != Family::LogIntegral {
        lo += 1e-6 * (1.0 + lo.abs());
    }
    let mut hi = DEFAULT_MAX_SHIFT;
    if let Some(b) = p.bounds {
        lo = lo.max(b[1].0);
        if b[1].1.is_finite() {
            hi = b[1].1;
        }
    }
    if !matches!(lo.partial_cmp(&hi), Some(Ordering::Less)) {
        return Err(Error::param(format!("empty shift range [{lo}, {hi}]")));
    }
    Ok((lo, hi))
}

/// Brent's method for a scalar minimum on `[a, b]`.
pub(crate) fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0_f64, 0.0_f64);
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut pp = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                pp = -pp;
            }
            q = q.abs();
            if pp.abs() < (0.5 * q * e).abs() && pp > q * (a - x) && pp < q * (b - x) {
                e = d;
                d = pp / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}

/// Best shift by grid + Brent on the profiled SSE.
fn search_shift(p: &Problem<'_>) -> Result<(Vec<f64>, f64)> {
    let (lo, hi) = shift_range(p)?;
    // Work in w = ln(s - lo + eps) so small shifts get resolution.
    let eps = 1e-3;
    let to_s = |w: f64| lo + w.exp() - eps;
    let w_lo = eps.ln();
    let w_hi = (hi - lo + eps).ln();
    let profile = |w: f64| -> f64 {
        solve_at_shift(p, to_s(w)).map(|(_, sse)| sse).unwrap_or(f64::INFINITY)
    };

    let mut ws: Vec<f64> = (0..GRID_POINTS)
        .map(|i| w_lo + (w_hi - w_lo) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    ws.extend((0..JITTER_POINTS).map(|_| rng.random_range(w_lo..w_hi)));
    ws.sort_by(f64::total_cmp);
    ws.dedup();
    let vals: Vec<f64> = ws.iter().map(|&w| profile(w)).collect();

    // Local minima of the grid, best first.
    let mut minima: Vec<usize> = (0..ws.len())
        .filter(|&i| {
            let left = i == 0 || vals[i] <= vals[i - 1];
            let right = i + 1 == ws.len() || vals[i] <= vals[i + 1];
            left && right && vals[i].is_finite()
        })
        .collect();
    minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    minima.truncate(REFINE_STARTS);
    if minima.is_empty() {
        return Err(Error::domain(format!("{}: no admissible shift", p.family)));
    }

    let mut best: Option<(f64, f64)> = None;
    for i in minima {
        let a = ws[i.saturating_sub(1)];
        let b = ws[(i + 1).min(ws.len() - 1)];
        let (w, f) = if a < b { brent(profile, a, b, BRENT_TOL, 200) } else { (ws[i], vals[i]) };
        let cand = if f <= vals[i] { (w, f) } else { (ws[i], vals[i]) };
        if best.is_none_or(|(_, bf)| cand.1 < bf) {
            best = Some(cand);
        }
    }
    let (w, _) = best.expect("at least one start");
    solve_at_shift(p, to_s(w))
}

fn clamp_to_bounds(p: &Problem<'_>, params: &mut [f64]) {
    if let Some(b) = p.bounds {
        for (v, (lo, hi)) in params.iter_mut().zip(b) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

/// Projected Levenberg–Marquardt over all parameters.
fn polish(p: &Problem<'_>, start: Vec<f64>) -> (Vec<f64>, f64, bool) {
    let k = start.len();
    let n = p.t.len();
    let mut params = start;
    let mut sse = match sse_of(p, &params) {
        Ok(v) => v,
        Err(_) => return (params, f64::INFINITY, false),
    };
    let mut lambda = 1e-3;
    let mut grad = vec![0.0; k];
    for _ in 0..p.max_iter {
        let model = match GrowthModel::new(p.family, params.clone(), p.origin) {
            Ok(m) => m,
            Err(_) => return (params, sse, false),
        };
        let mut jac = DMatrix::<f64>::zeros(n, k);
        let mut r = DVector::<f64>::zeros(n);
        for (i, (&t, &y)) in p.t.iter().zip(&p.target).enumerate() {
            if model.gradient(t, &mut grad).is_err() {
                return (params, sse, false);
            }
            let v = target_value(&model, t).unwrap_or(f64::NAN);
            let w = p.weight[i];
            r[i] = (v - y) * w;
            for j in 0..k {
                jac[(i, j)] = grad[j] * w;
            }
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let scale_g: f64 = (0..k).map(|j| (jtr[j] * jtr[j]) / jtj[(j, j)].max(f64::MIN_POSITIVE)).sum();
        if sse == 0.0 || scale_g <= 1e-24 * sse.max(f64::MIN_POSITIVE) {
            return (params, sse, true);
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for j in 0..k {
                a[(j, j)] += lambda * jtj[(j, j)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = params.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            clamp_to_bounds(p, &mut trial);
            match sse_of(p, &trial) {
                Ok(s) if s < sse => {
                    let rel_step = trial
                        .iter()
                        .zip(&params)
                        .map(|(a, b)| (a - b).abs() / (b.abs() + 1e-12))
                        .fold(0.0, f64::max);
                    let rel_drop = (sse - s) / sse;
                    params = trial;
                    sse = s;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = true;
                    if rel_step < 1e-12 || rel_drop < 1e-14 {
                        return (params, sse, true);
                    }
                    break;
                }
                _ => lambda *= 4.0,
            }
        }
        if !improved {
            // No descent at any damping: stationary to machine precision.
            return (params, sse, true);
        }
    }
    (params, sse, false)
}

pub(crate) fn solve(p: &Problem<'_>) -> Result<Solution> {
    if let Some(b) = p.bounds {
        if b.len() != p.family.arity() {
            return Err(Error::param(format!(
                "{} takes {} bounds, got {}",
                p.family,
                p.family.arity(),
                b.len()
            )));
        }
        if let Some((lo, hi)) = b.iter().find(|(lo, hi)| !matches!(lo.partial_cmp(hi), Some(Ordering::Less | Ordering::Equal))) {
            return Err(Error::param(format!("invalid bound [{lo}, {hi}]")));
        }
    }
    let (mut params, linear_sse) = if p.family.has_shift() {
        search_shift(p)?
    } else {
        solve_at_shift(p, 0.0)?
    };

    let mut out_of_bounds = false;
    if let Some(b) = p.bounds {
        out_of_bounds = params.iter().zip(b).any(|(v, (lo, hi))| v < lo || v > hi);
    }
    let converged;
    if p.family.has_shift() || out_of_bounds {
        clamp_to_bounds(p, &mut params);
        let (polished, sse, ok) = polish(p, params.clone());
        if sse <= linear_sse || out_of_bounds {
            params = polished;
        }
        converged = ok;
    } else {
        converged = true;
    }
    let model = GrowthModel::new(p.family, params, p.origin)?;
    Ok(Solution { model, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_parabola_minimum() {
        let (x, f) = brent(|x| (x - 1.234).powi(2) + 3.0, -10.0, 10.0, 1e-12, 200);
        assert!((x - 1.234).abs() < 1e-6);
        assert!((f - 3.0).abs() < 1e-14);
    }
}
