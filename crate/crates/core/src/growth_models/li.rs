//! Offset logarithmic integral `Li(x) = ∫₂ˣ du / ln u`.
//!
//! Evaluated by globally adaptive Gauss–Kronrod (7/15) quadrature after the
//! substitution `u = eᵛ`, which turns the integrand into the smooth `eᵛ / v`
//! on `[ln 2, ln x]`.

use crate::error::{Error, Result};

/// Tolerance used when models evaluate `Li` internally.
pub const MODEL_LI_TOL: f64 = 1e-12;

const MAX_SUBDIVISIONS: usize = 500;

// Kronrod 15-point nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights for the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[7] * fc;
    let mut res_g = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        res_k += WGK[j] * pair;
        if j % 2 == 1 {
            res_g += WG[j / 2] * pair;
        }
    }
    (res_k * half, ((res_k - res_g) * half).abs())
}

/// Globally adaptive G7/K15 integration of `f` over `[a, b]`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = kronrod(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > rel_tol * total.abs() && err > f64::MIN_POSITIVE {
        if parts.len() >= MAX_SUBDIVISIONS {
            return Err(Error::domain(format!(
                "quadrature did not reach rel_tol {rel_tol:e} within {MAX_SUBDIVISIONS} subdivisions"
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod(&f, lo, mid);
        let (v2, e2) = kronrod(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
        // Re-sum rather than update incrementally to avoid drift.
        total = parts.iter().map(|p| p.2).sum();
        err = parts.iter().map(|p| p.3).sum();
    }
    Ok(total)
}

/// `Li(x) = ∫₂ˣ du / ln u` to relative tolerance `rel_tol`.
///
/// Requires `x ≥ 2` and `rel_tol ∈ [1e-12, 1e-3]`.
pub fn log_integral(x: f64, rel_tol: f64) -> Result<f64> {
    if !(1e-12..=1e-3).contains(&rel_tol) {
        return Err(Error::param(format!(
            "rel_tol {rel_tol:e} outside [1e-12, 1e-3]"
        )));
    }
    if !x.is_finite() || x < 2.0 {
        return Err(Error::domain(format!("log_integral requires x >= 2, got {x}")));
    }
    // Quadrature error estimates are conservative; ask for a bit more than
    // requested so the returned value honours rel_tol.
    integrate(|v: f64| v.exp() / v, std::f64::consts::LN_2, x.ln(), rel_tol * 0.1)
}

/// The three-term expansion `(x/ln x)(1 + 1/ln x + 3/(ln x)²)`.
///
/// The textbook asymptotic series has coefficient 2 on the last term; this
/// keeps 3 as printed in the growth-law literature it reproduces. The gap to
/// [`log_integral`] is a few percent at `x = 10³` and shrinks with `x`.
pub fn li_paper_approx(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 3.0 {
        return Err(Error::domain(format!("li_paper_approx requires x >= 3, got {x}")));
    }
    let l = x.ln();
    Ok(x / l * (1.0 + 1.0 / l + 3.0 / (l * l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_interval() {
        assert_eq!(log_integral(2.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn li_of_ten() {
        // li(10) - li(2) = 6.165599504787 - 1.045163780117
        assert_relative_eq!(log_integral(10.0, 1e-12).unwrap(), 5.120435724669805, max_relative = 1e-11);
    }

    #[test]
    fn dominates_x_over_ln_x() {
        let x = 1e6;
        let r = log_integral(x, 1e-10).unwrap() / (x / x.ln());
        assert!(r > 1.0 && r < 1.2, "{r}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(log_integral(1.5, 1e-8), Err(Error::Domain(_))));
        assert!(matches!(log_integral(10.0, 1e-2), Err(Error::InvalidParameter(_))));
        assert!(matches!(log_integral(10.0, 1e-14), Err(Error::InvalidParameter(_))));
        assert!(li_paper_approx(2.9).is_err());
    }

    #[test]
    fn three_term_approx_at_e_squared() {
        let x = std::f64::consts::E.powi(2);
        assert_relative_eq!(li_paper_approx(x).unwrap(), 8.312_688_111_296_98, max_relative = 1e-12);
    }

    #[test]
    fn three_term_approx_converges() {
        let x = 1e6;
        let r = li_paper_approx(x).unwrap() / log_integral(x, 1e-10).unwrap();
        assert!((r - 1.0).abs() < 0.01, "{r}");
    }

    #[test]
    fn monotone() {
        let mut prev_li = 0.0;
        let mut prev_ap = 0.0;
        let mut x = 10.0_f64;
        while x <= 1e6 {
            let li = log_integral(x, 1e-10).unwrap();
            let ap = li_paper_approx(x).unwrap();
            assert!(li > prev_li && ap > prev_ap);
            prev_li = li;
            prev_ap = ap;
            x *= 1.37;
        }
    }

    #[test]
    fn approximation_gap() {
        // The signed gap changes sign near x = 150 and peaks near 10^6.6;
        // it only decreases monotonically past that.
        let gap = |x: f64| li_paper_approx(x).unwrap() / log_integral(x, 1e-12).unwrap() - 1.0;
        let mut x = 100.0_f64;
        while x <= 1e6 {
            assert!(gap(x).abs() < 0.05, "gap too large at {x}");
            x *= 1.5;
        }
        assert!(gap(1e6) < 0.05);
        let mut prev = f64::INFINITY;
        let mut x = 1e7_f64;
        while x <= 1e12 {
            let g = gap(x);
            assert!(g > 0.0 && g < prev, "gap not decreasing at {x}");
            prev = g;
            x *= 3.0;
        }
    }
}
