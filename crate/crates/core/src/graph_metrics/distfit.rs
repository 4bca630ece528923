use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_fit::optimizer::brent;

/// Tail samples required by the power-law fit.
pub const MIN_TAIL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KMin {
    Auto,
    Fixed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub kmin: u64,
    pub ks_distance: f64,
    pub n_tail: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalFit {
    pub mu: f64,
    pub sigma: f64,
    pub ks_distance: f64,
    pub n: usize,
}

/// Hurwitz zeta ζ(s, q) for s > 1, q > 0 by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const N: usize = 12;
    // B_{2j}/(2j)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
    ];
    let mut sum = 0.0;
    for k in 0..N {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s(s+1)…(s+2j−2) times a^{-s-2j+1}
    let mut fac = s;
    let mut pow = a.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * fac * pow;
        let k = 2 * j + 1;
        fac *= (s + k as f64) * (s + k as f64 + 1.0);
        pow /= a * a;
    }
    sum
}

struct Tail<'a> {
    xs: &'a [u64],
    sum_ln: f64,
}

fn fit_tail(tail: &Tail, kmin: u64) -> PowerLawFit {
    let n = tail.xs.len() as f64;
    let q = kmin as f64;
    let nll = |a: f64| n * hurwitz_zeta(a, q).ln() + a * tail.sum_ln;
    let (alpha, _) = brent(nll, 1.0 + 1e-6, 20.0, 1e-10, 200);
    PowerLawFit {
        exponent: alpha,
        kmin,
        ks_distance: ks_discrete(tail.xs, alpha, kmin),
        n_tail: tail.xs.len(),
    }
}

fn ks_discrete(sorted: &[u64], alpha: f64, kmin: u64) -> f64 {
    let n = sorted.len() as f64;
    let z0 = hurwitz_zeta(alpha, kmin as f64);
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let k = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == k {
            j += 1;
        }
        let emp = j as f64 / n;
        let model = 1.0 - hurwitz_zeta(alpha, k as f64 + 1.0) / z0;
        d = d.max((emp - model).abs());
        i = j;
    }
    d
}

/// Discrete maximum-likelihood power-law fit.
///
/// With [`KMin::Auto`] every observed value leaving at least [`MIN_TAIL`]
/// samples is tried and the one with smallest KS distance wins (smallest
/// kmin on ties). Zero values are ignored.
pub fn powerlaw_fit(degrees: &[u64], kmin: KMin) -> Result<PowerLawFit> {
    let mut xs: Vec<u64> = degrees.iter().copied().filter(|&d| d > 0).collect();
    xs.sort_unstable();
    // suffix sums of ln x
    let mut suffix = vec![0.0; xs.len() + 1];
    for i in (0..xs.len()).rev() {
        suffix[i] = suffix[i + 1] + (xs[i] as f64).ln();
    }
    let tail_at = |k: u64| {
        let start = xs.partition_point(|&x| x < k);
        (start, &xs[start..])
    };
    let check = |t: &[u64], k: u64| -> Result<()> {
        if t.len() < MIN_TAIL {
            return Err(Error::insufficient(format!(
                "{} samples >= kmin {k}, need {MIN_TAIL}",
                t.len()
            )));
        }
        if t.first() == t.last() {
            return Err(Error::insufficient("degenerate tail: all samples equal"));
        }
        Ok(())
    };
    match kmin {
        KMin::Fixed(k) => {
            if k == 0 {
                return Err(Error::param("kmin must be >= 1"));
            }
            let (start, t) = tail_at(k);
            check(t, k)?;
            Ok(fit_tail(&Tail { xs: t, sum_ln: suffix[start] }, k))
        }
        KMin::Auto => {
            let mut cands: Vec<u64> = xs.clone();
            cands.dedup();
            let mut best: Option<PowerLawFit> = None;
            for k in cands {
                let (start, t) = tail_at(k);
                if check(t, k).is_err() {
                    continue;
                }
                let f = fit_tail(&Tail { xs: t, sum_ln: suffix[start] }, k);
                if best.is_none_or(|b| f.ks_distance < b.ks_distance) {
                    best = Some(f);
                }
            }
            match best {
                Some(b) => Ok(b),
                None => {
                    let k = xs.first().copied().unwrap_or(1);
                    check(tail_at(k).1, k).map(|_| unreachable!())
                }
            }
        }
    }
}

/// Complementary error function, fractional error below 1.2e-7.
pub fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.265_512_23
        + t * (1.000_023_68
            + t * (0.374_091_96
                + t * (0.096_784_18
                    + t * (-0.186_288_06
                        + t * (0.278_868_07
                            + t * (-1.135_203_98
                                + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77))))))));
    let r = t * poly.exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Lognormal MLE (`sigma` uses the 1/n variance) with the KS distance to
/// the fitted CDF.
pub fn lognormal_fit(samples: &[f64]) -> Result<LogNormalFit> {
    if samples.len() < 2 {
        return Err(Error::insufficient("lognormal fit needs at least 2 samples"));
    }
    if let Some(bad) = samples.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::domain(format!("sample {bad} is not a positive finite value")));
    }
    let mut logs: Vec<f64> = samples.iter().map(|s| s.ln()).collect();
    let n = logs.len() as f64;
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / n;
    let sigma = var.sqrt();
    if sigma <= 1e-12 * mu.abs().max(1.0) {
        return Ok(LogNormalFit { mu, sigma: 0.0, ks_distance: 0.0, n: logs.len() });
    }
    logs.sort_unstable_by(f64::total_cmp);
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < logs.len() {
        let mut j = i;
        while j < logs.len() && logs[j] == logs[i] {
            j += 1;
        }
        let f = normal_cdf((logs[i] - mu) / sigma);
        d = d.max((f - i as f64 / n).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    Ok(LogNormalFit { mu, sigma, ks_distance: d, n: logs.len() })
}
