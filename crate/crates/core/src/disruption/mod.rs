//! Disruption index over citation graphs, rankings and set intersections.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: String,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

impl Paper {
    pub fn new(id: impl Into<String>, year: i32) -> Self {
        Paper { id: id.into(), year, field: None }
    }
}

/// Papers and citing → cited edges; duplicate edges are collapsed.
#[derive(Debug, Clone, Default)]
pub struct CitationGraph {
    papers: Vec<Paper>,
    index: HashMap<String, u32>,
    refs: Vec<Vec<u32>>,
    citers: Vec<Vec<u32>>,
    duplicates_removed: usize,
}

impl CitationGraph {
    pub fn new<S: AsRef<str>>(papers: Vec<Paper>, edges: impl IntoIterator<Item = (S, S)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(papers.len());
        for (i, p) in papers.iter().enumerate() {
            if p.id.is_empty() {
                return Err(Error::param("empty paper id"));
            }
            if !(MIN_YEAR..=MAX_YEAR).contains(&p.year) {
                return Err(Error::domain(format!(
                    "paper {:?} has year {} outside [{MIN_YEAR}, {MAX_YEAR}]",
                    p.id, p.year
                )));
            }
            if index.insert(p.id.clone(), i as u32).is_some() {
                return Err(Error::param(format!("duplicate paper id {:?}", p.id)));
            }
        }
        let n = papers.len();
        let mut refs = vec![Vec::new(); n];
        let mut citers = vec![Vec::new(); n];
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownId(format!("edge references unknown paper {id:?}")))
        };
        let mut count = 0usize;
        for (a, b) in edges {
            let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            if a == b {
                return Err(Error::domain(format!("paper {:?} cites itself", papers[a as usize].id)));
            }
            refs[a as usize].push(b);
            citers[b as usize].push(a);
            count += 1;
        }
        let mut kept = 0usize;
        for l in refs.iter_mut().chain(citers.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
        for l in &refs {
            kept += l.len();
        }
        Ok(CitationGraph {
            papers,
            index,
            refs,
            citers,
            duplicates_removed: count - kept,
        })
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.refs.iter().map(Vec::len).sum()
    }

    pub fn duplicates_removed(&self) -> usize {
        self.duplicates_removed
    }

    pub fn papers(&self) -> &[Paper] {
        &self.papers
    }

    pub fn paper(&self, id: &str) -> Option<&Paper> {
        self.index.get(id).map(|&i| &self.papers[i as usize])
    }

    fn ix(&self, id: &str) -> Result<u32> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId(format!("unknown paper {id:?}")))
    }

    pub fn citation_count(&self, id: &str) -> Result<usize> {
        Ok(self.citers[self.ix(id)? as usize].len())
    }

    pub fn references(&self, id: &str) -> Result<Vec<&str>> {
        Ok(self.refs[self.ix(id)? as usize]
            .iter()
            .map(|&r| self.papers[r as usize].id.as_str())
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DScore {
    pub id: String,
    pub n_i: usize,
    pub n_j: usize,
    pub n_k: usize,
    /// 0 when `defined` is false.
    pub d: f64,
    pub defined: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DOptions {
    /// Only count citing papers published within this many years after
    /// the focal paper.
    pub window_years: Option<i32>,
}

fn score(g: &CitationGraph, f: u32, opts: &DOptions) -> DScore {
    let fu = f as usize;
    let fy = g.papers[fu].year;
    let in_window = |c: u32| match opts.window_years {
        None => true,
        Some(w) => {
            let y = g.papers[c as usize].year;
            y >= fy && y <= fy + w
        }
    };
    let refs = &g.refs[fu];
    let (mut n_i, mut n_j, mut n_k) = (0, 0, 0);
    let mut seen: HashSet<u32> = HashSet::with_capacity(g.citers[fu].len());
    for &c in &g.citers[fu] {
        seen.insert(c);
        if !in_window(c) {
            continue;
        }
        let cites_ref = g.refs[c as usize].iter().any(|r| refs.binary_search(r).is_ok());
        if cites_ref {
            n_j += 1;
        } else {
            n_i += 1;
        }
    }
    seen.insert(f);
    for &r in refs {
        for &c in &g.citers[r as usize] {
            if seen.insert(c) && in_window(c) {
                n_k += 1;
            }
        }
    }
    let denom = n_i + n_j + n_k;
    let (d, defined) = if denom > 0 {
        ((n_i as f64 - n_j as f64) / denom as f64, true)
    } else {
        (0.0, false)
    };
    DScore {
        id: g.papers[fu].id.clone(),
        n_i,
        n_j,
        n_k,
        d,
        defined,
    }
}

pub fn d_index(g: &CitationGraph, focal: &str, opts: &DOptions) -> Result<DScore> {
    Ok(score(g, g.ix(focal)?, opts))
}

/// Scores for every paper keyed by id.
pub fn d_index_all(g: &CitationGraph, opts: &DOptions) -> BTreeMap<String, DScore> {
    (0..g.len() as u32)
        .into_par_iter()
        .map(|f| score(g, f, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .map(|s| (s.id.clone(), s))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKey {
    Citations,
    Disruption,
}

impl std::str::FromStr for RankKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "citations" => Ok(RankKey::Citations),
            "disruption" => Ok(RankKey::Disruption),
            _ => Err(Error::param(format!("rank key must be citations|disruption, got {s:?}"))),
        }
    }
}

/// Top `k` ids by descending key, ties by ascending id, optionally
/// restricted to an inclusive publication-year range.
pub fn rank(g: &CitationGraph, key: RankKey, k: usize, year_range: Option<(i32, i32)>) -> Result<Vec<String>> {
    let scores = match key {
        RankKey::Disruption => Some(d_index_all(g, &DOptions::default())),
        RankKey::Citations => None,
    };
    rank_with(g, key, k, year_range, scores.as_ref())
}

/// As [`rank`], reusing precomputed scores for the disruption key.
pub fn rank_with(
    g: &CitationGraph,
    key: RankKey,
    k: usize,
    year_range: Option<(i32, i32)>,
    scores: Option<&BTreeMap<String, DScore>>,
) -> Result<Vec<String>> {
    if k == 0 {
        return Err(Error::param("k must be >= 1"));
    }
    let mut rows: Vec<(f64, &str)> = Vec::with_capacity(g.len());
    for (i, p) in g.papers.iter().enumerate() {
        if let Some((lo, hi)) = year_range {
            if p.year < lo || p.year > hi {
                continue;
            }
        }
        let v = match key {
            RankKey::Citations => g.citers[i].len() as f64,
            RankKey::Disruption => {
                let s = scores.ok_or_else(|| Error::param("disruption ranking needs scores"))?;
                s.get(&p.id)
                    .ok_or_else(|| Error::UnknownId(format!("no score for paper {:?}", p.id)))?
                    .d
            }
        };
        rows.push((v, &p.id));
    }
    rows.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    Ok(rows.into_iter().take(k).map(|(_, id)| id.to_string()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectRow {
    pub percentile: f64,
    pub prefix_len: usize,
    pub a_hits: usize,
    pub b_hits: usize,
    /// a_hits / |a|
    pub a_frac_of_set: f64,
    /// b_hits / |b|
    pub b_frac_of_set: f64,
    /// a_hits / prefix_len
    pub a_frac_of_prefix: f64,
    /// b_hits / prefix_len
    pub b_frac_of_prefix: f64,
}

/// Length of the top-`p`% prefix: ⌈p·len/100⌉.
pub fn prefix_len(p: f64, len: usize) -> usize {
    let x = p * len as f64 / 100.0;
    // absorb rounding in p·len so exact products are not bumped up
    ((x - 1e-9 * x.max(1.0)).ceil() as usize).clamp(1, len)
}

fn frac(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn intersect_analysis(
    a: &BTreeSet<String>,
    b: &BTreeSet<String>,
    ctop: &[String],
    percentiles: &[f64],
) -> Result<Vec<IntersectRow>> {
    if ctop.is_empty() {
        return Err(Error::insufficient("ctop list is empty"));
    }
    if let Some(p) = percentiles.iter().find(|&&p| !(p > 0.0 && p <= 100.0)) {
        return Err(Error::param(format!("percentile {p} outside (0, 100]")));
    }
    // position of first occurrence in ctop
    let mut pos: HashMap<&str, usize> = HashMap::with_capacity(ctop.len());
    for (i, id) in ctop.iter().enumerate() {
        pos.entry(id.as_str()).or_insert(i);
    }
    let positions = |s: &BTreeSet<String>| -> Vec<usize> {
        let mut v: Vec<usize> = s.iter().filter_map(|id| pos.get(id.as_str()).copied()).collect();
        v.sort_unstable();
        v
    };
    let (pa, pb) = (positions(a), positions(b));
    Ok(percentiles
        .iter()
        .map(|&p| {
            let len = prefix_len(p, ctop.len());
            let ah = pa.partition_point(|&i| i < len);
            let bh = pb.partition_point(|&i| i < len);
            IntersectRow {
                percentile: p,
                prefix_len: len,
                a_hits: ah,
                b_hits: bh,
                a_frac_of_set: frac(ah, a.len()),
                b_frac_of_set: frac(bh, b.len()),
                a_frac_of_prefix: frac(ah, len),
                b_frac_of_prefix: frac(bh, len),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSummary {
    pub n: usize,
    pub mean_lag: f64,
    pub median_lag: f64,
    pub min_lag: i32,
    pub max_lag: i32,
    /// Pairs whose inclusion precedes publication.
    pub negative: usize,
    pub histogram: BTreeMap<i32, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagReport {
    #[serde(flatten)]
    pub overall: LagSummary,
    pub per_field: BTreeMap<String, LagSummary>,
}

fn summarize(lags: &[i32]) -> LagSummary {
    let mut s = lags.to_vec();
    s.sort_unstable();
    let n = s.len();
    let median = if n % 2 == 1 {
        s[n / 2] as f64
    } else {
        (s[n / 2 - 1] as f64 + s[n / 2] as f64) / 2.0
    };
    let mut histogram = BTreeMap::new();
    for &l in &s {
        *histogram.entry(l).or_default() += 1;
    }
    LagSummary {
        n,
        mean_lag: s.iter().map(|&l| l as f64).sum::<f64>() / n as f64,
        median_lag: median,
        min_lag: s[0],
        max_lag: s[n - 1],
        negative: s.iter().filter(|&&l| l < 0).count(),
        histogram,
    }
}

/// Distribution of inclusion − publication years.
pub fn inclusion_lag(pub_years: &[i32], incl_years: &[i32], fields: Option<&[String]>) -> Result<LagReport> {
    if pub_years.len() != incl_years.len() {
        return Err(Error::param(format!(
            "{} publication years vs {} inclusion years",
            pub_years.len(),
            incl_years.len()
        )));
    }
    if pub_years.is_empty() {
        return Err(Error::insufficient("no year pairs"));
    }
    let lags: Vec<i32> = incl_years.iter().zip(pub_years).map(|(i, p)| i - p).collect();
    let mut per_field = BTreeMap::new();
    if let Some(f) = fields {
        if f.len() != lags.len() {
            return Err(Error::param("field vector length differs from year vectors"));
        }
        let mut groups: BTreeMap<&str, Vec<i32>> = BTreeMap::new();
        for (name, &l) in f.iter().zip(&lags) {
            groups.entry(name).or_default().push(l);
        }
        per_field = groups.into_iter().map(|(k, v)| (k.to_string(), summarize(&v))).collect();
    }
    Ok(LagReport {
        overall: summarize(&lags),
        per_field,
    })
}
