//! Barabási–Albert preferential-attachment baselines.
//!
//! Arcs point from each arriving node to its chosen targets (seed clique
//! arcs point from higher to lower id), so the directed snapshot has
//! exactly one arc per undirected edge. Path and clustering metrics use
//! the undirected view.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_metrics::{
    clustering_coefficient, degrees, density, effective_diameter, mean_degree, powerlaw_fit, Direction,
    KMin, NodeId, SnapshotGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BAParams {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl BAParams {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self> {
        let p = BAParams { n, m, seed };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.m < 1 || self.n <= self.m {
            return Err(Error::param(format!("need n > m >= 1, got n = {}, m = {}", self.n, self.m)));
        }
        if self.n > NodeId::MAX as usize {
            return Err(Error::param("n exceeds the node id range"));
        }
        Ok(())
    }

    /// m(n − m) + m(m − 1)/2.
    pub fn expected_edges(&self) -> usize {
        self.m * (self.n - self.m) + self.m * (self.m - 1) / 2
    }
}

/// Raw edge list (newcomer, target) in generation order.
pub fn generate_edges(p: &BAParams) -> Result<Vec<(NodeId, NodeId)>> {
    p.validate()?;
    let (n, m) = (p.n, p.m);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut edges = Vec::with_capacity(p.expected_edges());
    // every edge endpoint, so a uniform pick is degree-proportional
    let mut urn: Vec<NodeId> = Vec::with_capacity(2 * p.expected_edges());
    for a in 0..m as NodeId {
        for b in 0..a {
            edges.push((a, b));
            urn.extend([a, b]);
        }
    }
    let mut targets: Vec<NodeId> = Vec::with_capacity(m);
    for v in m as NodeId..n as NodeId {
        targets.clear();
        while targets.len() < m {
            let t = if urn.is_empty() {
                rng.random_range(0..v)
            } else {
                urn[rng.random_range(0..urn.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((v, t));
            urn.extend([v, t]);
        }
    }
    Ok(edges)
}

pub fn generate(p: &BAParams) -> Result<SnapshotGraph> {
    SnapshotGraph::from_edges(p.n, generate_edges(p)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BATheory {
    pub m: usize,
    /// m/n
    pub density_ref: f64,
    /// ln n / ln ln n
    pub diameter_ref: f64,
    /// (ln n)²/n
    pub clustering_ref: f64,
    /// m (one arc per edge)
    pub mean_degree_ref: f64,
    /// 2m, undirected mean degree
    pub undirected_mean_degree_ref: f64,
    pub powerlaw_exponent_ref: f64,
}

impl BATheory {
    /// 2m²k⁻³
    pub fn pk(&self, k: f64) -> f64 {
        2.0 * (self.m * self.m) as f64 * k.powi(-3)
    }

    /// Σ_{j ≥ k} 2m² j⁻³ in continuum form: m²/k².
    pub fn ccdf(&self, k: f64) -> f64 {
        (self.m * self.m) as f64 / (k * k)
    }
}

pub fn theory(p: &BAParams) -> Result<BATheory> {
    if p.n < 10 {
        return Err(Error::param(format!("theory needs n >= 10, got {}", p.n)));
    }
    let n = p.n as f64;
    let ln = n.ln();
    Ok(BATheory {
        m: p.m,
        density_ref: p.m as f64 / n,
        diameter_ref: ln / ln.ln(),
        clustering_ref: ln * ln / n,
        mean_degree_ref: p.m as f64,
        undirected_mean_degree_ref: 2.0 * p.m as f64,
        powerlaw_exponent_ref: 3.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareBands {
    pub density: (f64, f64),
    pub diameter: (f64, f64),
    pub clustering: (f64, f64),
    pub powerlaw: (f64, f64),
}

impl Default for CompareBands {
    fn default() -> Self {
        CompareBands {
            density: (0.9, 1.1),
            diameter: (0.5, 2.0),
            clustering: (0.2, 5.0),
            powerlaw: (0.9, 1.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub sources: usize,
    pub seed: u64,
    pub quantile: f64,
    pub bands: CompareBands,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            sources: 200,
            seed: 0,
            quantile: 0.9,
            bands: CompareBands::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub metric: String,
    pub empirical: Option<f64>,
    pub theory: f64,
    pub ratio: Option<f64>,
    pub band: (f64, f64),
    pub in_band: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub params: BAParams,
    pub theory: BATheory,
    pub mean_degree: f64,
    pub undirected_mean_degree: f64,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn row(&self, metric: &str) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &CompareRow> {
        self.rows.iter().filter(|r| !r.in_band)
    }
}

fn row(metric: &str, empirical: Result<f64>, theory: f64, band: (f64, f64)) -> CompareRow {
    match empirical {
        Ok(e) => {
            let ratio = e / theory;
            CompareRow {
                metric: metric.to_string(),
                empirical: Some(e),
                theory,
                ratio: Some(ratio),
                band,
                in_band: ratio >= band.0 && ratio <= band.1,
                note: None,
            }
        }
        Err(err) => CompareRow {
            metric: metric.to_string(),
            empirical: None,
            theory,
            ratio: None,
            band,
            in_band: false,
            note: Some(err.to_string()),
        },
    }
}

/// Empirical metrics of `g` against the closed-form references for `p`.
pub fn compare(g: &SnapshotGraph, p: &BAParams, opts: &CompareOptions) -> Result<CompareReport> {
    let th = theory(p)?;
    let und = g.to_undirected();
    let b = &opts.bands;
    let rows = vec![
        row("density", density(g), th.density_ref, b.density),
        row(
            "effective_diameter",
            effective_diameter(&und, opts.quantile, opts.sources, opts.seed).map(f64::from),
            th.diameter_ref,
            b.diameter,
        ),
        row("clustering", clustering_coefficient(g), th.clustering_ref, b.clustering),
        row(
            "powerlaw_exponent",
            powerlaw_fit(&degrees(g, Direction::Total), KMin::Auto).map(|f| f.exponent),
            th.powerlaw_exponent_ref,
            b.powerlaw,
        ),
    ];
    Ok(CompareReport {
        params: *p,
        theory: th,
        mean_degree: mean_degree(g),
        undirected_mean_degree: mean_degree(&und),
        rows,
    })
}
