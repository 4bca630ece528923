use std::collections::{BTreeMap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::{NodeId, SnapshotGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
    #[default]
    Total,
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in" => Ok(Direction::In),
            "out" => Ok(Direction::Out),
            "total" => Ok(Direction::Total),
            _ => Err(Error::param(format!("direction must be in|out|total, got {s:?}"))),
        }
    }
}

/// E/(N(N−1)) with self-loops excluded.
pub fn density(g: &SnapshotGraph) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::domain("density needs at least 2 nodes"));
    }
    let e = (g.arc_count() - g.self_loop_count()) as f64;
    Ok(e / (n as f64 * (n as f64 - 1.0)))
}

/// E/N.
pub fn mean_degree(g: &SnapshotGraph) -> f64 {
    g.arc_count() as f64 / g.node_count() as f64
}

pub fn degrees(g: &SnapshotGraph, direction: Direction) -> Vec<u64> {
    (0..g.node_count() as NodeId)
        .map(|v| {
            (match direction {
                Direction::In => g.in_degree(v),
                Direction::Out => g.out_degree(v),
                Direction::Total => g.in_degree(v) + g.out_degree(v),
            }) as u64
        })
        .collect()
}

/// Shannon entropy (nats) of the degree histogram.
pub fn degree_entropy(g: &SnapshotGraph, direction: Direction) -> f64 {
    let mut hist: BTreeMap<u64, usize> = BTreeMap::new();
    for d in degrees(g, direction) {
        *hist.entry(d).or_default() += 1;
    }
    let n = g.node_count() as f64;
    let h: f64 = hist
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    h.max(0.0)
}

/// `degree_entropy / ln N`.
pub fn normalized_structural_entropy(g: &SnapshotGraph, direction: Direction) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::domain("normalized entropy needs at least 2 nodes"));
    }
    Ok((degree_entropy(g, direction) / (n as f64).ln()).clamp(0.0, 1.0))
}

/// `(A/c²)·x·(ln²N − 2 ln N + 2)`, a plotting aid with caller-chosen constants.
pub fn entropy_reference_curve(n: f64, a: f64, c: f64, x: f64) -> Result<f64> {
    if n.is_nan() || n < 2.0 {
        return Err(Error::domain(format!("N must be >= 2, got {n}")));
    }
    if c == 0.0 || !a.is_finite() || !c.is_finite() || !x.is_finite() {
        return Err(Error::param("A, c, x must be finite and c nonzero"));
    }
    let l = n.ln();
    Ok(a / (c * c) * x * (l * l - 2.0 * l + 2.0))
}

/// Histogram of BFS distances over reachable ordered pairs (u ≠ v).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceHistogram {
    /// `counts[d]` = number of pairs at distance `d` (index 0 unused).
    pub counts: Vec<u64>,
    pub sources: usize,
    pub exhaustive: bool,
}

impl DistanceHistogram {
    pub fn pairs(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Smallest d with at least `quantile` of pairs at distance ≤ d; 0 when no pairs.
    pub fn quantile(&self, quantile: f64) -> u32 {
        let total = self.pairs();
        if total == 0 {
            return 0;
        }
        let need = quantile * total as f64;
        let mut acc = 0u64;
        for (d, &c) in self.counts.iter().enumerate() {
            acc += c;
            // relative slack guards against quantile·total rounding up
            if acc as f64 >= need * (1.0 - 1e-12) {
                return d as u32;
            }
        }
        (self.counts.len() - 1) as u32
    }

    pub fn mean(&self) -> f64 {
        let total = self.pairs();
        if total == 0 {
            return 0.0;
        }
        let s: u64 = self.counts.iter().enumerate().map(|(d, &c)| d as u64 * c).sum();
        s as f64 / total as f64
    }
}

fn bfs_counts(g: &SnapshotGraph, src: NodeId, dist: &mut [u32], queue: &mut VecDeque<NodeId>) -> Vec<u64> {
    dist.fill(u32::MAX);
    queue.clear();
    dist[src as usize] = 0;
    queue.push_back(src);
    let mut counts = vec![0u64];
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in g.out_neighbors(u) {
            if dist[v as usize] == u32::MAX {
                let dv = du + 1;
                dist[v as usize] = dv;
                if counts.len() <= dv as usize {
                    counts.resize(dv as usize + 1, 0);
                }
                counts[dv as usize] += 1;
                queue.push_back(v);
            }
        }
    }
    counts
}

/// Sources are all nodes when `sources >= N`, otherwise a seeded sample
/// without replacement.
pub fn sample_sources(n: usize, sources: usize, seed: u64) -> Vec<NodeId> {
    if sources >= n {
        return (0..n as NodeId).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<NodeId> = rand::seq::index::sample(&mut rng, n, sources)
        .into_iter()
        .map(|i| i as NodeId)
        .collect();
    picked.sort_unstable();
    picked
}

pub fn distance_histogram(g: &SnapshotGraph, sources: usize, seed: u64) -> Result<DistanceHistogram> {
    if sources == 0 {
        return Err(Error::param("sources must be >= 1"));
    }
    let n = g.node_count();
    let srcs = sample_sources(n, sources, seed);
    let per_source: Vec<Vec<u64>> = srcs
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], VecDeque::new()),
            |(dist, queue), &s| bfs_counts(g, s, dist, queue),
        )
        .collect();
    let len = per_source.iter().map(Vec::len).max().unwrap_or(1);
    let mut counts = vec![0u64; len];
    for c in &per_source {
        for (d, &k) in c.iter().enumerate() {
            counts[d] += k;
        }
    }
    Ok(DistanceHistogram {
        counts,
        sources: srcs.len(),
        exhaustive: srcs.len() == n,
    })
}

/// Quantile effective diameter over reachable ordered pairs.
pub fn effective_diameter(g: &SnapshotGraph, quantile: f64, sources: usize, seed: u64) -> Result<u32> {
    if !(quantile > 0.0 && quantile <= 1.0) {
        return Err(Error::param(format!("quantile must be in (0, 1], got {quantile}")));
    }
    if g.arc_count() == g.self_loop_count() {
        return Ok(0);
    }
    Ok(distance_histogram(g, sources, seed)?.quantile(quantile))
}

/// Mean BFS distance over reachable ordered pairs.
pub fn avg_shortest_path(g: &SnapshotGraph, sources: usize, seed: u64) -> Result<f64> {
    if g.arc_count() == g.self_loop_count() {
        return Ok(0.0);
    }
    Ok(distance_histogram(g, sources, seed)?.mean())
}

/// Mean local clustering on the undirected projection.
pub fn clustering_coefficient(g: &SnapshotGraph) -> Result<f64> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::domain("clustering needs at least 3 nodes"));
    }
    let u = if g.is_symmetric() && g.self_loop_count() == 0 {
        g.clone()
    } else {
        g.to_undirected()
    };
    let total: f64 = (0..n as NodeId)
        .into_par_iter()
        .map(|v| {
            let nb = u.out_neighbors(v);
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (i, &a) in nb.iter().enumerate() {
                let na = u.out_neighbors(a);
                // count neighbours of `a` among nb[i+1..]; both lists sorted
                let rest = &nb[i + 1..];
                let (mut p, mut q) = (0, 0);
                while p < na.len() && q < rest.len() {
                    match na[p].cmp(&rest[q]) {
                        std::cmp::Ordering::Less => p += 1,
                        std::cmp::Ordering::Greater => q += 1,
                        std::cmp::Ordering::Equal => {
                            links += 1;
                            p += 1;
                            q += 1;
                        }
                    }
                }
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(total / n as f64)
}
