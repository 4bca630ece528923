use serde::Serialize;

use crate::error::{Error, Result};

/// Node identifier: dense index in `[0, N)`.
pub type NodeId = u32;

/// Immutable directed graph in compressed sparse row form (both directions).
///
/// Parallel arcs are removed on construction and counted; self-loops are
/// kept and counted.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotGraph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    labels: Option<Vec<String>>,
    self_loops: usize,
    duplicates_removed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub arcs: usize,
    pub self_loops: usize,
    pub duplicates_removed: usize,
}

fn csr(n: usize, pairs: &[(NodeId, NodeId)]) -> (Vec<usize>, Vec<NodeId>) {
    // `pairs` sorted by (key, value)
    let mut offsets = vec![0usize; n + 1];
    for &(k, _) in pairs {
        offsets[k as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, pairs.iter().map(|&(_, v)| v).collect())
}

impl SnapshotGraph {
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n == 0 {
            return Err(Error::param("graph needs at least one node"));
        }
        if n > NodeId::MAX as usize {
            return Err(Error::param(format!("{n} nodes exceed the id range")));
        }
        let mut arcs: Vec<(NodeId, NodeId)> = edges.into_iter().collect();
        if let Some(&(s, d)) = arcs.iter().find(|&&(s, d)| s as usize >= n || d as usize >= n) {
            return Err(Error::param(format!("arc {s}->{d} references a node outside [0, {n})")));
        }
        arcs.sort_unstable();
        let before = arcs.len();
        arcs.dedup();
        let duplicates_removed = before - arcs.len();
        let self_loops = arcs.iter().filter(|(s, d)| s == d).count();

        let (out_offsets, out_targets) = csr(n, &arcs);
        let mut rev: Vec<(NodeId, NodeId)> = arcs.iter().map(|&(s, d)| (d, s)).collect();
        rev.sort_unstable();
        let (in_offsets, in_sources) = csr(n, &rev);
        Ok(SnapshotGraph {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            labels: None,
            self_loops,
            duplicates_removed,
        })
    }

    /// Attach node labels (one per node).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::param(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: NodeId) -> String {
        match &self.labels {
            Some(l) => l[v as usize].clone(),
            None => v.to_string(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of distinct arcs, self-loops included.
    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn self_loop_count(&self) -> usize {
        self.self_loops
    }

    pub fn duplicates_removed(&self) -> usize {
        self.duplicates_removed
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            nodes: self.n,
            arcs: self.arc_count(),
            self_loops: self.self_loops,
            duplicates_removed: self.duplicates_removed,
        }
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_neighbors(v).len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_neighbors(v).len()
    }

    /// Arcs in ascending (source, target) order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n as NodeId).flat_map(move |s| self.out_neighbors(s).iter().map(move |&d| (s, d)))
    }

    /// Symmetric closure without self-loops: every arc becomes a pair of
    /// opposite arcs.
    pub fn to_undirected(&self) -> SnapshotGraph {
        let arcs = self
            .arcs()
            .filter(|(s, d)| s != d)
            .flat_map(|(s, d)| [(s, d), (d, s)]);
        let mut g = SnapshotGraph::from_edges(self.n, arcs).expect("endpoints already validated");
        g.duplicates_removed = 0;
        g.labels = self.labels.clone();
        g
    }

    /// Whether every arc has its reverse.
    pub fn is_symmetric(&self) -> bool {
        self.arcs()
            .all(|(s, d)| self.out_neighbors(d).binary_search(&s).is_ok())
    }

    /// Relabel nodes by `perm[old] = new`.
    pub fn permuted(&self, perm: &[NodeId]) -> Result<SnapshotGraph> {
        if perm.len() != self.n {
            return Err(Error::param("permutation length differs from node count"));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p as usize >= self.n || std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::param("not a permutation"));
            }
        }
        SnapshotGraph::from_edges(
            self.n,
            self.arcs().map(|(s, d)| (perm[s as usize], perm[d as usize])),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_and_loops() {
        let g = SnapshotGraph::from_edges(3, [(0, 1), (0, 1), (1, 1), (2, 0)]).unwrap();
        assert_eq!(g.arc_count(), 3);
        assert_eq!(g.duplicates_removed(), 1);
        assert_eq!(g.self_loop_count(), 1);
        assert_eq!(g.out_neighbors(0), &[1]);
        assert_eq!(g.in_neighbors(1), &[0, 1]);
        assert_eq!(g.arcs().collect::<Vec<_>>(), vec![(0, 1), (1, 1), (2, 0)]);
    }

    #[test]
    fn rejects_bad_endpoints() {
        assert!(SnapshotGraph::from_edges(2, [(0, 2)]).is_err());
        assert!(SnapshotGraph::from_edges(0, []).is_err());
    }

    #[test]
    fn undirected_projection() {
        let g = SnapshotGraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 2)]).unwrap();
        let u = g.to_undirected();
        assert!(u.is_symmetric());
        assert_eq!(u.arc_count(), 4);
        assert_eq!(u.self_loop_count(), 0);
    }
}
