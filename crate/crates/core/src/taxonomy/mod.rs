//! Category hierarchy with multiple parents and tolerated cycles.

mod presets;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use presets::{builtin_presets, load_presets, Presets, WAG_PRESETS_TOML};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Article,
    Category,
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "article" => Ok(Kind::Article),
            "category" => Ok(Kind::Category),
            _ => Err(Error::param(format!("kind must be article|category, got {s:?}"))),
        }
    }
}

/// Interned category/article lattice. Edges run child → parent.
#[derive(Debug, Clone, Default)]
pub struct CategoryGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    kinds: Vec<Kind>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    // Kind only implied by appearing as a parent; may still be declared.
    implied: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberCounts {
    pub articles: usize,
    pub categories: usize,
}

impl CategoryGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records<I, S>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, Kind)>,
        S: AsRef<str>,
    {
        let mut g = CategoryGraph::new();
        for (c, p, k) in records {
            g.add_edge(c.as_ref(), p.as_ref(), k)?;
        }
        Ok(g)
    }

    fn intern(&mut self, name: &str, kind: Kind, declared: bool) -> Result<usize> {
        if let Some(&i) = self.index.get(name) {
            if self.kinds[i] != kind {
                if self.implied[i] && declared && kind == Kind::Category {
                    self.implied[i] = false;
                } else {
                    return Err(Error::param(format!(
                        "{name:?} is both article and category"
                    )));
                }
            } else if declared {
                self.implied[i] = false;
            }
            return Ok(i);
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.kinds.push(kind);
        self.parents.push(Vec::new());
        self.children.push(Vec::new());
        self.implied.push(!declared);
        Ok(i)
    }

    /// Declare a node with no edges.
    pub fn add_node(&mut self, name: &str, kind: Kind) -> Result<()> {
        self.intern(name, kind, true).map(|_| ())
    }

    /// Record `child` under `parent`. Parents are categories; the child's
    /// kind must agree with earlier rows.
    pub fn add_edge(&mut self, child: &str, parent: &str, child_kind: Kind) -> Result<()> {
        if child.is_empty() || parent.is_empty() {
            return Err(Error::param("empty node name"));
        }
        let c = self.intern(child, child_kind, true)?;
        let p = self.intern(parent, Kind::Category, false)?;
        if !self.parents[c].contains(&p) {
            self.parents[c].push(p);
            self.children[p].push(c);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn kind(&self, name: &str) -> Option<Kind> {
        self.index.get(name).map(|&i| self.kinds[i])
    }

    pub fn parents(&self, name: &str) -> Option<Vec<&str>> {
        let &i = self.index.get(name)?;
        Some(self.parents[i].iter().map(|&p| self.names[p].as_str()).collect())
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn category_count(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == Kind::Category).count()
    }

    fn category_parents(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        // parents are always categories
        self.parents[v].iter().copied()
    }

    /// One representative cycle per strongly connected component of the
    /// category subgraph with two or more members, plus one per self-loop.
    ///
    /// A cycle lists nodes along child → parent edges, starting at the
    /// component's earliest-loaded node.
    pub fn detect_cycles(&self) -> Vec<Vec<String>> {
        let comp = self.scc();
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &c) in comp.iter().enumerate() {
            if self.kinds[v] == Kind::Category {
                members.entry(c).or_default().push(v);
            }
        }
        let mut cycles: Vec<(usize, Vec<String>)> = Vec::new();
        for vs in members.values() {
            let start = *vs.iter().min().expect("non-empty component");
            if vs.len() >= 2 {
                let path = self.cycle_through(start, &comp);
                cycles.push((start, path.into_iter().map(|i| self.names[i].clone()).collect()));
            } else if self.parents[start].contains(&start) {
                cycles.push((start, vec![self.names[start].clone()]));
            }
        }
        // self-loops inside larger components are reported separately
        for (v, ps) in self.parents.iter().enumerate() {
            if ps.contains(&v) && members[&comp[v]].len() >= 2 {
                cycles.push((v, vec![self.names[v].clone()]));
            }
        }
        cycles.sort_by_key(|(s, c)| (*s, c.len()));
        cycles.into_iter().map(|(_, c)| c).collect()
    }

    /// Shortest child → parent cycle through `start` within its component.
    fn cycle_through(&self, start: usize, comp: &[usize]) -> Vec<usize> {
        let mut prev: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for p in self.category_parents(u) {
                if comp[p] != comp[start] {
                    continue;
                }
                if p == start && u != start {
                    let mut path = vec![u];
                    let mut cur = u;
                    while cur != start {
                        cur = prev[&cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return path;
                }
                if p != start && !prev.contains_key(&p) {
                    prev.insert(p, u);
                    queue.push_back(p);
                }
            }
        }
        unreachable!("component of size >= 2 has a cycle through every member")
    }

    /// Iterative Tarjan over child → parent edges; returns component ids.
    fn scc(&self) -> Vec<usize> {
        let n = self.len();
        const UNSET: usize = usize::MAX;
        let mut index = vec![UNSET; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![UNSET; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut next = 0usize;
        let mut ncomp = 0usize;
        for root in 0..n {
            if index[root] != UNSET {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut i)) = call.last_mut() {
                if let Some(&w) = self.parents[v].get(*i) {
                    *i += 1;
                    if index[w] == UNSET {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
        comp
    }

    fn resolve_roots<S: AsRef<str>>(&self, roots: &[S]) -> Result<Vec<usize>> {
        roots
            .iter()
            .map(|r| {
                let r = r.as_ref();
                match self.index.get(r) {
                    None => Err(Error::UnknownId(format!("unknown root category {r:?}"))),
                    Some(&i) if self.kinds[i] != Kind::Category => {
                        Err(Error::param(format!("root {r:?} is an article")))
                    }
                    Some(&i) => Ok(i),
                }
            })
            .collect()
    }

    /// Categories within `depth` levels below `roots` with their minimum level.
    pub fn descendant_levels<S: AsRef<str>>(&self, roots: &[S], depth: usize) -> Result<BTreeMap<String, usize>> {
        let level = self.levels(&self.resolve_roots(roots)?, depth);
        Ok(level.into_iter().map(|(i, l)| (self.names[i].clone(), l)).collect())
    }

    fn levels(&self, roots: &[usize], depth: usize) -> HashMap<usize, usize> {
        let mut level: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for &r in roots {
            if level.insert(r, 0).is_none() {
                queue.push_back(r);
            }
        }
        while let Some(u) = queue.pop_front() {
            let l = level[&u];
            if l >= depth {
                continue;
            }
            for &c in &self.children[u] {
                if self.kinds[c] == Kind::Category && !level.contains_key(&c) {
                    level.insert(c, l + 1);
                    queue.push_back(c);
                }
            }
        }
        level
    }

    /// Categories reachable downward within `depth` levels, roots included.
    pub fn descendants<S: AsRef<str>>(&self, roots: &[S], depth: usize) -> Result<BTreeSet<String>> {
        Ok(self.descendant_levels(roots, depth)?.into_keys().collect())
    }

    /// Distinct articles attached to any category in `descendants`.
    pub fn count_members<S: AsRef<str>>(&self, roots: &[S], depth: usize) -> Result<MemberCounts> {
        let cats = self.levels(&self.resolve_roots(roots)?, depth);
        let mut articles: BTreeSet<usize> = BTreeSet::new();
        for &c in cats.keys() {
            articles.extend(self.children[c].iter().copied().filter(|&a| self.kinds[a] == Kind::Article));
        }
        Ok(MemberCounts {
            articles: articles.len(),
            categories: cats.len(),
        })
    }

    /// Kahn topological order of the category subgraph, `None` if cyclic.
    pub fn topological_order(&self) -> Option<Vec<String>> {
        let cats: Vec<usize> = (0..self.len()).filter(|&v| self.kinds[v] == Kind::Category).collect();
        let mut indeg = vec![0usize; self.len()];
        for &v in &cats {
            for p in self.category_parents(v) {
                indeg[p] += 1;
            }
        }
        let mut queue: VecDeque<usize> = cats.iter().copied().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(cats.len());
        while let Some(u) = queue.pop_front() {
            order.push(self.names[u].clone());
            for p in self.category_parents(u) {
                indeg[p] -= 1;
                if indeg[p] == 0 {
                    queue.push_back(p);
                }
            }
        }
        (order.len() == cats.len()).then_some(order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Kind::*;

    fn g(rows: &[(&str, &str, Kind)]) -> CategoryGraph {
        CategoryGraph::from_records(rows.iter().copied()).unwrap()
    }

    #[test]
    fn physics_mathematics_loop() {
        let t = g(&[("Physics", "Mathematics", Category), ("Mathematics", "Physics", Category)]);
        assert_eq!(t.detect_cycles(), vec![vec!["Physics".to_string(), "Mathematics".to_string()]]);
        let d = t.descendants(&["Physics"], 3).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), ["Mathematics", "Physics"]);
        assert!(t.topological_order().is_none());
    }

    #[test]
    fn tree_and_triangle() {
        let tree = g(&[("B", "A", Category), ("C", "A", Category), ("x", "B", Article)]);
        assert!(tree.detect_cycles().is_empty());
        assert!(tree.topological_order().is_some());
        let tri = g(&[("A", "B", Category), ("B", "C", Category), ("C", "A", Category)]);
        let c = tri.detect_cycles();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0], ["A", "B", "C"]);
    }

    #[test]
    fn self_loop() {
        let t = g(&[("A", "A", Category), ("B", "C", Category), ("C", "B", Category), ("B", "B", Category)]);
        let c = t.detect_cycles();
        assert_eq!(c, vec![vec!["A".to_string()], vec!["B".into()], vec!["B".into(), "C".into()]]);
    }

    #[test]
    fn chain_depths() {
        let t = g(&[
            ("Algebra", "Math", Category),
            ("LinearAlgebra", "Algebra", Category),
            ("Matrices", "LinearAlgebra", Category),
            ("Tensors", "Matrices", Category),
        ]);
        assert_eq!(t.descendants(&["Math"], 0).unwrap().len(), 1);
        assert_eq!(
            t.descendants(&["Math"], 3).unwrap().into_iter().collect::<Vec<_>>(),
            ["Algebra", "LinearAlgebra", "Math", "Matrices"]
        );
        assert!(t.descendants(&["Nope"], 3).is_err());
    }

    #[test]
    fn member_counts() {
        let t = g(&[("a1", "Biology", Article), ("a2", "Biology", Article), ("a3", "Biology", Article)]);
        assert_eq!(t.count_members(&["Biology"], 3).unwrap(), MemberCounts { articles: 3, categories: 1 });
        let t = g(&[
            ("Biochemistry", "Biology", Category),
            ("Biochemistry", "Chemistry", Category),
            ("enzyme", "Biochemistry", Article),
            ("enzyme", "Chemistry", Article),
        ]);
        let c = t.count_members(&["Biology", "Chemistry"], 3).unwrap();
        assert_eq!(c, MemberCounts { articles: 1, categories: 3 });
        let none: [&str; 0] = [];
        assert_eq!(t.count_members(&none, 3).unwrap(), MemberCounts { articles: 0, categories: 0 });
    }

    #[test]
    fn kind_conflicts() {
        let mut t = CategoryGraph::new();
        t.add_edge("x", "A", Article).unwrap();
        assert!(t.add_edge("y", "x", Category).is_err());
        assert!(t.add_edge("x", "B", Category).is_err());
        // declared after being seen only as a parent
        t.add_edge("A", "Root", Category).unwrap();
        assert!(t.add_edge("A", "Root", Article).is_err());
        assert!(t.descendants(&["x"], 1).is_err());
    }
}
