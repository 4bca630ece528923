use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::{read_text, sha256_hex, Dataset, DatasetKind, LoadOptions};
use crate::calendar::Month;
use crate::disruption::{CitationGraph, Paper};
use crate::error::{Error, Result};
use crate::graph_metrics::{NodeId, SnapshotGraph};
use crate::model_fit::{Observations, TimeSeries};
use crate::taxonomy::{CategoryGraph, Kind};

struct Rows<'a> {
    path: &'a Path,
    budget: usize,
    warnings: Vec<String>,
}

impl<'a> Rows<'a> {
    fn new(path: &'a Path, opts: &LoadOptions) -> Self {
        Rows { path, budget: opts.error_budget, warnings: Vec::new() }
    }

    /// Skip a malformed row while budget remains, else fail at it.
    fn reject(&mut self, line: usize, message: String) -> Result<()> {
        if self.warnings.len() < self.budget {
            log::warn!("{}:{line}: {message} (skipped)", self.path.display());
            self.warnings.push(format!("line {line}: {message}"));
            Ok(())
        } else {
            Err(Error::Parse { path: self.path.into(), line, message })
        }
    }

    fn dataset(self, kind: DatasetKind, digest: String, rows: usize, duplicates: usize) -> Dataset {
        let mut warnings = self.warnings;
        if duplicates > 0 {
            warnings.push(format!("{duplicates} duplicate rows removed"));
        }
        Dataset { kind, path: self.path.into(), digest, rows, duplicates, warnings }
    }
}

/// Non-blank, non-comment lines split on tabs, with 1-based line numbers.
fn tsv_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim_end_matches('\r');
        if l.trim().is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split('\t').map(str::trim).collect()))
        }
    })
}

type SeriesRows<'p> = (Vec<(Month, f64)>, Rows<'p>, String);

fn parse_series_rows<'p>(path: &'p Path, opts: &LoadOptions) -> Result<SeriesRows<'p>> {
    let text = read_text(path)?;
    let digest = sha256_hex(text.as_bytes());
    let mut rows = Rows::new(path, opts);
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut points: Vec<(Month, f64)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.into(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && rec.get(0).is_some_and(|h| h.eq_ignore_ascii_case("date")) {
            continue;
        }
        if rec.len() != 2 {
            rows.reject(line, format!("expected 2 fields date,value, got {}", rec.len()))?;
            continue;
        }
        let month = match rec[0].parse::<Month>() {
            Ok(m) => m,
            Err(e) => {
                rows.reject(line, e.to_string())?;
                continue;
            }
        };
        let value = match rec[1].parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => {
                rows.reject(line, format!("value {:?} is not a finite number", &rec[1]))?;
                continue;
            }
        };
        if let Some(&(prev, _)) = points.last() {
            if month <= prev {
                rows.reject(line, format!("month {month} does not follow {prev}"))?;
                continue;
            }
        }
        points.push((month, value));
    }
    Ok((points, rows, digest))
}

/// `date,value` CSV (optional header) with consecutive months.
pub fn load_series(path: &Path, opts: &LoadOptions) -> Result<(Dataset, TimeSeries)> {
    let (points, rows, digest) = parse_series_rows(path, opts)?;
    for w in points.windows(2) {
        if w[1].0 != w[0].0.succ() {
            return Err(Error::Schema {
                path: path.into(),
                message: format!("missing month {} (between {} and {})", w[0].0.succ(), w[0].0, w[1].0),
            });
        }
    }
    let first = points.first().map(|p| p.0).ok_or_else(|| Error::Schema {
        path: path.into(),
        message: "no data rows".into(),
    })?;
    let label = label_of(path);
    let n = points.len();
    let series = TimeSeries::new(first, points.into_iter().map(|p| p.1).collect(), label)?;
    Ok((rows.dataset(DatasetKind::Series, digest, n, 0), series))
}

/// As [`load_series`] but months may be missing.
pub fn load_observations(path: &Path, opts: &LoadOptions) -> Result<(Dataset, Observations)> {
    let (points, rows, digest) = parse_series_rows(path, opts)?;
    let n = points.len();
    let obs = Observations::new(points, label_of(path))?;
    Ok((rows.dataset(DatasetKind::Series, digest, n, 0), obs))
}

fn label_of(path: &Path) -> String {
    path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

/// Sorted, deduplicated `src<TAB>dst` lines of an edge file. Malformed
/// lines are ignored here; loaders report them.
pub fn canonical_edge_text(text: &str) -> String {
    let set: BTreeSet<(&str, &str)> = tsv_lines(text)
        .filter(|(_, f)| f.len() == 2 && !f[0].is_empty() && !f[1].is_empty())
        .map(|(_, f)| (f[0], f[1]))
        .collect();
    let mut out = String::new();
    for (a, b) in set {
        out.push_str(a);
        out.push('\t');
        out.push_str(b);
        out.push('\n');
    }
    out
}

fn parse_pairs<'t>(text: &'t str, rows: &mut Rows) -> Result<Vec<(&'t str, &'t str)>> {
    let mut pairs = Vec::new();
    for (line, f) in tsv_lines(text) {
        if f.len() != 2 || f[0].is_empty() || f[1].is_empty() {
            rows.reject(line, format!("expected src<TAB>dst, got {} fields", f.len()))?;
            continue;
        }
        pairs.push((f[0], f[1]));
    }
    Ok(pairs)
}

/// `src<TAB>dst` edge list; ids are interned in order of first appearance
/// and kept as node labels.
pub fn load_edge_list(path: &Path, opts: &LoadOptions) -> Result<(Dataset, SnapshotGraph)> {
    let text = read_text(path)?;
    let mut rows = Rows::new(path, opts);
    let pairs = parse_pairs(&text, &mut rows)?;
    let mut index: HashMap<&str, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut arcs: Vec<(NodeId, NodeId)> = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        let mut id = |s| {
            let next = index.len() as NodeId;
            *index.entry(s).or_insert_with(|| {
                labels.push(s.to_string());
                next
            })
        };
        arcs.push((id(a), id(b)));
    }
    if labels.is_empty() {
        return Err(Error::Schema { path: path.into(), message: "no edges".into() });
    }
    let n = labels.len();
    let g = SnapshotGraph::from_edges(n, arcs)?.with_labels(labels)?;
    let digest = sha256_hex(canonical_edge_text(&text).as_bytes());
    if g.self_loop_count() > 0 {
        rows.warnings.push(format!("{} self-loops", g.self_loop_count()));
    }
    let ds = rows.dataset(DatasetKind::EdgeList, digest, pairs.len(), g.duplicates_removed());
    Ok((ds, g))
}

/// Nodes TSV `id<TAB>year[<TAB>field]` and edges TSV `citing<TAB>cited`.
pub fn load_citations(
    nodes: &Path,
    edges: &Path,
    opts: &LoadOptions,
) -> Result<(Dataset, Dataset, CitationGraph)> {
    let ntext = read_text(nodes)?;
    let mut nrows = Rows::new(nodes, opts);
    let mut papers = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line, f) in tsv_lines(&ntext) {
        if f.len() < 2 || f.len() > 3 || f[0].is_empty() {
            nrows.reject(line, "expected id<TAB>year[<TAB>field]".into())?;
            continue;
        }
        let year = match f[1].parse::<i32>() {
            Ok(y) if (crate::disruption::MIN_YEAR..=crate::disruption::MAX_YEAR).contains(&y) => y,
            _ => {
                nrows.reject(line, format!("year {:?} not an integer in [1900, 2100]", f[1]))?;
                continue;
            }
        };
        if let Some(prev) = seen.insert(f[0].to_string(), line) {
            nrows.reject(line, format!("duplicate id {:?} (first at line {prev})", f[0]))?;
            continue;
        }
        papers.push(Paper {
            id: f[0].to_string(),
            year,
            field: f.get(2).filter(|s| !s.is_empty()).map(|s| s.to_string()),
        });
    }
    let etext = read_text(edges)?;
    let mut erows = Rows::new(edges, opts);
    let mut pairs = Vec::new();
    for (line, f) in tsv_lines(&etext) {
        if f.len() != 2 || f[0].is_empty() || f[1].is_empty() {
            erows.reject(line, "expected citing<TAB>cited".into())?;
            continue;
        }
        if !seen.contains_key(f[0]) || !seen.contains_key(f[1]) {
            let missing = if seen.contains_key(f[0]) { f[1] } else { f[0] };
            erows.reject(line, format!("unknown paper id {missing:?}"))?;
            continue;
        }
        if f[0] == f[1] {
            erows.reject(line, format!("paper {:?} cites itself", f[0]))?;
            continue;
        }
        pairs.push((f[0], f[1]));
    }
    let n_edges = pairs.len();
    let g = CitationGraph::new(papers, pairs)?;
    let nds = nrows.dataset(DatasetKind::CitationNodes, sha256_hex(ntext.as_bytes()), g.len(), 0);
    let eds = erows.dataset(
        DatasetKind::CitationEdges,
        sha256_hex(canonical_edge_text(&etext).as_bytes()),
        n_edges,
        g.duplicates_removed(),
    );
    Ok((nds, eds, g))
}

/// `child<TAB>parent<TAB>kind(child)` rows.
pub fn load_categories(path: &Path, opts: &LoadOptions) -> Result<(Dataset, CategoryGraph)> {
    let text = read_text(path)?;
    let mut rows = Rows::new(path, opts);
    let mut g = CategoryGraph::new();
    let mut n = 0;
    for (line, f) in tsv_lines(&text) {
        if f.len() != 3 || f[0].is_empty() || f[1].is_empty() {
            rows.reject(line, "expected child<TAB>parent<TAB>kind".into())?;
            continue;
        }
        let kind = match f[2].parse::<Kind>() {
            Ok(k) => k,
            Err(e) => {
                rows.reject(line, e.to_string())?;
                continue;
            }
        };
        if let Err(e) = g.add_edge(f[0], f[1], kind) {
            rows.reject(line, e.to_string())?;
            continue;
        }
        n += 1;
    }
    let digest = sha256_hex(text.as_bytes());
    Ok((rows.dataset(DatasetKind::Category, digest, n, 0), g))
}

/// One positive number per line.
pub fn load_samples(path: &Path, opts: &LoadOptions) -> Result<(Dataset, Vec<f64>)> {
    let text = read_text(path)?;
    let mut rows = Rows::new(path, opts);
    let mut out = Vec::new();
    for (line, f) in tsv_lines(&text) {
        match f[0].parse::<f64>() {
            Ok(v) if f.len() == 1 && v > 0.0 && v.is_finite() => out.push(v),
            _ => rows.reject(line, format!("{:?} is not a positive number", f.join("\t")))?,
        }
    }
    let digest = sha256_hex(text.as_bytes());
    Ok((rows.dataset(DatasetKind::Samples, digest, out.len(), 0), out))
}

/// One id per line, order preserved (first occurrence kept).
pub fn load_id_list(path: &Path, opts: &LoadOptions) -> Result<(Dataset, Vec<String>)> {
    let text = read_text(path)?;
    let mut rows = Rows::new(path, opts);
    let mut seen = BTreeSet::new();
    let mut ids = Vec::new();
    let mut dups = 0;
    for (line, f) in tsv_lines(&text) {
        if f.len() != 1 || f[0].is_empty() {
            rows.reject(line, "expected one id per line".into())?;
            continue;
        }
        if seen.insert(f[0]) {
            ids.push(f[0].to_string());
        } else {
            dups += 1;
        }
    }
    let digest = sha256_hex(text.as_bytes());
    Ok((rows.dataset(DatasetKind::IdList, digest, ids.len(), dups), ids))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct YearPairs {
    pub pub_years: Vec<i32>,
    pub incl_years: Vec<i32>,
    /// Present when every row carries a third column.
    pub fields: Option<Vec<String>>,
}

/// `pub_year<TAB>incl_year[<TAB>field]` rows.
pub fn load_year_pairs(path: &Path, opts: &LoadOptions) -> Result<(Dataset, YearPairs)> {
    let text = read_text(path)?;
    let mut rows = Rows::new(path, opts);
    let mut out = YearPairs::default();
    let mut fields = Vec::new();
    for (line, f) in tsv_lines(&text) {
        let parsed = (f.len() == 2 || f.len() == 3)
            .then(|| Some((f[0].parse::<i32>().ok()?, f[1].parse::<i32>().ok()?)))
            .flatten();
        match parsed {
            Some((p, i)) => {
                out.pub_years.push(p);
                out.incl_years.push(i);
                fields.push(f.get(2).map(|s| s.to_string()));
            }
            None => rows.reject(line, "expected pub_year<TAB>incl_year[<TAB>field]".into())?,
        }
    }
    if !fields.is_empty() && fields.iter().all(Option::is_some) {
        out.fields = Some(fields.into_iter().flatten().collect());
    }
    let digest = sha256_hex(text.as_bytes());
    let n = out.pub_years.len();
    Ok((rows.dataset(DatasetKind::YearPairs, digest, n, 0), out))
}

/// Canonical edge text of a graph using its labels (or indices).
pub fn graph_edge_text(g: &SnapshotGraph) -> String {
    let set: BTreeSet<(String, String)> = g.arcs().map(|(a, b)| (g.label(a), g.label(b))).collect();
    let mut out = String::new();
    for (a, b) in set {
        out.push_str(&a);
        out.push('\t');
        out.push_str(&b);
        out.push('\n');
    }
    out
}
