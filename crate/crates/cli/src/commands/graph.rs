use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use kgrowth::ba_sim::{compare, generate_edges, BAParams, CompareOptions, CompareReport};
use kgrowth::graph_metrics::{
    avg_shortest_path, clustering_coefficient, degree_entropy, degrees, density, distance_histogram,
    entropy_reference_curve, hurwitz_zeta, lognormal_fit, mean_degree, normal_cdf, normalized_structural_entropy,
    powerlaw_fit, Direction, GraphSummary, KMin, LogNormalFit, PowerLawFit, SnapshotGraph,
};
use kgrowth::ingest_store::{load_edge_list, load_samples, write_atomic, CacheKey, Dataset, LoadOptions, Report};
use serde::{Deserialize, Serialize};

use crate::args::{BaArgs, DistfitArgs, MetricsArgs};
use crate::output::{parse_flag, usage, CliError, CliResult, Ctx};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Entropies {
    #[serde(rename = "in")]
    pub in_: f64,
    pub out: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsRow {
    pub label: String,
    pub nodes: usize,
    pub arcs: usize,
    pub self_loops: usize,
    pub duplicates_removed: usize,
    pub density: Option<f64>,
    pub mean_degree: f64,
    pub degree_entropy: Entropies,
    pub normalized_entropy: Option<f64>,
    pub effective_diameter: u32,
    pub avg_shortest_path: f64,
    pub clustering: Option<f64>,
    pub powerlaw: Option<PowerLawFit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Degree histogram, degree → node count.
    pub degree_histogram: BTreeMap<u64, usize>,
    /// Distance → reachable pair count over the sampled sources.
    pub distance_histogram: Vec<u64>,
}

#[derive(Serialize)]
struct MetricsParams<'a> {
    sources: usize,
    quantile: f64,
    direction: &'a str,
    undirected: bool,
    seed: u64,
}

fn label_of(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn compute_metrics(
    g: &SnapshotGraph,
    label: String,
    dir: Direction,
    args: &MetricsArgs,
    seed: u64,
) -> CliResult<MetricsRow> {
    let s: GraphSummary = g.summary();
    let mut notes = Vec::new();
    let paths = if args.undirected { g.to_undirected() } else { g.clone() };
    let hist = distance_histogram(&paths, args.sources, seed)?;
    let degs = degrees(g, dir);
    let mut degree_histogram = BTreeMap::new();
    for &d in &degs {
        *degree_histogram.entry(d).or_default() += 1;
    }
    let powerlaw = match powerlaw_fit(&degs, KMin::Auto) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("power law: {e}"));
            None
        }
    };
    Ok(MetricsRow {
        label,
        nodes: s.nodes,
        arcs: s.arcs,
        self_loops: s.self_loops,
        duplicates_removed: s.duplicates_removed,
        density: density(g).ok(),
        mean_degree: mean_degree(g),
        degree_entropy: Entropies {
            in_: degree_entropy(g, Direction::In),
            out: degree_entropy(g, Direction::Out),
            total: degree_entropy(g, Direction::Total),
        },
        normalized_entropy: normalized_structural_entropy(g, dir).ok(),
        effective_diameter: kgrowth::graph_metrics::effective_diameter(&paths, args.quantile, args.sources, seed)?,
        avg_shortest_path: avg_shortest_path(&paths, args.sources, seed)?,
        clustering: clustering_coefficient(g).ok(),
        powerlaw,
        notes,
        degree_histogram,
        distance_histogram: hist.counts,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

pub fn metrics(ctx: &mut Ctx, args: &MetricsArgs) -> CliResult {
    let dir: Direction = parse_flag("direction", &args.direction)?;
    if !(args.quantile > 0.0 && args.quantile <= 1.0) {
        return usage(format!("--quantile must be in (0, 1], got {}", args.quantile));
    }
    if args.sources == 0 {
        return usage("--sources must be >= 1");
    }
    let entropy_ref = match args.entropy_ref.as_slice() {
        [] => None,
        &[a, c, x] if c != 0.0 => Some((a, c, x)),
        _ => return usage("--entropy-ref needs A,c,x with c != 0"),
    };
    let cache = ctx.cache()?;
    let opts = LoadOptions { error_budget: args.graph.error_budget };
    let params = MetricsParams {
        sources: args.sources,
        quantile: args.quantile,
        direction: &args.direction,
        undirected: args.undirected,
        seed: ctx.seed,
    };

    let mut inputs: Vec<Dataset> = Vec::new();
    let mut rows: Vec<MetricsRow> = Vec::new();
    for path in &args.graph.input {
        let (ds, g) = load_edge_list(path, &opts)?;
        let label = label_of(path);
        let key = CacheKey::new(&[&ds.digest], "metrics", &params)?;
        let cached = cache
            .as_ref()
            .and_then(|c| c.get(&key))
            .and_then(|b| serde_json::from_slice::<MetricsRow>(&b).ok());
        let row = match cached {
            Some(mut r) => {
                log::info!("cache hit for {}", path.display());
                r.label = label;
                r
            }
            None => {
                let r = compute_metrics(&g, label, dir, args, ctx.seed)?;
                if let Some(c) = &cache {
                    c.put(&key, &serde_json::to_vec(&r)?)?;
                }
                r
            }
        };
        inputs.push(ds);
        rows.push(row);
    }

    for r in &rows {
        ctx.say(format!("{}: N = {}, E = {} ({} self-loops, {} duplicates removed)", r.label, r.nodes, r.arcs, r.self_loops, r.duplicates_removed));
        ctx.say(format!("  density            {}", opt(r.density)));
        ctx.say(format!("  mean degree        {:.6}", r.mean_degree));
        ctx.say(format!(
            "  degree entropy     in {:.4}  out {:.4}  total {:.4}",
            r.degree_entropy.in_, r.degree_entropy.out, r.degree_entropy.total
        ));
        ctx.say(format!("  normalized entropy {}", opt(r.normalized_entropy)));
        ctx.say(format!("  effective diameter {}", r.effective_diameter));
        ctx.say(format!("  avg shortest path  {:.4}", r.avg_shortest_path));
        ctx.say(format!("  clustering         {}", opt(r.clustering)));
        match &r.powerlaw {
            Some(p) => ctx.say(format!(
                "  power law          exponent {:.3} kmin {} ks {:.4} (n = {})",
                p.exponent, p.kmin, p.ks_distance, p.n_tail
            )),
            None => ctx.say("  power law          -"),
        }
        for n in &r.notes {
            ctx.say(format!("  note: {n}"));
        }
    }

    for r in &rows {
        for (&k, &c) in &r.degree_histogram {
            ctx.plot(&format!("degree_hist:{}", r.label), k, c as f64);
        }
        for (d, &c) in r.distance_histogram.iter().enumerate().skip(1) {
            ctx.plot(&format!("distance_hist:{}", r.label), d, c as f64);
        }
    }
    for r in &rows {
        let n = r.nodes;
        if let Some(d) = r.density {
            ctx.plot("density", n, d);
        }
        ctx.plot("mean_degree", n, r.mean_degree);
        let h = match dir {
            Direction::In => r.degree_entropy.in_,
            Direction::Out => r.degree_entropy.out,
            Direction::Total => r.degree_entropy.total,
        };
        ctx.plot("degree_entropy", n, h);
        if let Some(s) = r.normalized_entropy {
            ctx.plot("normalized_entropy", n, s);
        }
        ctx.plot("effective_diameter", n, f64::from(r.effective_diameter));
        ctx.plot("avg_shortest_path", n, r.avg_shortest_path);
        if let Some(c) = r.clustering {
            ctx.plot("clustering", n, c);
        }
        if let Some((a, c, x)) = entropy_ref {
            if n >= 2 {
                ctx.plot("entropy_ref", n, entropy_reference_curve(n as f64, a, c, x)?);
            }
        }
    }
    ctx.report(&Report::new("metrics", inputs, rows))
}

#[derive(Serialize)]
struct BaBody {
    params: BAParams,
    edges: usize,
    expected_edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<CompareReport>,
}

pub fn ba(ctx: &mut Ctx, args: &BaArgs) -> CliResult {
    let p = BAParams::new(args.nodes, args.m, ctx.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.sources == 0 {
        return usage("--sources must be >= 1");
    }
    if !args.no_compare && args.nodes < 10 {
        return usage("comparison needs --nodes >= 10 (or pass --no-compare)");
    }
    let edges = generate_edges(&p)?;
    if let Some(out) = &args.output {
        let mut text = String::with_capacity(edges.len() * 12);
        for (a, b) in &edges {
            let _ = writeln!(text, "{a}\t{b}");
        }
        write_atomic(out, text.as_bytes())?;
    }
    let g = SnapshotGraph::from_edges(p.n, edges.iter().copied())?;
    ctx.say(format!("BA n = {}, m = {}, seed = {}: {} edges (expected {})", p.n, p.m, p.seed, g.arc_count(), p.expected_edges()));

    let report = if args.no_compare {
        None
    } else {
        let r = compare(&g, &p, &CompareOptions { sources: args.sources, seed: ctx.seed, ..CompareOptions::default() })?;
        ctx.say(format!("mean degree {:.4} (undirected {:.4})", r.mean_degree, r.undirected_mean_degree));
        ctx.say(format!("{:<20} {:>12} {:>12} {:>8}  band", "metric", "empirical", "theory", "ratio"));
        for row in &r.rows {
            ctx.say(format!(
                "{:<20} {:>12} {:>12.6} {:>8}  [{}, {}]{}",
                row.metric,
                row.empirical.map_or("-".into(), |v| format!("{v:.6}")),
                row.theory,
                row.ratio.map_or("-".into(), |v| format!("{v:.3}")),
                row.band.0,
                row.band.1,
                if row.in_band { "" } else { "  OUT OF BAND" }
            ));
        }
        let deg = degrees(&g, Direction::Total);
        let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
        for d in deg {
            *counts.entry(d).or_default() += 1;
        }
        let n = g.node_count() as f64;
        let mut above = n;
        for (&k, &c) in &counts {
            ctx.plot("ccdf", k, above / n);
            if k >= 1 {
                ctx.plot("ccdf_theory", k, r.theory.ccdf(k as f64));
            }
            above -= c as f64;
        }
        Some(r)
    };
    ctx.report(&Report::new(
        "ba",
        vec![],
        BaBody { params: p, edges: g.arc_count(), expected_edges: p.expected_edges(), compare: report },
    ))
}

#[derive(Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum DistBody {
    Lognormal(LogNormalFit),
    Powerlaw(PowerLawFit),
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn distfit(ctx: &mut Ctx, args: &DistfitArgs) -> CliResult {
    let lognormal = match args.family.as_str() {
        "lognormal" => true,
        "powerlaw" => false,
        f => return usage(format!("--family must be lognormal or powerlaw, got {f:?}")),
    };
    let kmin = match args.kmin.as_str() {
        "auto" => KMin::Auto,
        k => match k.parse::<u64>() {
            Ok(k) if k >= 1 => KMin::Fixed(k),
            _ => return usage(format!("--kmin must be a positive integer or auto, got {k:?}")),
        },
    };
    let dir: Direction = parse_flag("direction", &args.direction)?;
    if args.bins == 0 {
        return usage("--bins must be >= 1");
    }

    let (ds, samples) = match (&args.input, &args.edges) {
        (Some(p), _) => load_samples(p, &LoadOptions::default())?,
        (None, Some(p)) => {
            let (ds, g) = load_edge_list(p, &LoadOptions::default())?;
            (ds, degrees(&g, dir).into_iter().filter(|&d| d > 0).map(|d| d as f64).collect())
        }
        (None, None) => unreachable!("clap requires an input"),
    };

    let body = if lognormal {
        let f = lognormal_fit(&samples)?;
        ctx.say(format!("lognormal: mu {:.6} sigma {:.6} ks {:.5} (n = {})", f.mu, f.sigma, f.ks_distance, f.n));
        let logs: Vec<f64> = samples.iter().map(|s| s.ln()).collect();
        let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = if hi > lo { (hi - lo) / args.bins as f64 } else { 1.0 };
        let mut hist = vec![0usize; args.bins];
        for l in &logs {
            let b = (((l - lo) / width) as usize).min(args.bins - 1);
            hist[b] += 1;
        }
        for (i, &c) in hist.iter().enumerate() {
            let x = lo + (i as f64 + 0.5) * width;
            ctx.plot("empirical_density", x, c as f64 / (logs.len() as f64 * width));
            if f.sigma > 0.0 {
                ctx.plot("fitted_density", x, normal_pdf((x - f.mu) / f.sigma) / f.sigma);
            }
        }
        if f.sigma > 0.0 && ctx.wants_plot() {
            let mut sorted = logs.clone();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len() as f64;
            for (i, l) in sorted.iter().enumerate().step_by((sorted.len() / 200).max(1)) {
                ctx.plot("empirical_cdf", l, (i + 1) as f64 / n);
                ctx.plot("fitted_cdf", l, normal_cdf((l - f.mu) / f.sigma));
            }
        }
        DistBody::Lognormal(f)
    } else {
        let ints: Vec<u64> = samples
            .iter()
            .map(|&s| {
                if s.fract() == 0.0 && s >= 1.0 && s < u64::MAX as f64 {
                    Ok(s as u64)
                } else {
                    Err(kgrowth::Error::Domain(format!("power-law samples must be positive integers, got {s}")))
                }
            })
            .collect::<Result<_, _>>()?;
        let f = powerlaw_fit(&ints, kmin)?;
        ctx.say(format!(
            "power law: exponent {:.4} kmin {} ks {:.5} (tail n = {})",
            f.exponent, f.kmin, f.ks_distance, f.n_tail
        ));
        let mut tail: Vec<u64> = ints.into_iter().filter(|&k| k >= f.kmin).collect();
        tail.sort_unstable();
        let n = tail.len() as f64;
        let z0 = hurwitz_zeta(f.exponent, f.kmin as f64);
        let mut i = 0;
        while i < tail.len() {
            let k = tail[i];
            ctx.plot("empirical_ccdf", k, (tail.len() - i) as f64 / n);
            ctx.plot("fitted_ccdf", k, hurwitz_zeta(f.exponent, k as f64) / z0);
            while i < tail.len() && tail[i] == k {
                i += 1;
            }
        }
        DistBody::Powerlaw(f)
    };
    ctx.report(&Report::new("distfit", vec![ds], body))
}
