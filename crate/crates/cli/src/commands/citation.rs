use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use kgrowth::disruption::{
    d_index, d_index_all, inclusion_lag, intersect_analysis, rank_with, DOptions, DScore, IntersectRow, LagReport,
    RankKey,
};
use kgrowth::ingest_store::{load_citations, load_id_list, load_year_pairs, write_atomic, LoadOptions, Report};
use serde::Serialize;

use crate::args::{DisruptArgs, IntersectArgs};
use crate::output::{parse_flag, usage, CliResult, Ctx};

fn parse_years(s: &str) -> CliResult<(i32, i32)> {
    let bad = || usage(format!("--years expects FROM:TO, got {s:?}"));
    let Some((a, b)) = s.split_once(':') else { return bad() };
    match (a.trim().parse::<i32>(), b.trim().parse::<i32>()) {
        (Ok(a), Ok(b)) if a <= b => Ok((a, b)),
        _ => bad(),
    }
}

#[derive(Serialize)]
struct Ranked {
    id: String,
    citations: usize,
    d: f64,
    defined: bool,
}

#[derive(Serialize)]
struct CitationBody {
    papers: usize,
    edges: usize,
    duplicates_removed: usize,
    window_years: Option<i32>,
    defined: usize,
    mean_d: Option<f64>,
    scores: Vec<DScore>,
    #[serde(skip_serializing_if = "Option::is_none")]
    top: Option<Vec<Ranked>>,
}

#[derive(Serialize)]
struct DisruptBody {
    #[serde(skip_serializing_if = "Option::is_none")]
    citations: Option<CitationBody>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lag: Option<LagReport>,
}

pub fn disrupt(ctx: &mut Ctx, args: &DisruptArgs) -> CliResult {
    let key: RankKey = parse_flag("key", &args.key)?;
    let years = args.years.as_deref().map(parse_years).transpose()?;
    if args.top == Some(0) {
        return usage("--top must be >= 1");
    }
    if args.bins == 0 {
        return usage("--bins must be >= 1");
    }
    if args.window.is_some_and(|w| w < 0) {
        return usage("--window must be >= 0");
    }
    let dopts = DOptions { window_years: args.window };
    let mut inputs = Vec::new();
    let mut body = DisruptBody { citations: None, lag: None };

    if let (Some(nodes), Some(edges)) = (&args.nodes, &args.edges) {
        let (nd, ed, g) = load_citations(nodes, edges, &LoadOptions::default())?;
        inputs.push(nd);
        inputs.push(ed);
        let all: BTreeMap<String, DScore> = if args.focal.is_empty() || args.top.is_some() {
            d_index_all(&g, &dopts)
        } else {
            BTreeMap::new()
        };
        let scores: Vec<DScore> = if args.focal.is_empty() {
            all.values().cloned().collect()
        } else {
            args.focal.iter().map(|f| d_index(&g, f, &dopts)).collect::<Result<_, _>>()?
        };
        let defined: Vec<f64> = scores.iter().filter(|s| s.defined).map(|s| s.d).collect();
        let mean_d = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
        ctx.say(format!(
            "{} papers, {} citations ({} duplicates removed); {} of {} scores defined{}",
            g.len(),
            g.edge_count(),
            g.duplicates_removed(),
            defined.len(),
            scores.len(),
            mean_d.map_or(String::new(), |m| format!(", mean D {m:.4}"))
        ));
        if !args.focal.is_empty() {
            for s in &scores {
                ctx.say(format!(
                    "{}  n_i {} n_j {} n_k {}  D {:.4}{}",
                    s.id,
                    s.n_i,
                    s.n_j,
                    s.n_k,
                    s.d,
                    if s.defined { "" } else { " (undefined)" }
                ));
            }
        }

        let top = match args.top {
            Some(k) => {
                let ids = rank_with(&g, key, k, years, Some(&all))?;
                let rows: Vec<Ranked> = ids
                    .iter()
                    .map(|id| {
                        let s = &all[id];
                        Ok(Ranked {
                            id: id.clone(),
                            citations: g.citation_count(id)?,
                            d: s.d,
                            defined: s.defined,
                        })
                    })
                    .collect::<Result<_, kgrowth::Error>>()?;
                ctx.say(format!("top {} by {}:", rows.len(), args.key));
                for (i, r) in rows.iter().enumerate() {
                    ctx.say(format!("{:>6}  {}  citations {}  D {:.4}", i + 1, r.id, r.citations, r.d));
                }
                if let Some(p) = &args.ids_out {
                    let mut text = String::new();
                    for id in &ids {
                        let _ = writeln!(text, "{id}");
                    }
                    write_atomic(p, text.as_bytes())?;
                }
                Some(rows)
            }
            None => None,
        };

        if let Some(p) = &args.scores {
            let mut text = String::from("id\tn_i\tn_j\tn_k\td\tdefined\n");
            for s in &scores {
                let _ = writeln!(text, "{}\t{}\t{}\t{}\t{}\t{}", s.id, s.n_i, s.n_j, s.n_k, s.d, s.defined);
            }
            write_atomic(p, text.as_bytes())?;
        }

        let width = 2.0 / args.bins as f64;
        let mut hist = vec![0usize; args.bins];
        for &d in &defined {
            hist[(((d + 1.0) / width) as usize).min(args.bins - 1)] += 1;
        }
        for (i, &c) in hist.iter().enumerate() {
            ctx.plot("d_hist", -1.0 + (i as f64 + 0.5) * width, c as f64);
        }

        body.citations = Some(CitationBody {
            papers: g.len(),
            edges: g.edge_count(),
            duplicates_removed: g.duplicates_removed(),
            window_years: args.window,
            defined: defined.len(),
            mean_d,
            scores,
            top,
        });
    }

    if let Some(path) = &args.lag {
        let (ds, yp) = load_year_pairs(path, &LoadOptions::default())?;
        inputs.push(ds);
        let r = inclusion_lag(&yp.pub_years, &yp.incl_years, yp.fields.as_deref())?;
        let o = &r.overall;
        ctx.say(format!(
            "inclusion lag over {} papers: mean {:.2} y, median {:.1} y, range {}..{}{}",
            o.n,
            o.mean_lag,
            o.median_lag,
            o.min_lag,
            o.max_lag,
            if o.negative > 0 { format!(", {} included before publication", o.negative) } else { String::new() }
        ));
        for (f, s) in &r.per_field {
            ctx.say(format!("  {f}: mean {:.2} y (n = {})", s.mean_lag, s.n));
        }
        for (&l, &c) in &o.histogram {
            ctx.plot("lag_hist", l, c as f64);
        }
        for (f, s) in &r.per_field {
            for (&l, &c) in &s.histogram {
                ctx.plot(&format!("lag_hist:{f}"), l, c as f64);
            }
        }
        for (name, ys) in [("publication_cumulative", &yp.pub_years), ("inclusion_cumulative", &yp.incl_years)] {
            let mut per_year: BTreeMap<i32, usize> = BTreeMap::new();
            for &y in ys {
                *per_year.entry(y).or_default() += 1;
            }
            let mut acc = 0;
            for (y, c) in per_year {
                acc += c;
                ctx.plot(name, y, acc as f64);
            }
        }
        body.lag = Some(r);
    }
    ctx.report(&Report::new("disrupt", inputs, body))
}

pub fn intersect(ctx: &mut Ctx, args: &IntersectArgs) -> CliResult {
    if args.percentiles.is_empty() {
        return usage("--percentiles must list at least one value");
    }
    if let Some(p) = args.percentiles.iter().find(|&&p| !(p > 0.0 && p <= 100.0)) {
        return usage(format!("percentile {p} outside (0, 100]"));
    }
    let opts = LoadOptions::default();
    let (da, a) = load_id_list(&args.a, &opts)?;
    let (db, b) = load_id_list(&args.b, &opts)?;
    let (dc, ctop) = load_id_list(&args.ctop, &opts)?;
    let a: BTreeSet<String> = a.into_iter().collect();
    let b: BTreeSet<String> = b.into_iter().collect();
    let rows: Vec<IntersectRow> = intersect_analysis(&a, &b, &ctop, &args.percentiles)?;

    ctx.say(format!("|a| = {}, |b| = {}, |ctop| = {}", a.len(), b.len(), ctop.len()));
    ctx.say(format!(
        "{:>8} {:>10} {:>8} {:>8} {:>10} {:>10} {:>10} {:>10}",
        "pct", "prefix", "a_hits", "b_hits", "a/|a|", "b/|b|", "a/prefix", "b/prefix"
    ));
    for r in &rows {
        ctx.say(format!(
            "{:>8} {:>10} {:>8} {:>8} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            r.percentile,
            r.prefix_len,
            r.a_hits,
            r.b_hits,
            r.a_frac_of_set,
            r.b_frac_of_set,
            r.a_frac_of_prefix,
            r.b_frac_of_prefix
        ));
        ctx.plot("a_frac_of_set", r.percentile, r.a_frac_of_set);
        ctx.plot("b_frac_of_set", r.percentile, r.b_frac_of_set);
        ctx.plot("a_frac_of_prefix", r.percentile, r.a_frac_of_prefix);
        ctx.plot("b_frac_of_prefix", r.percentile, r.b_frac_of_prefix);
    }
    ctx.report(&Report::new("intersect", vec![da, db, dc], rows))
}
