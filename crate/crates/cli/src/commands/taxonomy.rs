use std::collections::BTreeMap;

use kgrowth::ingest_store::{load_categories, LoadOptions, Report};
use kgrowth::taxonomy::{builtin_presets, load_presets, MemberCounts};
use serde::Serialize;

use crate::args::TaxonomyArgs;
use crate::output::{usage, CliResult, Ctx};

#[derive(Serialize)]
struct Body {
    nodes: usize,
    edges: usize,
    categories: usize,
    roots: Vec<String>,
    depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    members: Option<MemberCounts>,
    /// Categories per level below the roots.
    levels: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycles: Option<Vec<Vec<String>>>,
}

pub fn taxonomy(ctx: &mut Ctx, args: &TaxonomyArgs) -> CliResult {
    let roots: Vec<String> = match &args.preset {
        Some(name) => {
            let presets = match &args.presets_file {
                Some(p) => load_presets(p)?,
                None => builtin_presets(),
            };
            match presets.get(name) {
                Ok(r) => r.to_vec(),
                Err(e) => return usage(e.to_string()),
            }
        }
        None => args.roots.iter().map(|r| r.trim().to_string()).filter(|r| !r.is_empty()).collect(),
    };
    if roots.is_empty() && !args.cycles {
        return usage("give --roots, --preset or --cycles");
    }

    let (ds, g) = load_categories(&args.input, &LoadOptions { error_budget: args.error_budget })?;
    ctx.say(format!("{} nodes ({} categories), {} edges", g.len(), g.category_count(), g.edge_count()));

    let mut levels = BTreeMap::new();
    let members = if roots.is_empty() {
        None
    } else {
        for (_, l) in g.descendant_levels(&roots, args.depth)? {
            *levels.entry(l).or_default() += 1;
        }
        let m = g.count_members(&roots, args.depth)?;
        ctx.say(format!(
            "roots {}: depth {} → {} categories, {} distinct articles",
            roots.join(", "),
            args.depth,
            m.categories,
            m.articles
        ));
        for (&l, &c) in &levels {
            ctx.plot("categories_per_level", l, c as f64);
        }
        Some(m)
    };

    let cycles = args.cycles.then(|| g.detect_cycles());
    if let Some(cs) = &cycles {
        ctx.say(format!("{} cycles", cs.len()));
        for c in cs {
            ctx.say(format!("  {}", c.join(" → ")));
        }
    }
    ctx.report(&Report::new(
        "taxonomy",
        vec![ds],
        Body {
            nodes: g.len(),
            edges: g.edge_count(),
            categories: g.category_count(),
            roots,
            depth: args.depth,
            members,
            levels,
            cycles,
        },
    ))
}
