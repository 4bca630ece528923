//! Named growth laws reported for Wikipedia and MAG.

use serde::Serialize;

use super::{Family, GrowthModel};
use crate::calendar::Month;

/// A named model together with a short description of what it counts.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub model: GrowthModel,
}

fn month(s: &str) -> Month {
    s.parse().expect("catalog origin is a valid month")
}

fn entry(
    name: &'static str,
    description: &'static str,
    family: Family,
    params: Vec<f64>,
    origin: &str,
) -> CatalogEntry {
    CatalogEntry {
        name,
        description,
        model: GrowthModel::new(family, params, month(origin)).expect("catalog params are valid"),
    }
}

/// The six reference growth laws.
///
/// Origins fix which calendar month is `t = 1`. `wiki_categories` is
/// calibrated so that `t = 205` is 2023-01; `wag_articles` counts months
/// since 2007-01. The remaining origins are not stated with the formulas and
/// are conventions of this catalog.
pub fn paper_catalog() -> Vec<CatalogEntry> {
    let c: f64 = 0.033;
    let incl_scale = 160_000.0 * c;
    vec![
        entry(
            "wiki_articles_increment",
            "monthly new Wikipedia articles, 140000/ln(t+1)",
            Family::ReciprocalLog,
            vec![140_000.0, 1.0, 0.0],
            "2006-01",
        ),
        entry(
            "wiki_categories",
            "Wikipedia categories, 2000(t+12)ln(t+12)",
            Family::ShiftedTLnT,
            vec![2000.0, 12.0, 0.0],
            "2006-01",
        ),
        entry(
            "wag_articles",
            "academic-group articles, 30t + 3800",
            Family::Linear,
            vec![30.0, 3800.0],
            "2007-02",
        ),
        entry(
            "mag_fields",
            "MAG fields of study, a·t·ln t − a·t + b",
            Family::TLnT,
            vec![2467.0, -2467.0, 147_079.0],
            "2000-01",
        ),
        entry(
            "mag_papers_log",
            "natural log of MAG paper count, 0.4·u/ln u + 19.53 with u = t + 2",
            Family::TOverLnT,
            vec![0.4, 2.0, 19.53],
            "2000-01",
        ),
        entry(
            "wiki_inclusion",
            "papers cited by Wikipedia, 160000(ct)ln(ct) + 300000 with c = 0.033",
            Family::TLnT,
            vec![incl_scale, incl_scale * c.ln(), 300_000.0],
            "2001-01",
        ),
    ]
}
