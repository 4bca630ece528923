use std::fs;
use std::path::{Path, PathBuf};

use kgrowth::ingest_store::*;
use kgrowth::model_fit::{fit, FitOptions, FitResult};
use kgrowth::{Error, Family};
use proptest::prelude::*;
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn opts() -> LoadOptions {
    LoadOptions::default()
}

#[test]
fn series_rows() {
    let d = TempDir::new().unwrap();
    let p = write(&d, "a.csv", "date,value\n2021-01,10\n2021-02,11\n2021-03,12.5\n");
    let (ds, s) = load_series(&p, &opts()).unwrap();
    assert_eq!(s.len(), 3);
    assert_eq!(ds.rows, 3);
    assert_eq!(s.values(), &[10.0, 11.0, 12.5]);
    assert_eq!(s.origin().to_string(), "2021-01");
    assert_eq!(s.label(), "a");

    let p = write(&d, "b.csv", "2021-01,10\n2021-02,11\n");
    assert_eq!(load_series(&p, &opts()).unwrap().1.len(), 2);
}

#[test]
fn series_gap_names_month() {
    let d = TempDir::new().unwrap();
    let p = write(&d, "gap.csv", "date,value\n2021-05,1\n2021-07,2\n2021-08,3\n");
    let err = load_series(&p, &opts()).unwrap_err().to_string();
    assert!(err.contains("missing month 2021-06"), "{err}");
    let (_, obs) = load_observations(&p, &opts()).unwrap();
    assert_eq!(obs.len(), 3);
}

#[test]
fn malformed_rows_and_budget() {
    let d = TempDir::new().unwrap();
    let p = write(&d, "bad.csv", "date,value\n2021-01,10\n2021-13,11\n2021-02,x\n2021-03,12\n");
    match load_series(&p, &opts()).unwrap_err() {
        Error::Parse { line, .. } => assert_eq!(line, 3),
        e => panic!("unexpected {e}"),
    }
    let r = load_observations(&p, &LoadOptions { error_budget: 1 });
    assert!(matches!(r, Err(Error::Parse { line: 4, .. })));
    let (ds, obs) = load_observations(&p, &LoadOptions { error_budget: 2 }).unwrap();
    assert_eq!(obs.len(), 2);
    assert_eq!(ds.warnings.len(), 2);
    assert!(matches!(load_series(&d.path().join("none.csv"), &opts()), Err(Error::Io { .. })));
}

#[test]
fn edge_list_dedup() {
    let d = TempDir::new().unwrap();
    let p = write(&d, "e.tsv", "# comment\na\tb\nb\tc\na\tb\n\nc\ta\n");
    let (ds, g) = load_edge_list(&p, &opts()).unwrap();
    assert_eq!(g.arc_count(), 3);
    assert_eq!(ds.duplicates, 1);
    assert_eq!(ds.warnings.len(), 1);
    assert_eq!(g.node_count(), 3);
    assert_eq!(g.labels().unwrap(), ["a", "b", "c"]);
    let p = write(&d, "bad.tsv", "a\tb\nc\n");
    assert!(matches!(load_edge_list(&p, &opts()), Err(Error::Parse { line: 2, .. })));
}

#[test]
fn other_formats() {
    let d = TempDir::new().unwrap();
    let nodes = write(&d, "n.tsv", "p1\t2000\tmath\np2\t2001\np3\t2005\tphys\n");
    let edges = write(&d, "c.tsv", "p2\tp1\np3\tp1\np3\tp2\np3\tp1\n");
    let (nd, ed, g) = load_citations(&nodes, &edges, &opts()).unwrap();
    assert_eq!((nd.rows, g.len(), g.edge_count(), ed.duplicates), (3, 3, 3, 1));
    assert_eq!(g.paper("p1").unwrap().field.as_deref(), Some("math"));
    let bad = write(&d, "c2.tsv", "p2\tp9\n");
    assert!(matches!(load_citations(&nodes, &bad, &opts()), Err(Error::Parse { line: 1, .. })));
    let badyear = write(&d, "n2.tsv", "p1\t1800\n");
    assert!(load_citations(&badyear, &edges, &opts()).is_err());

    let cats = write(&d, "cat.tsv", "Physics\tMathematics\tcategory\nMathematics\tPhysics\tcategory\nPi\tMathematics\tarticle\n");
    let (_, cg) = load_categories(&cats, &opts()).unwrap();
    assert_eq!(cg.detect_cycles().len(), 1);
    let cats = write(&d, "cat2.tsv", "Pi\tMathematics\tthing\n");
    assert!(matches!(load_categories(&cats, &opts()), Err(Error::Parse { line: 1, .. })));

    let s = write(&d, "s.txt", "10\n20\n\n30\n");
    assert_eq!(load_samples(&s, &opts()).unwrap().1, vec![10.0, 20.0, 30.0]);
    let s = write(&d, "s2.txt", "10\n0\n");
    assert!(matches!(load_samples(&s, &opts()), Err(Error::Parse { line: 2, .. })));

    let ids = write(&d, "ids.txt", "b\na\nb\n");
    let (ds, v) = load_id_list(&ids, &opts()).unwrap();
    assert_eq!(v, ["b", "a"]);
    assert_eq!(ds.duplicates, 1);

    let yp = write(&d, "y.tsv", "2000\t2003\tm\n2000\t2013\tp\n");
    let (_, y) = load_year_pairs(&yp, &opts()).unwrap();
    assert_eq!(y.incl_years, [2003, 2013]);
    assert_eq!(y.fields.unwrap(), ["m", "p"]);
}

fn fit_fixture(dir: &TempDir) -> (PathBuf, Dataset, FitResult) {
    let text: String = std::iter::once("date,value\n".to_string())
        .chain((0..24).map(|i| format!("{}-{:02},{}\n", 2020 + i / 12, i % 12 + 1, 100.0 + 7.5 * i as f64)))
        .collect();
    let p = write(dir, "series.csv", &text);
    let (ds, s) = load_series(&p, &opts()).unwrap();
    let r = fit(&s, Family::Linear, &FitOptions::default()).unwrap();
    (p, ds, r)
}

#[test]
fn report_round_trip() {
    let d = TempDir::new().unwrap();
    let (_, ds, r) = fit_fixture(&d);
    let rep = Report::new("fit", vec![ds], r.clone());
    let out = d.path().join("fit.json");
    save_report(&rep, &out).unwrap();
    let back: Report<FitResult> = load_report(&out).unwrap();
    assert_eq!(back, rep);
    assert_eq!(back.body, r);
    assert_eq!(back.tool_version, TOOL_VERSION);
    verify_inputs(&back).unwrap();
}

#[test]
fn tampered_input_detected() {
    let d = TempDir::new().unwrap();
    let (p, ds, r) = fit_fixture(&d);
    let rep = Report::new("fit", vec![ds], r);
    let mut text = fs::read_to_string(&p).unwrap();
    text.push_str("2022-01,999\n");
    fs::write(&p, text).unwrap();
    let err = verify_inputs(&rep).unwrap_err().to_string();
    assert!(err.contains("digest mismatch"), "{err}");
}

#[test]
fn unversioned_report_rejected() {
    let d = TempDir::new().unwrap();
    let (_, ds, r) = fit_fixture(&d);
    let mut v = serde_json::to_value(Report::new("fit", vec![ds], r)).unwrap();
    v.as_object_mut().unwrap().remove("schema_version");
    let p = write(&d, "r.json", &v.to_string());
    assert!(matches!(load_report::<FitResult>(&p), Err(Error::Schema { .. })));
    v["schema_version"] = 1.into();
    v.as_object_mut().unwrap().remove("tool_version");
    let p = write(&d, "r2.json", &v.to_string());
    assert!(matches!(load_report::<FitResult>(&p), Err(Error::Schema { .. })));
}

#[test]
fn cache_behaviour() {
    let d = TempDir::new().unwrap();
    let cache = Cache::new(d.path().join("cache")).unwrap();
    let e1 = write(&d, "one.tsv", "a\tb\nb\tc\n");
    let e2 = write(&d, "two.tsv", "b\tc\na\tb\na\tb\n");
    let (d1, _) = load_edge_list(&e1, &opts()).unwrap();
    let (d2, _) = load_edge_list(&e2, &opts()).unwrap();
    assert_eq!(d1.digest, d2.digest);

    let k1 = CacheKey::new(&[&d1.digest], "metrics", &(200, 0u64)).unwrap();
    assert!(cache.get(&k1).is_none());
    let payload = b"{\"density\": 0.25}\n";
    cache.put(&k1, payload).unwrap();
    assert_eq!(cache.get(&k1).unwrap(), payload);

    let k2 = CacheKey::new(&[&d2.digest], "metrics", &(200, 0u64)).unwrap();
    assert_eq!(cache.get(&k2).unwrap(), payload);
    let k3 = CacheKey::new(&[&d1.digest], "metrics", &(100, 0u64)).unwrap();
    assert!(cache.get(&k3).is_none());

    let entry = cache.dir().join(format!("{}.entry", k1.as_str()));
    let mut bytes = fs::read(&entry).unwrap();
    *bytes.last_mut().unwrap() ^= 1;
    fs::write(&entry, bytes).unwrap();
    assert!(cache.get(&k1).is_none());
    fs::write(&entry, "garbage").unwrap();
    assert!(cache.get(&k1).is_none());
}

fn edge_text(edges: &[(u8, u8)]) -> String {
    edges.iter().map(|(a, b)| format!("n{a}\tn{b}\n")).collect()
}

fn digest_of(dir: &Path, name: &str, text: &str, kind: DatasetKind) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    digest_file(&p, kind).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_idempotent(edges in prop::collection::vec((0u8..20, 0u8..20), 1..60)) {
        let d = TempDir::new().unwrap();
        let p = write(&d, "e.tsv", &edge_text(&edges));
        let (_, g) = load_edge_list(&p, &opts()).unwrap();
        let once = graph_edge_text(&g);
        prop_assert_eq!(&once, &canonical_edge_text(&edge_text(&edges)));
        let p2 = write(&d, "e2.tsv", &once);
        let (_, g2) = load_edge_list(&p2, &opts()).unwrap();
        prop_assert_eq!(graph_edge_text(&g2), once);
    }

    #[test]
    fn digest_order_rules(edges in prop::collection::vec((0u8..20, 0u8..20), 2..40), rot in 1usize..40) {
        let d = TempDir::new().unwrap();
        let mut shuffled = edges.clone();
        let r = rot % shuffled.len();
        shuffled.rotate_left(r);
        prop_assert_eq!(
            digest_of(d.path(), "a", &edge_text(&edges), DatasetKind::EdgeList),
            digest_of(d.path(), "b", &edge_text(&shuffled), DatasetKind::EdgeList)
        );
        let series = |v: &[(u8, u8)]| -> String {
            v.iter().enumerate().map(|(i, (a, b))| format!("2000-{:02},{}\n", i % 12 + 1, *a as u32 * 100 + *b as u32)).collect()
        };
        if edge_text(&edges) != edge_text(&shuffled) {
            prop_assert_ne!(
                digest_of(d.path(), "c", &series(&edges), DatasetKind::Series),
                digest_of(d.path(), "d", &series(&shuffled), DatasetKind::Series)
            );
        }
    }
}
