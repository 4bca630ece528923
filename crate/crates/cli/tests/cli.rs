use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kgrowth"));
    c.env_remove("KGROWTH_CACHE_DIR");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = run(dir, args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}\n{}",
        String::from_utf8_lossy(&o.stderr),
        String::from_utf8_lossy(&o.stdout)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const ARTICLES: &str = "date,value
2021-05,6304698
2021-07,6347547
2021-08,6368943
2021-09,6390319
2021-10,6411676
2021-11,6433014
2021-12,6454334
2022-01,6475635
2022-02,6496917
";

#[test]
fn fit_nine_month_fixture() {
    let d = TempDir::new().unwrap();
    write(&d, "articles.csv", ARTICLES);
    let o = run(d.path(), &["fit", "--input", "articles.csv", "--family", "auto"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2021-06"));

    ok(d.path(), &["fit", "--input", "articles.csv", "--family", "auto", "--allow-gaps", "--json", "fit.json", "--plot-csv", "fit.csv"]);
    let r = json(&d.path().join("fit.json"));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["kind"], "fit");
    let fam = r["body"]["fit"]["model"]["family"].as_str().unwrap().to_string();
    assert!(["Linear", "TOverLnT", "LogIntegral", "TLnT", "ShiftedTLnT"].contains(&fam.as_str()), "{fam}");
    assert!(r["body"]["fit"]["mape"].as_f64().unwrap() <= 0.002);
    assert_eq!(r["body"]["ranking"].as_array().unwrap().len(), 5);
    assert_eq!(r["inputs"][0]["kind"], "series");
    let csv = fs::read_to_string(d.path().join("fit.csv")).unwrap();
    assert!(csv.starts_with("series,x,y\n"));
    assert!(csv.contains("observed,2021-05,6304698"));
    assert!(csv.contains("\nfitted,2021-06,"));

    let out = ok(d.path(), &["forecast", "--fit", "fit.json", "--until", "2026-01", "--json", "fc.json"]);
    assert!(out.contains("2026-01"));
    let pts = json(&d.path().join("fc.json"))["body"]["points"].as_array().unwrap().clone();
    assert_eq!(pts.first().unwrap()["month"], "2022-03");
    for (m, want) in [("2023-01", 6_729_834.0), ("2024-01", 6_981_559.0), ("2025-01", 7_230_982.0), ("2026-01", 7_478_255.0)] {
        let v = pts.iter().find(|p| p["month"] == m).unwrap()["value"].as_f64().unwrap();
        assert!((v / want - 1.0).abs() < 0.005, "{m}: {v}");
    }
}

#[test]
fn catalog_forecast() {
    let d = TempDir::new().unwrap();
    let out = ok(d.path(), &["forecast", "--list-models"]);
    assert_eq!(out.lines().count(), 6);
    ok(d.path(), &["forecast", "--model", "wiki_categories", "--from", "2023-01", "--until", "2026-01", "--plot-csv", "c.csv"]);
    let csv = fs::read_to_string(d.path().join("c.csv")).unwrap();
    let v: f64 = csv.lines().find(|l| l.starts_with("forecast,2025-01,")).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(v.round(), 2_643_672.0);
    let o = run(d.path(), &["forecast", "--model", "nope", "--until", "2026-01"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(d.path(), &["forecast", "--model", "wag_articles"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let d = TempDir::new().unwrap();
    for args in [
        vec!["bogus"],
        vec!["fit", "--bogus-flag"],
        vec!["fit", "--input", "x.csv", "--from", "2020-13"],
        vec!["metrics", "--input", "e.tsv", "--quantile", "0"],
        vec!["ba", "--nodes", "3", "--m", "3"],
        vec!["intersect", "--a", "a", "--b", "b", "--ctop", "c", "--percentiles", "0"],
        vec!["distfit", "--family", "gamma", "--input", "s.txt"],
        vec!["disrupt", "--nodes", "n.tsv", "--edges", "e.tsv", "--years", "2010"],
        vec!["taxonomy", "--input", "c.tsv"],
    ] {
        assert_eq!(run(d.path(), &args).status.code(), Some(2), "{args:?}");
    }
    // flags validated before inputs are read: the files above do not exist
}

#[test]
fn data_errors_exit_1_with_location() {
    let d = TempDir::new().unwrap();
    write(&d, "bad.tsv", "a\tb\nonly-one-field\n");
    let o = run(d.path(), &["metrics", "--input", "bad.tsv"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.tsv:2:"), "{err}");
    let o = run(d.path(), &["metrics", "--input", "missing.tsv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ba_is_deterministic() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["ba", "--nodes", "100", "--m", "2", "--seed", "7", "--output", "a.tsv", "--json", "ba.json"]);
    ok(d.path(), &["ba", "--nodes", "100", "--m", "2", "--seed", "7", "--output", "b.tsv"]);
    let a = fs::read(d.path().join("a.tsv")).unwrap();
    assert_eq!(a, fs::read(d.path().join("b.tsv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 197);
    ok(d.path(), &["ba", "--nodes", "100", "--m", "2", "--seed", "8", "--output", "c.tsv"]);
    assert_ne!(fs::read(d.path().join("a.tsv")).unwrap(), fs::read(d.path().join("c.tsv")).unwrap());
    let r = json(&d.path().join("ba.json"));
    assert_eq!(r["body"]["edges"], 197);
    assert_eq!(r["body"]["compare"]["rows"].as_array().unwrap().len(), 4);

    let m = ok(d.path(), &["metrics", "--input", "a.tsv", "--sources", "1000", "--undirected", "--json", "m.json"]);
    assert!(m.contains("N = 100, E = 197"));
    let r = json(&d.path().join("m.json"));
    assert_eq!(r["body"][0]["arcs"], 197);
}

#[test]
fn metrics_cache_and_plot() {
    let d = TempDir::new().unwrap();
    write(&d, "e1.tsv", "a\tb\nb\tc\nc\ta\na\tb\n");
    write(&d, "e2.tsv", "c\ta\nb\tc\na\tb\n");
    let cache = d.path().join("cache");
    let go = |file: &str, json_out: &str| {
        let o = bin()
            .current_dir(d.path())
            .env("KGROWTH_CACHE_DIR", &cache)
            .args(["metrics", "--input", file, "--sources", "10", "--json", json_out, "--plot-csv", "p.csv"])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    go("e1.tsv", "m1.json");
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
    go("e2.tsv", "m2.json");
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
    let (a, b) = (json(&d.path().join("m1.json")), json(&d.path().join("m2.json")));
    assert_eq!(a["body"][0]["density"], 0.5);
    assert_eq!(a["body"][0]["effective_diameter"], b["body"][0]["effective_diameter"]);
    assert_eq!(a["inputs"][0]["duplicates"], 1);
    let csv = fs::read_to_string(d.path().join("p.csv")).unwrap();
    assert!(csv.contains("degree_hist:e2,2,3"));
    assert!(csv.contains("density,3,0.5"));
}

#[test]
fn disrupt_and_intersect() {
    let d = TempDir::new().unwrap();
    write(&d, "n.tsv", "F\t2000\tphys\nR\t1990\nA\t2001\nB\t2002\nC\t2003\nE\t2004\n");
    write(&d, "e.tsv", "F\tR\nA\tF\nB\tF\nC\tF\nC\tR\nE\tR\n");
    let out = ok(d.path(), &["disrupt", "--nodes", "n.tsv", "--edges", "e.tsv", "--focal", "F"]);
    assert!(out.contains("F  n_i 2 n_j 1 n_k 1  D 0.2500"), "{out}");
    ok(d.path(), &[
        "disrupt", "--nodes", "n.tsv", "--edges", "e.tsv", "--top", "2", "--key", "citations",
        "--ids-out", "ctop.txt", "--scores", "s.tsv", "--json", "d.json", "--plot-csv", "d.csv",
    ]);
    assert_eq!(fs::read_to_string(d.path().join("ctop.txt")).unwrap(), "F\nR\n");
    assert_eq!(fs::read_to_string(d.path().join("s.tsv")).unwrap().lines().count(), 7);
    let r = json(&d.path().join("d.json"));
    assert_eq!(r["body"]["citations"]["top"][0]["citations"], 3);
    assert!(fs::read_to_string(d.path().join("d.csv")).unwrap().contains("d_hist,"));

    write(&d, "a.txt", "F\n");
    write(&d, "b.txt", "Z\nR\n");
    let out = ok(d.path(), &["intersect", "--a", "a.txt", "--b", "b.txt", "--ctop", "ctop.txt", "--percentiles", "50,100", "--json", "i.json"]);
    assert!(out.contains("|a| = 1"));
    let rows = json(&d.path().join("i.json"))["body"].as_array().unwrap().clone();
    assert_eq!(rows[0]["a_frac_of_set"], 1.0);
    assert_eq!(rows[0]["b_hits"], 0);
    assert_eq!(rows[1]["b_frac_of_set"], 0.5);

    write(&d, "lag.tsv", "2000\t2003\tm\n2000\t2008\tm\n2000\t2013\tp\n");
    let out = ok(d.path(), &["disrupt", "--lag", "lag.tsv", "--plot-csv", "l.csv"]);
    assert!(out.contains("mean 8.00 y"), "{out}");
    let csv = fs::read_to_string(d.path().join("l.csv")).unwrap();
    assert!(csv.contains("inclusion_cumulative,2013,3"));
}

#[test]
fn taxonomy_and_distfit() {
    let d = TempDir::new().unwrap();
    write(&d, "c.tsv", "Physics\tMathematics\tcategory\nMathematics\tPhysics\tcategory\nAlgebra\tMathematics\tcategory\nPi\tMathematics\tarticle\nRing\tAlgebra\tarticle\n");
    let out = ok(d.path(), &["taxonomy", "--input", "c.tsv", "--roots", "Physics", "--depth", "3", "--cycles", "--json", "t.json"]);
    assert!(out.contains("Physics → Mathematics"), "{out}");
    let r = json(&d.path().join("t.json"));
    assert_eq!(r["body"]["members"]["articles"], 2);
    assert_eq!(r["body"]["members"]["categories"], 3);
    let o = run(d.path(), &["taxonomy", "--input", "c.tsv", "--preset", "core"]);
    assert_eq!(o.status.code(), Some(1), "roots missing from the fixture");
    let o = run(d.path(), &["taxonomy", "--input", "c.tsv", "--preset", "nope"]);
    assert_eq!(o.status.code(), Some(2));

    let samples: String = (1..=400).map(|i| format!("{}\n", (i as f64 / 40.0).exp().round() + 1.0)).collect();
    write(&d, "s.txt", &samples);
    let out = ok(d.path(), &["distfit", "--family", "lognormal", "--input", "s.txt", "--plot-csv", "s.csv"]);
    assert!(out.starts_with("lognormal: mu"));
    assert!(fs::read_to_string(d.path().join("s.csv")).unwrap().contains("fitted_density,"));
    ok(d.path(), &["ba", "--nodes", "3000", "--m", "3", "--no-compare", "--output", "g.tsv"]);
    let out = ok(d.path(), &["distfit", "--family", "powerlaw", "--edges", "g.tsv", "--json", "p.json"]);
    assert!(out.starts_with("power law: exponent"));
    let e = json(&d.path().join("p.json"))["body"]["exponent"].as_f64().unwrap();
    assert!(e > 2.3 && e < 3.7, "{e}");
}

#[test]
fn segment_command() {
    let d = TempDir::new().unwrap();
    let mut text = String::from("date,value\n");
    for t in 1..=60 {
        let v = if t < 30 { 100.0 } else { 180.0 };
        text.push_str(&format!("{}-{:02},{v}\n", 2000 + (t - 1) / 12, (t - 1) % 12 + 1));
    }
    write(&d, "s.csv", &text);
    let out = ok(d.path(), &["segment", "--input", "s.csv", "--early", "Constant", "--late", "Constant", "--json", "g.json", "--plot-csv", "g.csv"]);
    assert!(out.contains("break at 2002-06"), "{out}");
    assert_eq!(json(&d.path().join("g.json"))["body"]["break_index"], 29);
    assert!(fs::read_to_string(d.path().join("g.csv")).unwrap().contains("late_fit,2002-06,"));
}

#[test]
fn help_lists_formats() {
    let d = TempDir::new().unwrap();
    for (cmd, needle) in [
        ("fit", "date,value"),
        ("metrics", "src<TAB>dst"),
        ("disrupt", "id<TAB>year"),
        ("taxonomy", "child<TAB>parent<TAB>kind"),
        ("distfit", "one positive number per line"),
        ("intersect", "one id per line"),
    ] {
        let out = ok(d.path(), &[cmd, "--help"]);
        assert!(out.contains(needle), "{cmd}: {out}");
        assert!(out.contains("--plot-csv"));
    }
}
