use kgrowth::growth_models::*;
use kgrowth::Month;
use proptest::prelude::*;

fn origin() -> Month {
    "2006-01".parse().unwrap()
}

/// ∫₂ˣ du/ln u as ∫ e^v/v dv over [ln 2, ln x], composite Simpson.
fn li_simpson(x: f64) -> f64 {
    let (a, b) = (2f64.ln(), x.ln());
    let n = 200_000;
    let h = (b - a) / n as f64;
    let f = |v: f64| v.exp() / v;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn model(family: Family, params: Vec<f64>) -> GrowthModel {
    GrowthModel::new(family, params, origin()).unwrap()
}

fn sample_params(family: Family, a: f64, s: f64, b: f64) -> Vec<f64> {
    match family {
        Family::Constant => vec![b],
        Family::Linear => vec![a, b],
        Family::Polynomial(d) => {
            let mut p = vec![b];
            p.extend((1..=d).map(|k| a / k as f64));
            p
        }
        Family::TLnT => vec![a, a / 2.0, b],
        Family::Exponential => vec![a / 100.0, b / 1000.0],
        Family::SubExponential => vec![a / 100.0, s, b / 1000.0],
        _ => vec![a, s, b],
    }
}

#[test]
fn li_matches_simpson() {
    for x in [10.0, 1e2, 1e3, 1e4, 1e5, 1e6] {
        let got = log_integral(x, 1e-12).unwrap();
        let want = li_simpson(x);
        assert!((got / want - 1.0).abs() <= 1e-9, "{x}: {got} vs {want}");
    }
    assert_eq!(log_integral(2.0, 1e-10).unwrap(), 0.0);
    assert!((log_integral(10.0, 1e-10).unwrap() - 5.12044).abs() < 1e-4);
    let r = log_integral(1e6, 1e-10).unwrap() / (1e6 / 1e6f64.ln());
    assert!(r > 1.0 && r < 1.2);
}

#[test]
fn li_domain_and_tolerance() {
    assert!(log_integral(1.9, 1e-9).is_err());
    assert!(log_integral(10.0, 1e-13).is_err());
    assert!(log_integral(10.0, 1e-2).is_err());
    assert!(li_paper_approx(2.9).is_err());
    let e2 = std::f64::consts::E.powi(2);
    assert!((li_paper_approx(e2).unwrap() - e2 / 2.0 * 2.25).abs() < 1e-12);
    assert!((li_paper_approx(1e6).unwrap() / log_integral(1e6, 1e-10).unwrap() - 1.0).abs() < 0.01);
}

#[test]
fn catalog_examples() {
    let cat = paper_catalog();
    assert_eq!(cat.len(), 6);
    let get = |n: &str| cat.iter().find(|e| e.name == n).unwrap().model.clone();
    assert_eq!(get("wag_articles").evaluate(10.0).unwrap(), 4100.0);
    assert!((get("wiki_categories").evaluate(205.0).unwrap() - 2_334_876.0).abs() < 1.0);
    assert_eq!(get("wiki_categories").evaluate_month("2023-01".parse().unwrap()).unwrap(), get("wiki_categories").evaluate(205.0).unwrap());
    assert!((get("mag_fields").evaluate(1.0).unwrap() - 144_612.0).abs() < 1e-6);
    let mi = get("wiki_articles_increment");
    assert!((mi.evaluate(5f64.exp() - 1.0).unwrap() - 28_000.0).abs() < 1e-6);
    let incl = get("wiki_inclusion");
    let t1 = 1.0 / 0.033;
    assert!((incl.evaluate(t1).unwrap() - 300_000.0).abs() < 1e-6);
    assert!((incl.increment(std::f64::consts::E / 0.033).unwrap() - 10_560.0).abs() < 1e-6);
    let log_papers = get("mag_papers_log");
    let ys: Vec<f64> = (1..200).map(|t| log_papers.evaluate(t as f64).unwrap().exp()).collect();
    assert!(ys[0] > 0.0 && ys.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn log_increment_at_e() {
    let mc = model(Family::Logarithmic, vec![2000.0, 0.0, 0.0]);
    assert!((mc.evaluate(std::f64::consts::E).unwrap() - 2000.0).abs() < 1e-9);
}

#[test]
fn arity_and_domain_errors() {
    assert!(GrowthModel::new(Family::Linear, vec![1.0], origin()).is_err());
    assert!(GrowthModel::new(Family::Polynomial(3), vec![1.0; 3], origin()).is_err());
    let m = model(Family::Linear, vec![1.0, 0.0]);
    assert!(m.evaluate(0.5).is_err());
    assert!(m.evaluate(f64::NAN).is_err());
    assert!(GrowthModel::new(Family::LogIntegral, vec![1.0, 0.0, 0.0], origin()).is_err());
    assert!(GrowthModel::new(Family::SubExponential, vec![1.0, 0.0, 0.0], origin()).is_err());
}

#[test]
fn subexponential_slower_than_exponential() {
    let t0: f64 = 50.0;
    let sub = model(Family::SubExponential, vec![0.2, 1.0, 1.0]);
    // match log-value and log-slope of an exponential at t0
    let g = |t: f64| 0.2 * t / (t + 1.0).ln() + 1.0;
    let u = t0 + 1.0;
    let slope = 0.2 * (u.ln() - t0 / u) / u.ln().powi(2);
    let exp = model(Family::Exponential, vec![slope, g(t0) - slope * t0]);
    assert!((exp.evaluate(t0).unwrap() / sub.evaluate(t0).unwrap() - 1.0).abs() < 1e-12);
    assert!(sub.evaluate(2.0 * t0).unwrap() < exp.evaluate(2.0 * t0).unwrap());
}

fn family() -> impl Strategy<Value = Family> {
    (0..Family::ALL.len()).prop_map(|i| Family::ALL[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn increasing_with_positive_lead(f in family(), a in 0.5f64..50.0, s in 2.0f64..50.0, b in -100.0f64..100.0) {
        prop_assume!(!matches!(f, Family::Constant | Family::ReciprocalLog));
        let m = model(f, sample_params(f, a, s, b));
        let mut prev = m.evaluate(1.0).unwrap();
        for t in 2..=240 {
            let v = m.evaluate(t as f64).unwrap();
            prop_assert!(v > prev, "{f} at t = {t}");
            prev = v;
        }
    }

    #[test]
    fn increment_matches_difference(f in family(), a in 0.5f64..50.0, s in 2.0f64..50.0, b in -100.0f64..100.0, t in 24.0f64..400.0) {
        prop_assume!(f != Family::Constant);
        let m = model(f, sample_params(f, a, s, b));
        let inc = m.increment(t).unwrap();
        let diff = m.evaluate(t + 1.0).unwrap() - m.evaluate(t).unwrap();
        prop_assert!((inc / diff - 1.0).abs() < 0.01, "{f}: {inc} vs {diff}");
    }

    #[test]
    fn json_round_trip(f in family(), a in 0.5f64..50.0, s in 2.0f64..50.0, b in -100.0f64..100.0, k in 0u32..400) {
        let m = GrowthModel::new(f, sample_params(f, a, s, b), origin().add_months(k as i64)).unwrap();
        let back = GrowthModel::from_json(&m.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn li_strictly_increasing(x in 2.0f64..1e6, dx in 1e-3f64..1e3) {
        prop_assert!(log_integral(x + dx, 1e-10).unwrap() > log_integral(x, 1e-10).unwrap());
    }
}
