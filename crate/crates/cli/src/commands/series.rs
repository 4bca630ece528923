use kgrowth::growth_models::paper_catalog;
use kgrowth::ingest_store::{load_observations, load_report, load_series, Dataset, LoadOptions, Report};
use kgrowth::model_fit::{
    fitted_curve, forecast as extrapolate, segment_break, select_observations, FitOptions, FitResult,
    Observations, TimeSeries,
};
use kgrowth::{Family, GrowthModel, Month};
use serde::{Deserialize, Serialize};

use crate::args::{FitArgs, ForecastArgs, SegmentArgs, SeriesInput};
use crate::output::{parse_flag, parse_opt, usage, CliResult, Ctx};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankRow {
    pub family: Family,
    pub mape: f64,
    pub rmse: f64,
    pub converged: bool,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Point {
    pub month: Month,
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitBody {
    pub fit: FitResult,
    pub ranking: Vec<RankRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forecast: Vec<Point>,
}

fn families(args: &FitArgs) -> CliResult<Vec<Family>> {
    if !args.families.is_empty() {
        return args.families.iter().map(|f| parse_flag("families", f.trim())).collect();
    }
    Ok(match args.family.as_str() {
        "auto" => Family::QUASI_LINEAR.to_vec(),
        "all" => Family::ALL.to_vec(),
        f => vec![parse_flag("family", f)?],
    })
}

struct Window {
    from: Option<Month>,
    to: Option<Month>,
}

fn window(s: &SeriesInput) -> CliResult<Window> {
    let w = Window {
        from: parse_opt("from", s.from.as_ref())?,
        to: parse_opt("to", s.to.as_ref())?,
    };
    if let (Some(a), Some(b)) = (w.from, w.to) {
        if b < a {
            return usage(format!("--to {b} is before --from {a}"));
        }
    }
    Ok(w)
}

fn in_window(w: &Window, m: Month) -> bool {
    w.from.is_none_or(|f| m >= f) && w.to.is_none_or(|t| m <= t)
}

fn load_obs(s: &SeriesInput, w: &Window) -> CliResult<(Dataset, Observations)> {
    let opts = LoadOptions { error_budget: s.error_budget };
    let (ds, obs) = if s.allow_gaps {
        load_observations(&s.input, &opts)?
    } else {
        let (ds, ts) = load_series(&s.input, &opts)?;
        (ds, ts.observations())
    };
    let points: Vec<(Month, f64)> = obs.points().iter().copied().filter(|&(m, _)| in_window(w, m)).collect();
    Ok((ds, Observations::new(points, obs.label())?))
}

fn load_ts(s: &SeriesInput, w: &Window) -> CliResult<(Dataset, TimeSeries)> {
    if s.allow_gaps {
        return usage("--allow-gaps is not supported here; the series must be gap-free");
    }
    let (ds, ts) = load_series(&s.input, &LoadOptions { error_budget: s.error_budget })?;
    let idx: Vec<usize> = ts.months().enumerate().filter(|&(_, m)| in_window(w, m)).map(|(i, _)| i).collect();
    let (Some(&a), Some(&b)) = (idx.first(), idx.last()) else {
        return Err(kgrowth::Error::InsufficientData("no observations inside the window".into()).into());
    };
    Ok((ds, ts.slice(a, b + 1)?))
}

fn points(model: &GrowthModel, from: Month, until: Month, increment: bool) -> CliResult<Vec<Point>> {
    let n = from.months_until(until);
    (0..=n)
        .map(|i| {
            let month = from.add_months(i);
            let t = month.index_from(model.t_origin());
            let value = if increment { model.increment(t)? } else { model.evaluate(t)? };
            Ok(Point { month, t, value })
        })
        .collect()
}

pub fn fit(ctx: &mut Ctx, args: &FitArgs) -> CliResult {
    let fams = families(args)?;
    let w = window(&args.series)?;
    let origin: Option<Month> = parse_opt("origin", args.origin.as_ref())?;
    let until: Option<Month> = parse_opt("until", args.until.as_ref())?;
    if args.max_iter == 0 {
        return usage("--max-iter must be >= 1");
    }

    let (ds, obs) = load_obs(&args.series, &w)?;
    let opts = FitOptions {
        max_iter: args.max_iter,
        seed: ctx.seed,
        bounds: None,
        t_origin: origin,
    };
    let ranked = select_observations(&obs, &fams, &opts)?;
    let best = ranked[0].clone();
    let forecast = match until {
        Some(u) => extrapolate(&best, u)?
            .iter()
            .map(|(month, value)| Point { month, t: month.index_from(best.model.t_origin()), value })
            .collect(),
        None => Vec::new(),
    };

    ctx.say(format!("{} observations, {} .. {}", obs.len(), obs.first(), obs.last()));
    ctx.say(format!("{:<16} {:>12} {:>14}  params", "family", "mape", "rmse"));
    for r in &ranked {
        ctx.say(format!(
            "{:<16} {:>12.3e} {:>14.6e}  {:?}{}",
            r.model.family().to_string(),
            r.mape,
            r.rmse,
            r.model.params(),
            if r.converged { "" } else { "  (not converged)" }
        ));
    }
    ctx.say(format!("best: {} (origin {})", best.model.family(), best.model.t_origin()));
    for p in &forecast {
        ctx.say(format!("forecast {} {:.1}", p.month, p.value));
    }

    for &(m, v) in obs.points() {
        ctx.plot("observed", m, v);
    }
    for (m, v) in fitted_curve(&best)? {
        ctx.plot("fitted", m, v);
    }
    for p in &forecast {
        ctx.plot("forecast", p.month, p.value);
    }

    let ranking = ranked
        .iter()
        .map(|r| RankRow {
            family: r.model.family(),
            mape: r.mape,
            rmse: r.rmse,
            converged: r.converged,
            params: r.model.params().to_vec(),
        })
        .collect();
    ctx.report(&Report::new("fit", vec![ds], FitBody { fit: best, ranking, forecast }))
}

pub fn forecast(ctx: &mut Ctx, args: &ForecastArgs) -> CliResult {
    if args.list_models {
        let catalog = paper_catalog();
        for e in &catalog {
            ctx.say(format!(
                "{:<24} {:<14} {:?} origin {}  {}",
                e.name,
                e.model.family().to_string(),
                e.model.params(),
                e.model.t_origin(),
                e.description
            ));
        }
        return ctx.report(&Report::new("models", vec![], catalog));
    }
    let until: Month = parse_flag("until", args.until.as_deref().unwrap_or_default())?;
    let from: Option<Month> = parse_opt("from", args.from.as_ref())?;

    let (model, source, start, inputs) = if let Some(name) = &args.model {
        let Some(e) = paper_catalog().into_iter().find(|e| e.name == name) else {
            return usage(format!("unknown model {name:?}; see --list-models"));
        };
        let start = from.unwrap_or(e.model.t_origin());
        (e.model, name.clone(), start, vec![])
    } else {
        let path = args.fit.as_ref().expect("clap requires --fit or --model");
        let rep: Report<FitBody> = load_report(path)?;
        let fit = rep.body.fit;
        let start = from.unwrap_or(fit.data_end.succ());
        (fit.model, path.display().to_string(), start, rep.inputs)
    };
    if until < start {
        return usage(format!("--until {until} is before the first forecast month {start}"));
    }
    let pts = points(&model, start, until, args.increment)?;
    let series = if args.increment { "increment" } else { "forecast" };
    for p in &pts {
        ctx.plot(series, p.month, p.value);
    }
    ctx.say(format!("{} {} from {source}", model.family(), series));
    for p in &pts {
        ctx.say(format!("{} {:.1}", p.month, p.value));
    }

    #[derive(Serialize)]
    struct Body {
        source: String,
        model: GrowthModel,
        increment: bool,
        points: Vec<Point>,
    }
    ctx.report(&Report::new(
        "forecast",
        inputs,
        Body { source, model, increment: args.increment, points: pts },
    ))
}

pub fn segment(ctx: &mut Ctx, args: &SegmentArgs) -> CliResult {
    let early: Family = parse_flag("early", &args.early)?;
    let late: Family = parse_flag("late", &args.late)?;
    let w = window(&args.series)?;
    let (ds, ts) = load_ts(&args.series, &w)?;
    let opts = FitOptions { seed: ctx.seed, ..FitOptions::default() };
    let r = segment_break(&ts, early, late, &opts)?;

    ctx.say(format!("break at {} (index {})", r.break_month, r.break_index));
    ctx.say(format!("early {} mape {:.3e}", r.early_fit.model.family(), r.early_fit.mape));
    ctx.say(format!("late  {} mape {:.3e}", r.late_fit.model.family(), r.late_fit.mape));
    ctx.say(format!(
        "contrast {:.3}{}",
        r.contrast,
        if r.low_contrast { " (low contrast: a single regime fits almost as well)" } else { "" }
    ));

    for (m, v) in ts.iter() {
        ctx.plot("observed", m, v);
    }
    for (m, v) in fitted_curve(&r.early_fit)? {
        ctx.plot("early_fit", m, v);
    }
    for (m, v) in fitted_curve(&r.late_fit)? {
        ctx.plot("late_fit", m, v);
    }
    ctx.report(&Report::new("segment", vec![ds], r))
}
