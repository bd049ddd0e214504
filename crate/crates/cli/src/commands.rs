use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use beveridge_gap::fit::{estimates_to_csv, RegimeFit};
use beveridge_gap::gap::{gap_to_csv, implied_zeta_to_csv, GapPoint, GapSummary, ImpliedZetaPoint, SensitivityBand};
use beveridge_gap::ingest::fmt_value;
use beveridge_gap::planner::synth::{parse_shock_csv, synth_panel, Scenario};
use beveridge_gap::planner::{
    comparative_statics_check, dmp_stats, oracle_grid, round_trip_check, ORACLE_EPSILONS,
};
use beveridge_gap::{LaborMarketPanel, QuarterKey};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::pipeline::{self, Analysis};
use crate::svg::{Axis, Chart, PALETTE};

/// Tolerances for the hard invariants checked by `simulate`.
pub const ORACLE_U_TOL: f64 = 1e-6;
pub const ORACLE_TANGENCY_TOL: f64 = 1e-6;
pub const ROUND_TRIP_TOL: f64 = 1e-3;

/// Outcome of a command that ran to completion.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Status {
    pub violations: Vec<String>,
}

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn new(dir: &Path) -> Self {
        Output { dir: dir.to_path_buf() }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    pub fn write(&self, rel: &str, contents: &str) -> Result<()> {
        let path = self.path(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
    }

    /// Replace one top-level section of `summary.json`, keeping the others.
    pub fn update_summary(&self, section: &str, value: Value) -> Result<()> {
        let path = self.path("summary.json");
        let mut root = match fs::read_to_string(&path) {
            Ok(text) => match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                _ => bail!("{} exists but is not a JSON object", path.display()),
            },
            Err(_) => Map::new(),
        };
        root.insert(section.to_string(), value);
        let mut text = serde_json::to_string_pretty(&Value::Object(root))?;
        text.push('\n');
        self.write("summary.json", &text)
    }
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn year(q: QuarterKey) -> f64 {
    q.as_decimal_year()
}

fn pct(x: f64) -> f64 {
    100.0 * x
}

pub fn ingest(cfg: &RunConfig) -> Result<Status> {
    let ing = pipeline::ingest(cfg)?;
    let out = Output::new(&cfg.out);
    if ing.panel.is_empty() {
        bail!("panel is empty");
    }
    out.write("panel.csv", &ing.panel.to_csv())?;
    if let Some(a) = &ing.splice {
        match (a.pre_last, a.jump) {
            (Some(pre), Some(jump)) => println!(
                "splice at {}: pre-source {} then post-source {} (jump {:+.4} pp)",
                a.cutover,
                fmt_value(pre),
                fmt_value(a.post_first),
                pct(jump)
            ),
            _ => println!("splice at {}: no pre-source quarter before the cutover", a.cutover),
        }
    }
    for d in &ing.dropped {
        eprintln!("dropped {} {}: {} of 3 months present", d.series, d.quarter, d.months_present);
    }
    out.update_summary(
        "ingest",
        json!({
            "first_quarter": ing.panel.first_quarter(),
            "last_quarter": ing.panel.last_quarter(),
            "n_quarters": ing.panel.len(),
            "splice": ing.splice,
            "dropped_quarters": ing.dropped,
        }),
    )?;
    println!(
        "panel: {} quarters, {} to {}",
        ing.panel.len(),
        ing.panel.first_quarter().map(|q| q.to_string()).unwrap_or_default(),
        ing.panel.last_quarter().map(|q| q.to_string()).unwrap_or_default()
    );
    Ok(Status::default())
}

fn fit_figure(fit: &RegimeFit, panel: &LaborMarketPanel) -> (String, String) {
    let rows = panel.slice(fit.regime.start, fit.regime.end);
    let x = Axis::fit(rows.iter().map(|r| pct(r.u)), true);
    let fitted = |u: f64| fit.estimate.predict(u).unwrap_or(f64::NAN);
    let y = Axis::fit(rows.iter().flat_map(|r| [pct(r.v), pct(fitted(r.u))]), true);
    let mut chart = Chart::new(
        &format!("{}: epsilon = {:.3}", fit.regime.label, fit.estimate.epsilon),
        x,
        "unemployment rate (%, log scale)",
        y,
        "vacancy rate (%, log scale)",
    );
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (pct(r.u), pct(r.v))).collect();
    chart.scatter(&pts, PALETTE[0], "quarters");
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.u), b.max(r.u)));
    let line: Vec<(f64, f64)> = (0..=40)
        .map(|i| lo * (hi / lo).powf(i as f64 / 40.0))
        .map(|u| (pct(u), pct(fitted(u))))
        .collect();
    chart.line(&line, PALETTE[1], "fitted curve");
    let mut csv = String::from("quarter,u,v,v_fitted\n");
    for r in rows {
        let _ = writeln!(csv, "{},{},{},{}", r.quarter, fmt_value(r.u), fmt_value(r.v), fmt_value(fitted(r.u)));
    }
    (chart.render(), csv)
}

fn beveridge_figure(fits: &[RegimeFit], panel: &LaborMarketPanel) -> (String, String) {
    let x = Axis::fit(panel.rows().iter().map(|r| pct(r.u)), true);
    let y = Axis::fit(panel.rows().iter().map(|r| pct(r.v)), true);
    let mut chart = Chart::new(
        "Beveridge curve by regime",
        x,
        "unemployment rate (%, log scale)",
        y,
        "vacancy rate (%, log scale)",
    );
    let mut csv = String::from("quarter,u,v,regime\n");
    for (i, f) in fits.iter().enumerate() {
        let rows = panel.slice(f.regime.start, f.regime.end);
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (pct(r.u), pct(r.v))).collect();
        chart.scatter(&pts, PALETTE[i % PALETTE.len()], &f.regime.label);
        for r in rows {
            let _ = writeln!(csv, "{},{},{},{}", r.quarter, fmt_value(r.u), fmt_value(r.v), f.regime.label);
        }
    }
    (chart.render(), csv)
}

pub fn fit(cfg: &RunConfig) -> Result<Status> {
    let ing = pipeline::ingest(cfg)?;
    if ing.panel.is_empty() {
        bail!("panel is empty");
    }
    let table = pipeline::regime_table(cfg)?;
    let fitted = pipeline::fit(cfg, &ing.panel, &table);
    let out = Output::new(&cfg.out);
    out.write("estimates.csv", &estimates_to_csv(&fitted.fits))?;
    for f in &fitted.fits {
        let (svg, csv) = fit_figure(f, &ing.panel);
        let stem = format!("figures/fit_{}", file_stem(&f.regime.label));
        out.write(&format!("{stem}.svg"), &svg)?;
        out.write(&format!("{stem}.csv"), &csv)?;
        println!(
            "{}: epsilon = {:.4} (se {:.4}), R2 = {:.3}, n = {}",
            f.regime.label, f.estimate.epsilon, f.estimate.se_epsilon, f.estimate.r_squared, f.estimate.n_obs
        );
    }
    let (svg, csv) = beveridge_figure(&fitted.fits, &ing.panel);
    out.write("figures/beveridge.svg", &svg)?;
    out.write("figures/beveridge.csv", &csv)?;
    for (r, e) in &fitted.failures {
        eprintln!("regime {} not estimated: {e}", r.label);
    }
    let failures: Vec<Value> = fitted
        .failures
        .iter()
        .map(|(r, e)| json!({ "regime": r.label, "error": e }))
        .collect();
    let mean = if fitted.fits.is_empty() {
        None
    } else {
        Some(fitted.fits.iter().map(|f| f.estimate.epsilon).sum::<f64>() / fitted.fits.len() as f64)
    };
    out.update_summary(
        "fit",
        json!({
            "n_regimes": fitted.fits.len(),
            "mean_epsilon": mean,
            "standard_errors": match cfg.se {
                beveridge_gap::fit::StdErrorKind::Classical => "classical",
                beveridge_gap::fit::StdErrorKind::Hc1 => "hc1",
            },
            "estimates": fitted.fits,
            "failures": failures,
        }),
    )?;
    Ok(Status::default())
}

fn time_axis(panel: &LaborMarketPanel) -> Axis {
    let first = panel.first_quarter().map(year).unwrap_or(0.0);
    let last = panel.last_quarter().map(year).unwrap_or(1.0);
    Axis::exact(first, last.max(first + 0.25))
}

fn shade_recessions(chart: &mut Chart, recessions: &[(QuarterKey, QuarterKey)]) {
    for (a, b) in recessions {
        chart.shade(year(*a), year(*b) + 0.25);
    }
}

fn gap_figure(points: &[GapPoint], panel: &LaborMarketPanel, recessions: &[(QuarterKey, QuarterKey)], zeta: f64) -> String {
    let y = Axis::fit(points.iter().flat_map(|p| [pct(p.u), pct(p.u_star)]).filter(|v| v.is_finite()), false);
    let mut chart = Chart::new(
        &format!("Actual and efficient unemployment (zeta = {zeta})"),
        time_axis(panel),
        "year",
        y,
        "percent of labor force",
    );
    shade_recessions(&mut chart, recessions);
    let u: Vec<(f64, f64)> = points.iter().map(|p| (year(p.quarter), pct(p.u))).collect();
    let us: Vec<(f64, f64)> = points.iter().map(|p| (year(p.quarter), pct(p.u_star))).collect();
    chart.line(&u, PALETTE[0], "u");
    chart.line(&us, PALETTE[1], "u*");
    chart.render()
}

fn summaries(points: &[GapPoint]) -> Value {
    json!({
        "all_quarters": GapSummary::from_points(points, false),
        "excluding_gap_quarters": GapSummary::from_points(points, true),
    })
}

pub fn gap(cfg: &RunConfig) -> Result<Status> {
    let a = Analysis::run(cfg)?;
    let recessions = pipeline::recessions(cfg)?;
    let points = a.gap()?;
    let out = Output::new(&cfg.out);
    let csv = gap_to_csv(&points);
    out.write("gap.csv", &csv)?;
    out.write("figures/gap.svg", &gap_figure(&points, a.panel(), &recessions, a.calibration.zeta))?;
    out.write("figures/gap.csv", &csv)?;
    let n_out = points.iter().filter(|p| p.out_of_range).count();
    if n_out > 0 {
        eprintln!("{n_out} quarters have u* outside (0, 1); they are flagged in the summary");
    }
    out.update_summary(
        "gap",
        json!({
            "kappa": a.calibration.kappa,
            "zeta": a.calibration.zeta,
            "tolerance": cfg.tolerance,
            "calibration": a.calibration,
            "kappa_overrides": a.options.kappa_overrides,
            "summary": summaries(&points),
        }),
    )?;
    if let Some(s) = GapSummary::from_points(&points, cfg.exclude_gap_quarters) {
        println!(
            "mean u = {:.2}%, mean u* = {:.2}%, mean gap = {:.2} pp; max gap {:.2} pp in {}",
            pct(s.mean_u),
            pct(s.mean_u_star),
            pct(s.mean_gap),
            pct(s.max_gap.value),
            s.max_gap.quarter
        );
    }
    Ok(Status::default())
}

fn sensitivity_figure(band: &SensitivityBand, panel: &LaborMarketPanel, recessions: &[(QuarterKey, QuarterKey)]) -> String {
    let y = Axis::fit(
        band.rows
            .iter()
            .flat_map(|r| std::iter::once(pct(r.u)).chain(r.u_star.iter().map(|x| pct(*x))))
            .filter(|v| v.is_finite()),
        false,
    );
    let mut chart = Chart::new("Efficient unemployment by value of nonwork", time_axis(panel), "year", y, "percent of labor force");
    shade_recessions(&mut chart, recessions);
    let u: Vec<(f64, f64)> = band.rows.iter().map(|r| (year(r.quarter), pct(r.u))).collect();
    chart.line(&u, "#000000", "u");
    for (j, z) in band.zetas.iter().enumerate() {
        let line: Vec<(f64, f64)> = band.rows.iter().map(|r| (year(r.quarter), pct(r.u_star[j]))).collect();
        chart.line(&line, PALETTE[(j + 1) % PALETTE.len()], &format!("u*, zeta = {z}"));
    }
    chart.render()
}

fn implied_figure(points: &[ImpliedZetaPoint], panel: &LaborMarketPanel, recessions: &[(QuarterKey, QuarterKey)]) -> String {
    let y = Axis::fit(points.iter().map(|p| p.zeta_star).chain([0.0]), false);
    let mut chart = Chart::new(
        "Value of nonwork that would make each quarter efficient",
        time_axis(panel),
        "year",
        y,
        "implied zeta",
    );
    shade_recessions(&mut chart, recessions);
    chart.hline(0.0);
    let line: Vec<(f64, f64)> = points.iter().map(|p| (year(p.quarter), p.zeta_star)).collect();
    chart.line(&line, PALETTE[2], "zeta*");
    chart.render()
}

fn extreme(points: &[ImpliedZetaPoint], max: bool) -> Option<Value> {
    let best = points.iter().fold(None::<&ImpliedZetaPoint>, |acc, p| match acc {
        Some(a) if (max && a.zeta_star >= p.zeta_star) || (!max && a.zeta_star <= p.zeta_star) => Some(a),
        _ => Some(p),
    })?;
    Some(json!({ "quarter": best.quarter, "value": best.zeta_star }))
}

pub fn sensitivity(cfg: &RunConfig) -> Result<Status> {
    let a = Analysis::run(cfg)?;
    let recessions = pipeline::recessions(cfg)?;
    let all = a.sensitivity(&cfg.zetas, false)?;
    let excl = a.sensitivity(&cfg.zetas, true)?;
    let out = Output::new(&cfg.out);
    let csv = all.band.to_csv();
    out.write("sensitivity.csv", &csv)?;
    out.write("figures/sensitivity.csv", &csv)?;
    out.write("figures/sensitivity.svg", &sensitivity_figure(&all.band, a.panel(), &recessions))?;
    let implied = if cfg.implied_zeta {
        let pts = a.implied_zeta()?;
        let csv = implied_zeta_to_csv(&pts);
        out.write("implied_zeta.csv", &csv)?;
        out.write("figures/implied_zeta.csv", &csv)?;
        out.write("figures/implied_zeta.svg", &implied_figure(&pts, a.panel(), &recessions))?;
        let kept: Vec<ImpliedZetaPoint> = pts.iter().copied().filter(|p| !p.is_gap_quarter).collect();
        json!({
            "all_quarters": { "min": extreme(&pts, false), "max": extreme(&pts, true) },
            "excluding_gap_quarters": { "min": extreme(&kept, false), "max": extreme(&kept, true) },
        })
    } else {
        Value::Null
    };
    for z in &all.summary.per_zeta {
        println!(
            "zeta = {}: mean u* = {:.2}%, mean shift {:+.2} pp",
            z.zeta,
            pct(z.mean_u_star),
            pct(z.mean_shift)
        );
    }
    println!("mean band width: {:.2} pp", pct(all.summary.mean_band_width));
    out.update_summary(
        "sensitivity",
        json!({
            "kappa": a.calibration.kappa,
            "zetas": cfg.zetas,
            "all_quarters": all.summary,
            "excluding_gap_quarters": excl.summary,
            "implied_zeta": implied,
        }),
    )?;
    Ok(Status::default())
}

#[derive(Serialize)]
struct SimulateSummary {
    seed: u64,
    noise_scale: f64,
    n_quarters: usize,
    oracle: OracleSummary,
    comparative_statics: beveridge_gap::planner::StaticsReport,
    round_trip: RoundTripSummary,
    violations: Vec<String>,
}

#[derive(Serialize)]
struct OracleSummary {
    n_points: usize,
    n_passed: usize,
    max_abs_error: f64,
    max_tangency_residual: f64,
}

#[derive(Serialize)]
struct RoundTripSummary {
    enforced: bool,
    planner_u_star: f64,
    fitted_epsilon: f64,
    max_rel_error: f64,
    tolerance: f64,
}

pub fn scenario_seed(cfg: &RunConfig, scenario: &Scenario) -> u64 {
    cfg.seed.unwrap_or(scenario.seed)
}

pub fn simulate(cfg: &RunConfig) -> Result<Status> {
    let path = cfg
        .scenario
        .as_ref()
        .context("no [simulation] scenario configured")?;
    let scenario = Scenario::parse(&pipeline::read(path, "scenario")?).with_context(|| format!("scenario {}", path.display()))?;
    let shocks = match &scenario.shocks {
        Some(rel) => {
            let p = path.parent().unwrap_or(Path::new("")).join(rel);
            parse_shock_csv(&pipeline::read(&p, "shock")?).with_context(|| format!("shock file {}", p.display()))?
        }
        None => scenario.generated_shocks(),
    };
    let seed = scenario_seed(cfg, &scenario);
    let panel = synth_panel(&scenario.economy, scenario.u_base, &shocks, scenario.noise_scale, seed)?;
    let out = Output::new(&cfg.out);
    out.write("synthetic_panel.csv", &panel.to_csv())?;

    let mut violations = Vec::new();

    let grid = oracle_grid()?;
    let mut csv = String::from("epsilon,zeta,kappa,v0,u_numeric,u_formula,abs_error,tangency_residual,second_order_ok,passed\n");
    for c in &grid {
        let passed = c.passed(ORACLE_U_TOL, ORACLE_TANGENCY_TOL);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{:.3e},{:.3e},{},{}",
            c.epsilon,
            c.zeta,
            c.kappa,
            c.v0,
            fmt_value(c.u_numeric),
            fmt_value(c.u_formula),
            c.abs_error,
            c.tangency_residual,
            c.second_order_ok,
            passed
        );
        if !passed {
            violations.push(format!(
                "oracle: epsilon={}, zeta={}, kappa={}, v0={}: |du*|={:.3e}, tangency={:.3e}, second_order={}, boundary={}",
                c.epsilon, c.zeta, c.kappa, c.v0, c.abs_error, c.tangency_residual, c.second_order_ok, c.at_boundary
            ));
        }
    }
    debug_assert_eq!(grid.len(), ORACLE_EPSILONS.len() * 27);
    out.write("oracle.csv", &csv)?;

    let statics = comparative_statics_check(&scenario.statics, &scenario.perturbations)?;
    let mut csv = String::from("check,passed,u_before,u_after,theta_before,theta_after,detail\n");
    for c in &statics.checks {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},\"{}\"",
            c.name,
            c.passed,
            fmt_value(c.u_before),
            fmt_value(c.u_after),
            fmt_value(c.theta_before),
            fmt_value(c.theta_after),
            c.detail
        );
    }
    for c in statics.violations() {
        violations.push(format!("comparative statics: {} ({})", c.name, c.detail));
    }
    out.write("statics.csv", &csv)?;

    let rt = round_trip_check(&scenario.economy, &panel)?;
    let enforced = scenario.noise_scale == 0.0;
    let mut csv = String::from("quarter,u,u_star_formula,u_star_planner,rel_error\n");
    for r in &rt.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{:.3e}",
            r.quarter,
            fmt_value(r.u),
            fmt_value(r.u_star_formula),
            fmt_value(rt.planner.u_star),
            r.rel_error
        );
    }
    out.write("round_trip.csv", &csv)?;
    out.write("figures/round_trip.csv", &csv)?;
    let y = Axis::fit(rt.rows.iter().flat_map(|r| [pct(r.u), pct(r.u_star_formula)]).chain([pct(rt.planner.u_star)]), false);
    let mut chart = Chart::new("Synthetic panel: formula u* against the planner", time_axis(&panel), "year", y, "percent");
    chart.line(&rt.rows.iter().map(|r| (year(r.quarter), pct(r.u))).collect::<Vec<_>>(), PALETTE[0], "u");
    chart.line(
        &rt.rows.iter().map(|r| (year(r.quarter), pct(r.u_star_formula))).collect::<Vec<_>>(),
        PALETTE[1],
        "u* (formula)",
    );
    chart.hline(pct(rt.planner.u_star));
    out.write("figures/round_trip.svg", &chart.render())?;
    if enforced && !(rt.max_rel_error < ROUND_TRIP_TOL) {
        violations.push(format!(
            "round trip: max relative error {:.3e} exceeds {ROUND_TRIP_TOL:e} (alpha={}, mu={}, s={}, zeta={}, kappa={})",
            rt.max_rel_error,
            scenario.economy.alpha,
            scenario.economy.mu,
            scenario.economy.s,
            dmp_stats(&scenario.economy).zeta,
            dmp_stats(&scenario.economy).kappa
        ));
    }

    let n_passed = grid.iter().filter(|c| c.passed(ORACLE_U_TOL, ORACLE_TANGENCY_TOL)).count();
    println!("oracle grid: {n_passed}/{} points agree", grid.len());
    println!(
        "comparative statics: {}/{} sign patterns hold",
        statics.checks.iter().filter(|c| c.passed).count(),
        statics.checks.len()
    );
    println!(
        "round trip: max relative error {:.3e} against planner u* = {:.6}{}",
        rt.max_rel_error,
        rt.planner.u_star,
        if enforced { "" } else { " (noisy panel, not enforced)" }
    );
    let summary = SimulateSummary {
        seed,
        noise_scale: scenario.noise_scale,
        n_quarters: panel.len(),
        oracle: OracleSummary {
            n_points: grid.len(),
            n_passed,
            max_abs_error: grid.iter().map(|c| c.abs_error).fold(0.0, f64::max),
            max_tangency_residual: grid.iter().map(|c| c.tangency_residual).fold(0.0, f64::max),
        },
        comparative_statics: statics,
        round_trip: RoundTripSummary {
            enforced,
            planner_u_star: rt.planner.u_star,
            fitted_epsilon: rt.fitted.epsilon,
            max_rel_error: rt.max_rel_error,
            tolerance: ROUND_TRIP_TOL,
        },
        violations: violations.clone(),
    };
    out.update_summary("simulate", serde_json::to_value(&summary)?)?;
    Ok(Status { violations })
}

/// Figures embedded by the report, in order. The last is optional.
pub const REPORT_FIGURES: [(&str, &str); 4] = [
    ("figures/beveridge.svg", "Beveridge curve by regime"),
    ("figures/gap.svg", "Actual and efficient unemployment"),
    ("figures/sensitivity.svg", "Efficient unemployment by value of nonwork"),
    ("figures/implied_zeta.svg", "Implied value of nonwork"),
];

pub fn report(cfg: &RunConfig, recompute: bool) -> Result<Status> {
    if recompute {
        ingest(cfg)?;
        fit(cfg)?;
        gap(cfg)?;
        sensitivity(cfg)?;
    }
    let out = Output::new(&cfg.out);
    let need = |rel: &str| -> Result<String> {
        let p = out.path(rel);
        fs::read_to_string(&p).with_context(|| format!("missing artifact {} (run the upstream command or pass --recompute)", p.display()))
    };
    let estimates = beveridge_gap::fit::estimates_from_csv(&need("estimates.csv")?)
        .map_err(|e| anyhow::anyhow!("estimates.csv: {e}"))?;
    let summary: Value = serde_json::from_str(&need("summary.json")?).context("summary.json")?;
    need("gap.csv")?;
    need("sensitivity.csv")?;
    let gap = summary.get("gap").context("summary.json has no gap section (run `gap`)")?;
    let sens = summary
        .get("sensitivity")
        .context("summary.json has no sensitivity section (run `sensitivity`)")?;
    let mut figures = Vec::new();
    for (i, (rel, title)) in REPORT_FIGURES.iter().enumerate() {
        if out.path(rel).exists() {
            figures.push((*rel, *title));
        } else if i < 3 {
            need(rel)?;
        }
    }
    let text = render_report(&estimates, gap, sens, &figures);
    out.write("report.md", &text)?;
    println!("report: {} regimes, {} figures", estimates.len(), figures.len());
    Ok(Status::default())
}

fn num(v: &Value, path: &[&str]) -> Option<f64> {
    path.iter().try_fold(v, |acc, k| acc.get(k))?.as_f64()
}

fn pp(v: Option<f64>) -> String {
    v.map(|x| format!("{:.2}", 100.0 * x)).unwrap_or_else(|| "n/a".into())
}

fn render_report(estimates: &[RegimeFit], gap: &Value, sens: &Value, figures: &[(&str, &str)]) -> String {
    let mut s = String::from("# Unemployment gap report\n\n");
    let _ = writeln!(
        s,
        "Recruiting cost kappa = {:.4}; value of nonwork zeta = {}.\n",
        num(gap, &["kappa"]).unwrap_or(f64::NAN),
        num(gap, &["zeta"]).unwrap_or(f64::NAN)
    );
    s.push_str("## Beveridge elasticity by regime\n\n");
    s.push_str("| regime | start | end | epsilon | s.e. | R^2 | quarters | scatter |\n");
    s.push_str("|---|---|---|---:|---:|---:|---:|---|\n");
    for f in estimates {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {:.3} | {:.3} | {:.3} | {} | [svg](figures/fit_{}.svg) |",
            f.regime.label,
            f.regime.start,
            f.regime.end,
            f.estimate.epsilon,
            f.estimate.se_epsilon,
            f.estimate.r_squared,
            f.estimate.n_obs,
            file_stem(&f.regime.label)
        );
    }
    if !estimates.is_empty() {
        let mean = estimates.iter().map(|f| f.estimate.epsilon).sum::<f64>() / estimates.len() as f64;
        let _ = writeln!(s, "\nMean elasticity across regimes: {mean:.3}.");
    }

    s.push_str("\n## Unemployment gap\n\nRates in percent; gaps in percentage points.\n\n");
    s.push_str("| statistic | all quarters | excluding borrowed-curve quarters |\n|---|---:|---:|\n");
    let all = &gap["summary"]["all_quarters"];
    let ex = &gap["summary"]["excluding_gap_quarters"];
    for (name, key) in [
        ("mean u", "mean_u"),
        ("mean u*", "mean_u_star"),
        ("mean gap", "mean_gap"),
    ] {
        let _ = writeln!(s, "| {name} | {} | {} |", pp(num(all, &[key])), pp(num(ex, &[key])));
    }
    for (name, key) in [("min gap", "min_gap"), ("max gap", "max_gap")] {
        let cell = |v: &Value| {
            format!(
                "{} ({})",
                pp(num(v, &[key, "value"])),
                v[key]["quarter"].as_str().unwrap_or("n/a")
            )
        };
        let _ = writeln!(s, "| {name} | {} | {} |", cell(all), cell(ex));
    }
    let _ = writeln!(
        s,
        "| quarters | {} | {} |",
        all["n_quarters"].as_u64().unwrap_or(0),
        ex["n_quarters"].as_u64().unwrap_or(0)
    );

    s.push_str("\n## Sensitivity to the value of nonwork\n\n");
    s.push_str("| zeta | mean u* | mean shift | min u* | max u* |\n|---:|---:|---:|---:|---:|\n");
    if let Some(rows) = sens["all_quarters"]["per_zeta"].as_array() {
        for z in rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} |",
                z["zeta"],
                pp(z["mean_u_star"].as_f64()),
                pp(z["mean_shift"].as_f64()),
                pp(z["min_u_star"].as_f64()),
                pp(z["max_u_star"].as_f64())
            );
        }
    }
    let _ = writeln!(
        s,
        "\nMean band width: {} pp (all quarters), {} pp (excluding borrowed-curve quarters).",
        pp(num(sens, &["all_quarters", "mean_band_width"])),
        pp(num(sens, &["excluding_gap_quarters", "mean_band_width"]))
    );
    if let (Some(lo), Some(hi)) = (
        num(sens, &["implied_zeta", "all_quarters", "min", "value"]),
        num(sens, &["implied_zeta", "all_quarters", "max", "value"]),
    ) {
        let _ = writeln!(s, "\nImplied value of nonwork ranges from {lo:.3} to {hi:.3}.");
    }

    s.push_str("\n## Figures\n\n");
    for (rel, title) in figures {
        let _ = writeln!(s, "![{title}]({rel})\n");
    }
    s
}
