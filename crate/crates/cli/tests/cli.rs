mod common;

use std::fs;

use beveridge_toolkit::svg::count_markers;
use common::*;
use serde_json::Value;
use tempfile::tempdir;

fn demo() -> std::path::PathBuf {
    config("demo.ini")
}

fn summary(dir: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn ingest_covers_the_configured_window() {
    let t = tempdir().unwrap();
    let o = run_in("ingest", &demo(), t.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&t.path().join("panel.csv"));
    assert_eq!(rows.len(), 276);
    assert_eq!(rows[0][0], "1951Q1");
    assert_eq!(rows.last().unwrap()[0], "2019Q4");
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("splice at 2001Q1"), "{stdout}");
    let s = summary(t.path());
    assert_eq!(s["ingest"]["splice"]["cutover"], "2001Q1");
}

#[test]
fn missing_vacancy_file_is_an_input_error() {
    let t = tempdir().unwrap();
    let o = run_in("ingest", &demo(), t.path(), &["--vacancy-post", "/nonexistent/jolts.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("/nonexistent/jolts.csv"), "{}", stderr(&o));
}

#[test]
fn percent_and_fraction_inputs_agree() {
    let t = tempdir().unwrap();
    let data = root().join("data/demo");
    for name in ["unemployment", "vacancy_pre", "vacancy_post"] {
        let text = fs::read_to_string(data.join(format!("{name}.csv"))).unwrap();
        let mut out = String::from("date,value\n");
        for line in text.lines().skip(1) {
            let (d, v) = line.split_once(',').unwrap();
            out.push_str(&format!("{d},{}\n", v.parse::<f64>().unwrap() / 100.0));
        }
        fs::write(t.path().join(format!("{name}.csv")), out).unwrap();
    }
    let p = |n: &str| t.path().join(n).to_string_lossy().into_owned();
    let (pct_out, frac_out) = (t.path().join("pct"), t.path().join("frac"));
    assert_eq!(code(&run_in("ingest", &demo(), &pct_out, &[])), 0);
    let o = run_in(
        "ingest",
        &demo(),
        &frac_out,
        &[
            "--unit",
            "fraction",
            "--unemployment",
            &p("unemployment.csv"),
            "--vacancy-pre",
            &p("vacancy_pre.csv"),
            "--vacancy-post",
            &p("vacancy_post.csv"),
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a = csv_rows(&pct_out.join("panel.csv"));
    let b = csv_rows(&frac_out.join("panel.csv"));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[0], y[0]);
        for j in 1..x.len() {
            let (x, y): (f64, f64) = (x[j].parse().unwrap(), y[j].parse().unwrap());
            assert!((x - y).abs() < 1e-12 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn fit_emits_one_row_and_one_scatter_per_regime() {
    let t = tempdir().unwrap();
    let o = run_in("fit", &demo(), t.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&t.path().join("estimates.csv"));
    assert_eq!(rows.len(), 7);
    for r in &rows {
        let n_obs: usize = r[7].parse().unwrap();
        let svg = fs::read_to_string(t.path().join(format!("figures/fit_{}.svg", r[0]))).unwrap();
        assert_eq!(count_markers(&svg), n_obs, "regime {}", r[0]);
        let data = csv_rows(&t.path().join(format!("figures/fit_{}.csv", r[0])));
        assert_eq!(data.len(), n_obs);
    }
    let overview = fs::read_to_string(t.path().join("figures/beveridge.svg")).unwrap();
    let total: usize = rows.iter().map(|r| r[7].parse::<usize>().unwrap()).sum();
    assert_eq!(count_markers(&overview), total);
}

#[test]
fn single_regime_table_gives_one_row() {
    let t = tempdir().unwrap();
    let table = t.path().join("one.txt");
    fs::write(&table, "# label,start,end\nall,1951Q1,2019Q4\n").unwrap();
    let o = run_in("fit", &demo(), &t.path().join("out"), &["--regimes", table.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&t.path().join("out/estimates.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][7], "276");
}

#[test]
fn failed_regime_is_reported_and_others_still_emitted() {
    let t = tempdir().unwrap();
    let table = t.path().join("short.txt");
    fs::write(&table, "early,1951Q1,1959Q2\ntiny,1960Q1,1960Q2\n").unwrap();
    let o = run_in("fit", &demo(), &t.path().join("out"), &["--regimes", table.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("tiny"));
    assert_eq!(csv_rows(&t.path().join("out/estimates.csv")).len(), 1);
    let s = summary(&t.path().join("out"));
    assert_eq!(s["fit"]["failures"][0]["regime"], "tiny");
    // the gap needs every regime
    let o = run_in("gap", &demo(), &t.path().join("out"), &["--regimes", table.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn gap_writes_series_chart_and_both_summaries() {
    let t = tempdir().unwrap();
    let o = run_in("gap", &demo(), t.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&t.path().join("gap.csv"));
    assert_eq!(rows.len(), 276);
    let svg = fs::read_to_string(t.path().join("figures/gap.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="shade""#).count(), 10);
    assert_eq!(svg.matches(r#"class="series""#).count(), 2);
    let s = summary(t.path());
    let all = &s["gap"]["summary"]["all_quarters"];
    let ex = &s["gap"]["summary"]["excluding_gap_quarters"];
    assert_eq!(all["n_quarters"], 276);
    let flagged = rows.iter().filter(|r| r[9] == "true").count();
    assert!(flagged > 0);
    assert_eq!(ex["n_quarters"].as_u64().unwrap() as usize, 276 - flagged);
    assert!(all["max_gap"]["quarter"].is_string());
    assert_eq!(s["gap"]["zeta"], 0.25);
}

#[test]
fn flags_override_the_config_file() {
    let t = tempdir().unwrap();
    let o = run_in("gap", &demo(), t.path(), &["--zeta", "0.5", "--kappa", "0.9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = summary(t.path());
    assert_eq!(s["gap"]["zeta"], 0.5);
    assert_eq!(s["gap"]["kappa"], 0.9);
    let o = run_in("gap", &demo(), t.path(), &["--set", "calibration.zeta=0.4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(summary(t.path())["gap"]["zeta"], 0.4);
}

#[test]
fn kappa_override_file_applies_per_regime() {
    let t = tempdir().unwrap();
    let file = t.path().join("kappa.csv");
    fs::write(&file, "regime,kappa\n2010Q1-2019Q4,1.5\n").unwrap();
    let base = t.path().join("base");
    let over = t.path().join("over");
    assert_eq!(code(&run_in("gap", &demo(), &base, &[])), 0);
    let o = run_in("gap", &demo(), &over, &["--kappa-overrides", file.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a = csv_rows(&base.join("gap.csv"));
    let b = csv_rows(&over.join("gap.csv"));
    for (x, y) in a.iter().zip(&b) {
        if x[0].as_str() >= "2010Q1" {
            assert!(y[5].parse::<f64>().unwrap() > x[5].parse::<f64>().unwrap());
        } else {
            assert_eq!(x[5], y[5]);
        }
    }
    fs::write(&file, "regime,kappa\nnope,1.5\n").unwrap();
    assert_eq!(code(&run_in("gap", &demo(), &over, &["--kappa-overrides", file.to_str().unwrap()])), 2);
}

#[test]
fn empty_panel_is_an_input_error() {
    let t = tempdir().unwrap();
    let panel = t.path().join("empty.csv");
    fs::write(&panel, "quarter,u,v,theta,n\n").unwrap();
    let o = run_in("gap", &demo(), &t.path().join("out"), &["--panel", panel.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn singleton_sensitivity_matches_gap() {
    let t = tempdir().unwrap();
    assert_eq!(code(&run_in("gap", &demo(), t.path(), &[])), 0);
    let o = run_in("sensitivity", &demo(), t.path(), &["--zetas", "0.25"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let gap = csv_rows(&t.path().join("gap.csv"));
    let band = csv_rows(&t.path().join("sensitivity.csv"));
    assert_eq!(gap.len(), band.len());
    for (g, b) in gap.iter().zip(&band) {
        assert_eq!(g[0], b[0]);
        assert_eq!(g[5], b[2]);
    }
}

#[test]
fn sensitivity_emits_band_and_implied_zeta() {
    let t = tempdir().unwrap();
    let o = run_in("sensitivity", &demo(), t.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let header = fs::read_to_string(t.path().join("sensitivity.csv")).unwrap();
    assert!(header.starts_with("quarter,u,u_star_z0,u_star_z25,u_star_z50\n"));
    let svg = fs::read_to_string(t.path().join("figures/sensitivity.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="series""#).count(), 4);
    assert_eq!(csv_rows(&t.path().join("implied_zeta.csv")).len(), 276);
    let s = summary(t.path());
    assert!(s["sensitivity"]["implied_zeta"]["all_quarters"]["min"]["value"].is_number());
    assert!(s["sensitivity"]["excluding_gap_quarters"]["mean_band_width"].is_number());

    let t = tempdir().unwrap();
    let o = run_in("sensitivity", &demo(), t.path(), &["--implied-zeta", "false"]);
    assert_eq!(code(&o), 0);
    assert!(!t.path().join("implied_zeta.csv").exists());
}

#[test]
fn simulate_passes_and_writes_reports() {
    let t = tempdir().unwrap();
    let o = run_in("simulate", &demo(), t.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(csv_rows(&t.path().join("oracle.csv")).len(), 81);
    assert_eq!(csv_rows(&t.path().join("statics.csv")).len(), 4);
    assert_eq!(csv_rows(&t.path().join("round_trip.csv")).len(), 40);
    let s = summary(t.path());
    assert_eq!(s["simulate"]["oracle"]["n_passed"], 81);
    assert_eq!(s["simulate"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn simulate_violation_exits_with_one() {
    let t = tempdir().unwrap();
    // a wide cycle takes the sample far from the planner optimum, where the
    // matching curve is visibly not isoelastic
    let scenario = t.path().join("wide.ini");
    let text = fs::read_to_string(config("scenario.ini"))
        .unwrap()
        .replace("shocks = shocks.csv", "s_amplitude = 0.6")
        .replace("u_base = 0.057", "u_base = 0.09");
    fs::write(&scenario, text).unwrap();
    let o = run_in("simulate", &demo(), &t.path().join("out"), &["--scenario", scenario.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("round trip"), "{}", stderr(&o));
}

#[test]
fn seed_precedence_flag_over_env_over_file() {
    let t = tempdir().unwrap();
    let noisy = config("scenario_noisy.ini");
    let args = |out: &std::path::Path, extra: &[&str]| {
        let mut v: Vec<String> = vec![
            "simulate".into(),
            "--config".into(),
            demo().to_string_lossy().into_owned(),
            "--scenario".into(),
            noisy.to_string_lossy().into_owned(),
            "--out".into(),
            out.to_string_lossy().into_owned(),
        ];
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let run = |out: &std::path::Path, extra: &[&str], env: Option<&str>| {
        let mut c = std::process::Command::new(env!("CARGO_BIN_EXE_toolkit"));
        c.args(args(out, extra)).env_remove("TOOLKIT_SEED");
        if let Some(e) = env {
            c.env("TOOLKIT_SEED", e);
        }
        let o = c.output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        summary(out)["simulate"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(&t.path().join("a"), &[], None), 11);
    assert_eq!(run(&t.path().join("b"), &[], Some("5")), 5);
    assert_eq!(run(&t.path().join("c"), &["--seed", "9"], Some("5")), 9);
    let a = fs::read(t.path().join("a/synthetic_panel.csv")).unwrap();
    let b = fs::read(t.path().join("b/synthetic_panel.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn report_bundles_tables_and_figures_idempotently() {
    let t = tempdir().unwrap();
    let o = run_in("report", &demo(), t.path(), &["--recompute"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = fs::read_to_string(t.path().join("report.md")).unwrap();
    let table_rows = first.lines().filter(|l| l.starts_with("| 19") || l.starts_with("| 20")).count();
    assert_eq!(table_rows, 7);
    assert_eq!(first.matches("![").count(), 4);
    for l in first.lines().filter(|l| l.starts_with("![")) {
        let rel = l.split_once("](").unwrap().1.trim_end_matches(')');
        assert!(t.path().join(rel).exists(), "{rel}");
    }
    let before = snapshot(t.path());
    let o = run_in("report", &demo(), t.path(), &[]);
    assert_eq!(code(&o), 0);
    assert_eq!(snapshot(t.path()), before);
}

#[test]
fn report_without_artifacts_is_an_input_error() {
    let t = tempdir().unwrap();
    assert_eq!(code(&run_in("fit", &demo(), t.path(), &[])), 0);
    let o = run_in("report", &demo(), t.path(), &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--recompute"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_with_two() {
    let t = tempdir().unwrap();
    let bad = t.path().join("bad.ini");
    fs::write(&bad, "[data]\nunemploymnet = x.csv\n").unwrap();
    assert_eq!(code(&run_in("ingest", &bad, t.path(), &[])), 2);
    assert_eq!(code(&toolkit(&["gap"])), 2);
    assert_eq!(code(&toolkit(&["ingest", "--config", "/nonexistent.ini"])), 2);
    assert_eq!(code(&run_in("gap", &demo(), t.path(), &["--zetas", "0,1.5"])), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let t = tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = t.path().join(dir);
        for cmd in ["ingest", "fit", "gap", "sensitivity", "simulate"] {
            assert_eq!(code(&run_in(cmd, &demo(), &out, &[])), 0);
        }
        assert_eq!(code(&run_in("report", &demo(), &out, &[])), 0);
    }
    let (a, b) = (snapshot(&t.path().join("a")), snapshot(&t.path().join("b")));
    assert_eq!(a.len(), b.len());
    for ((pa, ba), (pb, bb)) in a.iter().zip(&b) {
        assert_eq!(pa, pb);
        assert!(ba == bb, "{pa} differs");
    }
}
