use std::fs;
use std::path::Path;

use beveridge_gap::fit::fit_all;
use beveridge_gap::gap::{classify, Classification, DEFAULT_TOLERANCE};
use beveridge_gap::ingest::{build_panel, parse_series_csv, splice_vacancy, to_quarterly, QuarterlyPoint, ValueUnit};
use beveridge_gap::planner::{dmp_stats, DmpEconomy};
use beveridge_gap::regimes::{assign_regime, build_schedule};
use beveridge_gap::{
    gap_series, ElasticityEstimate, LaborMarketPanel, PanelRow, QuarterKey, Regime, RegimeFit, RegimeTable,
};
use proptest::prelude::*;

fn demo_series(name: &str) -> Vec<QuarterlyPoint> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/demo").join(name);
    let text = fs::read_to_string(&path).unwrap();
    to_quarterly(&parse_series_csv(&text, ValueUnit::Percent).unwrap()).points
}

fn demo_panel() -> LaborMarketPanel {
    let u = demo_series("unemployment.csv");
    let cutover = QuarterKey::new(2001, 1);
    let v = splice_vacancy(&demo_series("vacancy_pre.csv"), &demo_series("vacancy_post.csv"), cutover).unwrap();
    let full = build_panel(&u, &v.points).unwrap();
    let rows = full.slice(QuarterKey::new(1951, 1), QuarterKey::new(2019, 4)).to_vec();
    LaborMarketPanel::from_rows(rows).unwrap()
}

#[test]
fn demo_pipeline_end_to_end() {
    let panel = demo_panel();
    assert_eq!(panel.len(), 276);
    let table = RegimeTable::default_us();
    let fits = fit_all(&panel, &table).unwrap();
    assert_eq!(fits.len(), 7);
    let schedule = build_schedule(&table, &fits, panel.quarters()).unwrap();
    let points = gap_series(&panel, &schedule, 0.72, 0.25).unwrap();
    assert_eq!(points.len(), panel.len());

    let mut last_in_regime: Option<(f64, f64)> = None;
    for (p, row) in points.iter().zip(panel.rows()) {
        assert!(p.u_star > 0.0 && p.u_star < 1.0 && p.theta_star > 0.0);
        assert_eq!(p.gap, p.u - p.u_star);
        let entry = schedule.get(row.quarter).unwrap();
        match assign_regime(row.quarter, &table) {
            Some(r) => {
                let fit = fits.iter().find(|f| f.regime.label == r.label).unwrap();
                assert_eq!(entry.epsilon, fit.estimate.epsilon);
                assert!(!p.is_gap_quarter);
                last_in_regime = Some((entry.epsilon, entry.log_v0));
            }
            None => {
                assert!(p.is_gap_quarter, "{}", row.quarter);
                if let Some(prev) = last_in_regime {
                    assert_eq!((entry.epsilon, entry.log_v0), prev);
                }
            }
        }
        // on-curve data: slack exactly when the gap is positive, outside the tolerance band
        let c = classify(p.theta, p.theta_star, DEFAULT_TOLERANCE);
        match c {
            Classification::InefficientlySlack => assert!(p.gap > 0.0),
            Classification::InefficientlyTight => assert!(p.gap < 0.0),
            Classification::Efficient => {}
        }
    }
}

/// A random run of quarters split into disjoint regimes with gaps between them.
fn table_and_quarters() -> impl Strategy<Value = (RegimeTable, Vec<QuarterKey>)> {
    prop::collection::vec((3usize..12, 0usize..4), 1..6).prop_map(|spans| {
        let mut q = QuarterKey::new(1960, 1);
        let mut regimes = Vec::new();
        for (i, (len, gap)) in spans.into_iter().enumerate() {
            let start = q;
            for _ in 1..len {
                q = q.next();
            }
            regimes.push(Regime::new(format!("r{i}"), start, q));
            for _ in 0..=gap {
                q = q.next();
            }
        }
        let mut quarters = Vec::new();
        let mut k = QuarterKey::new(1959, 3);
        while k <= q {
            quarters.push(k);
            k = k.next();
        }
        (RegimeTable::new(regimes).unwrap(), quarters)
    })
}

proptest! {
    #[test]
    fn carry_forward_matches_last_in_regime_quarter((table, quarters) in table_and_quarters()) {
        let fits: Vec<RegimeFit> = table
            .regimes()
            .iter()
            .enumerate()
            .map(|(i, r)| RegimeFit {
                regime: r.clone(),
                estimate: ElasticityEstimate {
                    epsilon: 0.8 + 0.1 * i as f64,
                    log_v0: -6.0 - 0.1 * i as f64,
                    se_epsilon: 0.05,
                    r_squared: 0.9,
                    n_obs: 10,
                },
            })
            .collect();
        let schedule = build_schedule(&table, &fits, quarters.iter().copied()).unwrap();
        prop_assert_eq!(schedule.len(), quarters.len());
        let mut last = None;
        for &q in &quarters {
            let e = schedule.get(q).unwrap();
            prop_assert!(e.epsilon > 0.0);
            if let Some(r) = assign_regime(q, &table) {
                prop_assert!(!e.is_gap_quarter);
                prop_assert_eq!(&e.regime, &r.label);
                last = Some(e.clone());
            } else {
                prop_assert!(e.is_gap_quarter);
                match &last {
                    Some(prev) => prop_assert_eq!((e.epsilon, e.log_v0), (prev.epsilon, prev.log_v0)),
                    None => prop_assert_eq!(&e.regime, &table.regimes()[0].label),
                }
            }
        }
    }

    #[test]
    fn dmp_zeta_is_homogeneous_in_p_and_z(p in 0.1f64..10.0, share in 0.0f64..0.95, scale in 0.1f64..10.0) {
        let base = DmpEconomy { alpha: 0.5, mu: 0.6, s: 0.035, p, z: share * p, c: 0.72, labor_force: 1.0 };
        let scaled = DmpEconomy { p: p * scale, z: share * p * scale, ..base };
        prop_assert!((dmp_stats(&base).zeta - dmp_stats(&scaled).zeta).abs() < 1e-12);
    }

    #[test]
    fn gap_series_u_star_rises_with_zeta(u in 0.02f64..0.15, v in 0.01f64..0.08, z in 0.0f64..0.9) {
        let panel = LaborMarketPanel::from_rows(vec![PanelRow::new(QuarterKey::new(2000, 1), u, v).unwrap()]).unwrap();
        let schedule = beveridge_gap::ElasticitySchedule::constant(panel.quarters(), 1.0, -6.0, "all");
        let lo = gap_series(&panel, &schedule, 0.72, z).unwrap()[0].u_star;
        let hi = gap_series(&panel, &schedule, 0.72, z + 0.05).unwrap()[0].u_star;
        prop_assert!(hi > lo);
    }
}
