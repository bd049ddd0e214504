//! Ground truth for the closed-form formulas.
//!
//! A steady-state matching economy supplies Beveridge curves; a numerical
//! planner maximizes welfare along a curve by bracketed golden-section search.
//! The checks here compare that optimum against the formulas in
//! [`crate::gap`] without sharing any code path with them.

pub mod optim;
pub mod synth;

use serde::Serialize;
use thiserror::Error;

use crate::calibration::SufficientStats;
use crate::fit::{fit_elasticity, ElasticityEstimate, FitError};
use crate::gap::efficient_unemployment;
use crate::quarter::QuarterKey;
use optim::{bisect_root, maximize_bracketed};

pub use synth::{parse_shock_csv, synth_panel, Scenario, Shock};

/// Default planner search interval for the unemployment rate.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-4, 0.5);
const GRID_POINTS: usize = 400;
const SEARCH_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum PlannerError {
    #[error("{what} = {value} violates {requirement}")]
    Domain {
        what: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("could not bracket the compensating curve location")]
    NoCompensation,
    #[error("estimation failed: {0}")]
    Fit(#[from] FitError),
    #[error("shock file line {line}: {message}")]
    ShockParse { line: u64, message: String },
    #[error("scenario: {0}")]
    Scenario(String),
}

fn domain(what: &'static str, value: f64, requirement: &'static str) -> PlannerError {
    PlannerError::Domain {
        what,
        value,
        requirement,
    }
}

/// Steady-state matching economy with Cobb-Douglas matching
/// `m(u, v) = mu * u^alpha * v^(1 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DmpEconomy {
    pub alpha: f64,
    pub mu: f64,
    /// Job-separation rate.
    pub s: f64,
    /// Productivity of employed workers.
    pub p: f64,
    /// Productivity of unemployed workers.
    pub z: f64,
    /// Vacancy cost in units of `p`.
    pub c: f64,
    pub labor_force: f64,
}

impl DmpEconomy {
    pub fn validate(&self) -> Result<(), PlannerError> {
        let check = |ok: bool, what, value, req| if ok { Ok(()) } else { Err(domain(what, value, req)) };
        check(self.alpha > 0.0 && self.alpha < 1.0, "alpha", self.alpha, "0 < alpha < 1")?;
        check(self.mu > 0.0, "mu", self.mu, "mu > 0")?;
        check(self.s > 0.0, "s", self.s, "s > 0")?;
        check(self.p > 0.0, "p", self.p, "p > 0")?;
        check(self.z >= 0.0 && self.z < self.p, "z", self.z, "0 <= z < p")?;
        check(self.c >= 0.0, "c", self.c, "c >= 0")?;
        check(self.labor_force > 0.0, "labor_force", self.labor_force, "L > 0")?;
        Ok(())
    }

    fn curve_at(&self, u: f64) -> f64 {
        (self.s * (1.0 - u) / (self.mu * u.powf(self.alpha))).powf(1.0 / (1.0 - self.alpha))
    }
}

/// Vacancy rate on the steady-state curve: `[s(1-u) / (mu u^alpha)]^(1/(1-alpha))`.
pub fn dmp_beveridge(econ: &DmpEconomy, u: f64) -> Result<f64, PlannerError> {
    if !(u > 0.0 && u < 1.0) {
        return Err(domain("u", u, "0 < u < 1"));
    }
    Ok(econ.curve_at(u))
}

/// `(p n + z u - p c v) L` with `n = 1 - u`.
pub fn dmp_welfare(econ: &DmpEconomy, u: f64, v: f64) -> f64 {
    (econ.p * (1.0 - u) + econ.z * u - econ.p * econ.c * v) * econ.labor_force
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DmpStats {
    pub zeta: f64,
    pub kappa: f64,
}

pub fn dmp_stats(econ: &DmpEconomy) -> DmpStats {
    DmpStats {
        zeta: econ.z / econ.p,
        kappa: econ.c,
    }
}

/// A feasible set of (u, v) pairs.
pub trait BeveridgeCurve {
    fn vacancies(&self, u: f64) -> f64;
    /// dv/du.
    fn slope(&self, u: f64) -> f64;
}

/// `v(u) = v0 * u^(-epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsoelasticCurve {
    pub v0: f64,
    pub epsilon: f64,
}

impl IsoelasticCurve {
    pub fn new(v0: f64, epsilon: f64) -> Result<Self, PlannerError> {
        if !(v0 > 0.0) {
            return Err(domain("v0", v0, "v0 > 0"));
        }
        if !(epsilon > 0.0) {
            return Err(domain("epsilon", epsilon, "epsilon > 0"));
        }
        Ok(IsoelasticCurve { v0, epsilon })
    }
}

impl BeveridgeCurve for IsoelasticCurve {
    fn vacancies(&self, u: f64) -> f64 {
        self.v0 * u.powf(-self.epsilon)
    }

    fn slope(&self, u: f64) -> f64 {
        -self.epsilon * self.v0 * u.powf(-self.epsilon - 1.0)
    }
}

impl BeveridgeCurve for DmpEconomy {
    fn vacancies(&self, u: f64) -> f64 {
        self.curve_at(u)
    }

    fn slope(&self, u: f64) -> f64 {
        let v = self.curve_at(u);
        -v / (1.0 - self.alpha) * (1.0 / (1.0 - u) + self.alpha / u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlannerSolution {
    pub u_star: f64,
    pub v_star: f64,
    pub theta_star: f64,
    /// Welfare per member of the labor force, in units of employed output.
    pub welfare: f64,
    /// Curve slope dv/du at the optimum.
    pub slope: f64,
    pub iterations: usize,
    /// The optimum sits on an end of the search interval.
    pub at_boundary: bool,
}

/// Maximize `(1 - u) + zeta u - kappa v(u)` along `curve` over the default bracket.
pub fn solve_planner_numeric<C: BeveridgeCurve + ?Sized>(
    curve: &C,
    zeta: f64,
    kappa: f64,
) -> Result<PlannerSolution, PlannerError> {
    solve_planner_in(curve, zeta, kappa, DEFAULT_BRACKET)
}

pub fn solve_planner_in<C: BeveridgeCurve + ?Sized>(
    curve: &C,
    zeta: f64,
    kappa: f64,
    bracket: (f64, f64),
) -> Result<PlannerSolution, PlannerError> {
    if !(zeta < 1.0) {
        return Err(domain("zeta", zeta, "zeta < 1"));
    }
    if !(kappa > 0.0) {
        return Err(domain("kappa", kappa, "kappa > 0"));
    }
    let (lo, hi) = bracket;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(domain("bracket", lo, "0 < lo < hi < 1"));
    }
    // The constant 1 is dropped while searching so that the objective keeps
    // full relative precision near the optimum.
    let net = |u: f64| -(1.0 - zeta) * u - kappa * curve.vacancies(u);
    let m = maximize_bracketed(net, lo, hi, GRID_POINTS, SEARCH_TOL);
    let v_star = curve.vacancies(m.x);
    Ok(PlannerSolution {
        u_star: m.x,
        v_star,
        theta_star: v_star / m.x,
        welfare: 1.0 + m.fx,
        slope: curve.slope(m.x),
        iterations: m.iterations,
        at_boundary: m.at_boundary,
    })
}

/// `|v'(u*) + (1 - zeta)/kappa| / ((1 - zeta)/kappa)`.
pub fn tangency_residual(sol: &PlannerSolution, zeta: f64, kappa: f64) -> f64 {
    let target = (1.0 - zeta) / kappa;
    (sol.slope + target).abs() / target
}

fn welfare_on<C: BeveridgeCurve + ?Sized>(curve: &C, zeta: f64, kappa: f64, u: f64) -> f64 {
    (1.0 - u) + zeta * u - kappa * curve.vacancies(u)
}

/// One point of the formula-versus-planner comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub epsilon: f64,
    pub zeta: f64,
    pub kappa: f64,
    pub v0: f64,
    pub u_numeric: f64,
    pub u_formula: f64,
    pub abs_error: f64,
    pub tangency_residual: f64,
    pub second_order_ok: bool,
    pub at_boundary: bool,
}

impl OracleCheck {
    pub fn passed(&self, u_tol: f64, tangency_tol: f64) -> bool {
        self.abs_error < u_tol && self.tangency_residual < tangency_tol && self.second_order_ok && !self.at_boundary
    }
}

/// Parameter grid used by [`oracle_grid`]: 3 x 3 x 3 x 3 = 81 points.
pub const ORACLE_EPSILONS: [f64; 3] = [0.8, 1.0, 1.25];
pub const ORACLE_ZETAS: [f64; 3] = [0.0, 0.25, 0.5];
pub const ORACLE_KAPPAS: [f64; 3] = [0.3, 0.72, 1.0];
pub const ORACLE_V0S: [f64; 3] = [1e-4, 1e-3, 1e-2];

/// Compare the numerical optimum with the closed form at one parameter set.
/// The closed form is evaluated from an arbitrary on-curve point (`u = 0.05`).
pub fn oracle_check(epsilon: f64, zeta: f64, kappa: f64, v0: f64) -> Result<OracleCheck, PlannerError> {
    let curve = IsoelasticCurve::new(v0, epsilon)?;
    let sol = solve_planner_numeric(&curve, zeta, kappa)?;
    let u_obs = 0.05;
    let stats = SufficientStats::new(epsilon, kappa, zeta).map_err(|e| PlannerError::Scenario(e.to_string()))?;
    let u_formula = efficient_unemployment(u_obs, curve.vacancies(u_obs), &stats)
        .map_err(|e| PlannerError::Scenario(e.to_string()))?;
    let delta = 1e-3;
    let w_star = welfare_on(&curve, zeta, kappa, sol.u_star);
    let second_order_ok = sol.u_star > delta
        && welfare_on(&curve, zeta, kappa, sol.u_star - delta) < w_star
        && welfare_on(&curve, zeta, kappa, sol.u_star + delta) < w_star;
    Ok(OracleCheck {
        epsilon,
        zeta,
        kappa,
        v0,
        u_numeric: sol.u_star,
        u_formula,
        abs_error: (sol.u_star - u_formula).abs(),
        tangency_residual: tangency_residual(&sol, zeta, kappa),
        second_order_ok,
        at_boundary: sol.at_boundary,
    })
}

pub fn oracle_grid() -> Result<Vec<OracleCheck>, PlannerError> {
    let mut out = Vec::with_capacity(81);
    for &e in &ORACLE_EPSILONS {
        for &z in &ORACLE_ZETAS {
            for &k in &ORACLE_KAPPAS {
                for &v0 in &ORACLE_V0S {
                    out.push(oracle_check(e, z, k, v0)?);
                }
            }
        }
    }
    Ok(out)
}

/// Baseline for comparative statics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlannerScenario {
    pub curve: IsoelasticCurve,
    pub zeta: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbations {
    pub kappa_step: f64,
    pub zeta_step: f64,
    pub v0_factor: f64,
    pub epsilon_step: f64,
}

impl Default for Perturbations {
    fn default() -> Self {
        Perturbations {
            kappa_step: 0.18,
            zeta_step: 0.25,
            v0_factor: 1.5,
            epsilon_step: 0.2,
        }
    }
}

/// Tolerance on efficient tightness under a pure curve shift.
pub const THETA_INVARIANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticsCheck {
    pub name: &'static str,
    pub passed: bool,
    pub u_before: f64,
    pub u_after: f64,
    pub theta_before: f64,
    pub theta_after: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticsReport {
    pub base: PlannerScenario,
    pub perturbations: Perturbations,
    pub checks: Vec<StaticsCheck>,
}

impl StaticsReport {
    pub fn violations(&self) -> impl Iterator<Item = &StaticsCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `v0` that, with elasticity `epsilon`, gives the same maximized welfare as
/// `base`. Root-finding on `ln v0`.
pub fn compensating_v0(base: &PlannerScenario, epsilon: f64) -> Result<f64, PlannerError> {
    let target = solve_planner_numeric(&base.curve, base.zeta, base.kappa)?.welfare;
    let gap = |log_v0: f64| {
        let curve = IsoelasticCurve {
            v0: log_v0.exp(),
            epsilon,
        };
        solve_planner_numeric(&curve, base.zeta, base.kappa)
            .map(|s| s.welfare - target)
            .unwrap_or(f64::NAN)
    };
    let x0 = base.curve.v0.ln();
    // maximized welfare falls as the curve moves out, so widen until the sign flips
    let mut width = 0.5;
    while width < 20.0 {
        let (a, b) = (x0 - width, x0 + width);
        let (ga, gb) = (gap(a), gap(b));
        if ga.is_finite() && gb.is_finite() && ga.signum() != gb.signum() {
            return bisect_root(gap, a, b, 1e-12)
                .map(f64::exp)
                .ok_or(PlannerError::NoCompensation);
        }
        width *= 2.0;
    }
    Err(PlannerError::NoCompensation)
}

/// Verify the four comparative-statics sign patterns numerically.
pub fn comparative_statics_check(base: &PlannerScenario, pert: &Perturbations) -> Result<StaticsReport, PlannerError> {
    for (what, x) in [
        ("kappa_step", pert.kappa_step),
        ("zeta_step", pert.zeta_step),
        ("epsilon_step", pert.epsilon_step),
        ("v0_factor - 1", pert.v0_factor - 1.0),
    ] {
        if !(x > 0.0) {
            return Err(domain(what, x, "positive perturbation"));
        }
    }
    let solve = |curve: &IsoelasticCurve, zeta: f64, kappa: f64| solve_planner_numeric(curve, zeta, kappa);
    let b = solve(&base.curve, base.zeta, base.kappa)?;
    let params = format!(
        "v0={}, epsilon={}, zeta={}, kappa={}",
        base.curve.v0, base.curve.epsilon, base.zeta, base.kappa
    );
    let check = |name: &'static str, after: PlannerSolution, passed: bool, extra: String| StaticsCheck {
        name,
        passed: passed && !after.at_boundary && !b.at_boundary,
        u_before: b.u_star,
        u_after: after.u_star,
        theta_before: b.theta_star,
        theta_after: after.theta_star,
        detail: format!("{params}; {extra}"),
    };

    let mut checks = Vec::with_capacity(4);

    let k = solve(&base.curve, base.zeta, base.kappa + pert.kappa_step)?;
    checks.push(check(
        "kappa_up_raises_u_lowers_theta",
        k,
        k.u_star > b.u_star && k.theta_star < b.theta_star,
        format!("kappa -> {:.6}", base.kappa + pert.kappa_step),
    ));

    let z = solve(&base.curve, base.zeta + pert.zeta_step, base.kappa)?;
    checks.push(check(
        "zeta_up_raises_u_lowers_theta",
        z,
        z.u_star > b.u_star && z.theta_star < b.theta_star,
        format!("zeta -> {:.6}", base.zeta + pert.zeta_step),
    ));

    let shifted = IsoelasticCurve::new(base.curve.v0 * pert.v0_factor, base.curve.epsilon)?;
    let s = solve(&shifted, base.zeta, base.kappa)?;
    let dtheta = (s.theta_star - b.theta_star).abs();
    checks.push(check(
        "v0_up_raises_u_keeps_theta",
        s,
        s.u_star > b.u_star && dtheta < THETA_INVARIANCE_TOL,
        format!("v0 -> {:.6e}; |dtheta*| = {dtheta:.3e}", shifted.v0),
    ));

    let eps = base.curve.epsilon + pert.epsilon_step;
    let v0c = compensating_v0(base, eps)?;
    let comp = IsoelasticCurve::new(v0c, eps)?;
    let c = solve(&comp, base.zeta, base.kappa)?;
    checks.push(check(
        "compensated_epsilon_up_raises_u_lowers_theta",
        c,
        c.u_star > b.u_star && c.theta_star < b.theta_star,
        format!(
            "epsilon -> {eps:.6}, compensating v0 = {v0c:.6e}; |dW*| = {:.3e}",
            (c.welfare - b.welfare).abs()
        ),
    ));

    Ok(StaticsReport {
        base: *base,
        perturbations: *pert,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripRow {
    pub quarter: QuarterKey,
    pub u: f64,
    pub u_star_formula: f64,
    pub rel_error: f64,
}

/// Synthetic panel, fitted curve, and per-quarter formula versus planner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripReport {
    pub planner: PlannerSolution,
    pub fitted: ElasticityEstimate,
    pub rows: Vec<RoundTripRow>,
    pub max_rel_error: f64,
}

/// Fit a single curve to `panel`, evaluate the gap formula at every quarter,
/// and compare with the planner's optimum on the economy's own curve.
pub fn round_trip_check(econ: &DmpEconomy, panel: &crate::ingest::LaborMarketPanel) -> Result<RoundTripReport, PlannerError> {
    econ.validate()?;
    let st = dmp_stats(econ);
    let planner = solve_planner_numeric(econ, st.zeta, st.kappa)?;
    let fitted = fit_elasticity(panel.rows())?;
    let stats = SufficientStats::new(fitted.epsilon, st.kappa, st.zeta).map_err(|e| PlannerError::Scenario(e.to_string()))?;
    let rows: Vec<RoundTripRow> = panel
        .rows()
        .iter()
        .map(|r| {
            let u_star = efficient_unemployment(r.u, r.v, &stats).map_err(|e| PlannerError::Scenario(e.to_string()))?;
            Ok(RoundTripRow {
                quarter: r.quarter,
                u: r.u,
                u_star_formula: u_star,
                rel_error: (u_star - planner.u_star).abs() / planner.u_star,
            })
        })
        .collect::<Result<_, PlannerError>>()?;
    let max_rel_error = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    Ok(RoundTripReport {
        planner,
        fitted,
        rows,
        max_rel_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn econ() -> DmpEconomy {
        DmpEconomy {
            alpha: 0.5,
            mu: 1.2,
            s: 0.035,
            p: 1.0,
            z: 0.25,
            c: 0.72,
            labor_force: 1.0,
        }
    }

    #[test]
    fn dmp_beveridge_examples() {
        // s(1-u) = mu u makes v = u when alpha = 1/2
        let u = 0.05;
        let e = DmpEconomy { mu: 1.0, s: u / (1.0 - u), ..econ() };
        assert!((dmp_beveridge(&e, u).unwrap() - u).abs() < 1e-15);

        let v = dmp_beveridge(&econ(), 0.058).unwrap();
        let hand = (0.035 * 0.942 / (1.2 * 0.058f64.sqrt())).powi(2);
        assert!((v - hand).abs() < 1e-15);
        assert!((v - 0.01302).abs() < 1e-5);

        let grid: Vec<f64> = (1..100).map(|i| dmp_beveridge(&econ(), i as f64 / 100.0).unwrap()).collect();
        assert!(grid.windows(2).all(|w| w[1] < w[0]));
        assert!(dmp_beveridge(&econ(), 1.0).is_err());
    }

    #[test]
    fn dmp_slope_matches_finite_difference() {
        let e = econ();
        for u in [0.02, 0.05, 0.1, 0.3] {
            let h = 1e-6;
            let fd = (e.vacancies(u + h) - e.vacancies(u - h)) / (2.0 * h);
            assert!((e.slope(u) - fd).abs() / fd.abs() < 1e-7);
        }
        let c = IsoelasticCurve::new(0.002, 1.1).unwrap();
        let (u, h) = (0.05, 1e-7);
        let fd = (c.vacancies(u + h) - c.vacancies(u - h)) / (2.0 * h);
        assert!((c.slope(u) - fd).abs() / fd.abs() < 1e-7);
    }

    #[test]
    fn dmp_welfare_examples() {
        let e = DmpEconomy { p: 1.0, z: 0.25, c: 0.72, labor_force: 1.0, ..econ() };
        assert_eq!(dmp_welfare(&e, 0.0, 0.0), 1.0);
        assert!((dmp_welfare(&e, 0.05, 0.03) - 0.9409).abs() < 1e-15);
        let big = DmpEconomy { p: 2.0, labor_force: 3.0, ..e };
        assert_eq!(dmp_welfare(&big, 0.0, 0.0), 6.0);
        assert!(dmp_welfare(&e, 0.05, 0.04) < dmp_welfare(&e, 0.05, 0.03));
    }

    #[test]
    fn dmp_stats_examples() {
        let st = dmp_stats(&econ());
        assert_eq!((st.zeta, st.kappa), (0.25, 0.72));
        let e2 = DmpEconomy { p: 2.0, z: 0.5, ..econ() };
        assert_eq!(dmp_stats(&e2).zeta, 0.25);
        let e3 = DmpEconomy { p: 1.5, z: 0.6, c: 0.9, ..econ() };
        let st = dmp_stats(&e3);
        assert!((st.zeta - 0.4).abs() < 1e-15);
        assert_eq!(st.kappa, 0.9);
    }

    #[test]
    fn validate_rejects_bad_economies() {
        assert!(econ().validate().is_ok());
        assert!(DmpEconomy { z: 1.0, ..econ() }.validate().is_err());
        assert!(DmpEconomy { alpha: 1.0, ..econ() }.validate().is_err());
        assert!(DmpEconomy { s: 0.0, ..econ() }.validate().is_err());
    }

    #[test]
    fn planner_matches_closed_form_on_isoelastic_curve() {
        let curve = IsoelasticCurve::new(0.0016, 1.0).unwrap();
        let sol = solve_planner_numeric(&curve, 0.25, 0.72).unwrap();
        // (kappa eps v0 / (1 - zeta))^(1/(1+eps)), computed by hand
        let closed = (0.72f64 * 0.0016 / 0.75).sqrt();
        assert!((closed - 0.039192).abs() < 1e-6);
        assert!((sol.u_star - closed).abs() < 1e-9, "{} vs {closed}", sol.u_star);
        assert!(tangency_residual(&sol, 0.25, 0.72) < 1e-6);
        assert!((sol.theta_star - 0.75 / 0.72).abs() / (0.75 / 0.72) < 1e-6);
        assert!(!sol.at_boundary);
        assert!((sol.v_star - curve.vacancies(sol.u_star)).abs() < 1e-15);
    }

    #[test]
    fn planner_rejects_bad_inputs() {
        let curve = IsoelasticCurve::new(0.0016, 1.0).unwrap();
        assert!(solve_planner_numeric(&curve, 1.0, 0.72).is_err());
        assert!(solve_planner_numeric(&curve, 0.25, 0.0).is_err());
        assert!(solve_planner_in(&curve, 0.25, 0.72, (0.3, 0.2)).is_err());
    }

    #[test]
    fn planner_flags_boundary_optimum() {
        // very costly vacancies push the optimum past the upper end
        let curve = IsoelasticCurve::new(0.5, 1.0).unwrap();
        let sol = solve_planner_numeric(&curve, 0.25, 100.0).unwrap();
        assert!(sol.at_boundary);
    }

    #[test]
    fn oracle_grid_agrees() {
        let grid = oracle_grid().unwrap();
        assert_eq!(grid.len(), 81);
        for c in &grid {
            assert!(c.passed(1e-6, 1e-6), "{c:?}");
        }
    }

    #[test]
    fn comparative_statics_all_hold() {
        let base = PlannerScenario {
            curve: IsoelasticCurve::new(0.0016, 1.0).unwrap(),
            zeta: 0.25,
            kappa: 0.72,
        };
        let r = comparative_statics_check(&base, &Perturbations::default()).unwrap();
        assert_eq!(r.checks.len(), 4);
        assert!(r.all_passed(), "{:#?}", r.checks);
        let shift = &r.checks[2];
        assert!((shift.theta_after - shift.theta_before).abs() < THETA_INVARIANCE_TOL);
    }

    #[test]
    fn compensated_curve_keeps_welfare() {
        let base = PlannerScenario {
            curve: IsoelasticCurve::new(0.0016, 1.0).unwrap(),
            zeta: 0.25,
            kappa: 0.72,
        };
        let v0 = compensating_v0(&base, 1.3).unwrap();
        let w0 = solve_planner_numeric(&base.curve, 0.25, 0.72).unwrap().welfare;
        let w1 = solve_planner_numeric(&IsoelasticCurve::new(v0, 1.3).unwrap(), 0.25, 0.72)
            .unwrap()
            .welfare;
        assert!((w0 - w1).abs() < 1e-10);
    }

    #[test]
    fn statics_rejects_non_positive_steps() {
        let base = PlannerScenario {
            curve: IsoelasticCurve::new(0.0016, 1.0).unwrap(),
            zeta: 0.25,
            kappa: 0.72,
        };
        let bad = Perturbations { kappa_step: 0.0, ..Perturbations::default() };
        assert!(comparative_statics_check(&base, &bad).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn tangency_and_second_order(e in 0.6f64..1.6, z in -0.2f64..0.7, k in 0.2f64..1.5, lv in -9.0f64..-4.0) {
            let c = oracle_check(e, z, k, lv.exp()).unwrap();
            prop_assume!(!c.at_boundary && c.u_numeric > 2e-3);
            prop_assert!(c.tangency_residual < 1e-6, "{:?}", c);
            prop_assert!(c.second_order_ok);
            prop_assert!(c.abs_error < 1e-6);
        }
    }
}
