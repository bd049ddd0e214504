//! Synthetic panels from a shocked steady-state matching economy.
//!
//! Separation shocks pick the point on the curve: with the job-finding rate
//! `f` held where the unshocked economy sits at `u_base`, a multiplier `m_s`
//! gives `u = s m_s / (s m_s + f)`, and `v` is read off the steady-state
//! curve at the baseline `s`. Efficiency shocks multiply `mu` and shift the
//! curve itself.

use std::f64::consts::TAU;

use ini::Ini;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{DmpEconomy, IsoelasticCurve, Perturbations, PlannerError, PlannerScenario};
use crate::ingest::{LaborMarketPanel, PanelRow};
use crate::quarter::QuarterKey;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shock {
    pub quarter: QuarterKey,
    pub s_mult: f64,
    pub mu_mult: f64,
}

/// Parse `quarter,s_multiplier,mu_multiplier` rows.
pub fn parse_shock_csv(text: &str) -> Result<Vec<Shock>, PlannerError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let err = |line: u64, message: String| PlannerError::ShockParse { line, message };
    let headers = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let expected = ["quarter", "s_multiplier", "mu_multiplier"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(err(1, format!("expected header `{}`", expected.join(","))));
    }
    let mut out: Vec<Shock> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let quarter: QuarterKey = rec[0].parse().map_err(|e| err(line, format!("{e}")))?;
        let num = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| err(line, format!("bad number `{}`", &rec[i])))
        };
        let shock = Shock {
            quarter,
            s_mult: num(1)?,
            mu_mult: num(2)?,
        };
        if let Some(prev) = out.last() {
            if shock.quarter <= prev.quarter {
                return Err(err(line, format!("{} does not follow {}", shock.quarter, prev.quarter)));
            }
        }
        out.push(shock);
    }
    Ok(out)
}

/// One full sine cycle in the separation rate over `n` quarters.
pub fn sinusoidal_shocks(start: QuarterKey, n: usize, s_amplitude: f64, mu_amplitude: f64) -> Vec<Shock> {
    let mut q = start;
    (0..n)
        .map(|t| {
            let phase = (TAU * t as f64 / n as f64).sin();
            let shock = Shock {
                quarter: q,
                s_mult: 1.0 + s_amplitude * phase,
                mu_mult: 1.0 + mu_amplitude * phase,
            };
            q = q.next();
            shock
        })
        .collect()
}

/// Place each quarter on its shocked steady-state curve, then apply
/// independent log-normal noise of scale `noise_scale` to u and v.
pub fn synth_panel(
    econ: &DmpEconomy,
    u_base: f64,
    shocks: &[Shock],
    noise_scale: f64,
    seed: u64,
) -> Result<LaborMarketPanel, PlannerError> {
    econ.validate()?;
    if !(u_base > 0.0 && u_base < 1.0) {
        return Err(PlannerError::Domain {
            what: "u_base",
            value: u_base,
            requirement: "0 < u_base < 1",
        });
    }
    if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
        return Err(PlannerError::Domain {
            what: "noise_scale",
            value: noise_scale,
            requirement: "noise_scale >= 0",
        });
    }
    let finding = econ.s * (1.0 - u_base) / u_base;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(shocks.len());
    for shock in shocks {
        for (what, m) in [("s_multiplier", shock.s_mult), ("mu_multiplier", shock.mu_mult)] {
            if !(m > 0.0 && m.is_finite()) {
                return Err(PlannerError::Domain {
                    what,
                    value: m,
                    requirement: "multiplier > 0",
                });
            }
        }
        let s = econ.s * shock.s_mult;
        let u = s / (s + finding);
        let shifted = DmpEconomy {
            mu: econ.mu * shock.mu_mult,
            ..*econ
        };
        let v = shifted.curve_at(u);
        let zu: f64 = StandardNormal.sample(&mut rng);
        let zv: f64 = StandardNormal.sample(&mut rng);
        let (u, v) = (u * (noise_scale * zu).exp(), v * (noise_scale * zv).exp());
        let row = PanelRow::new(shock.quarter, u, v).map_err(|_| PlannerError::Domain {
            what: if u > 0.0 && u < 1.0 { "synthetic v" } else { "synthetic u" },
            value: if u > 0.0 && u < 1.0 { v } else { u },
            requirement: "rate in (0,1)",
        })?;
        rows.push(row);
    }
    LaborMarketPanel::from_rows(rows).map_err(|e| PlannerError::Scenario(e.to_string()))
}

/// Everything `simulate` needs: an economy, a shock path, and the base point
/// for comparative statics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub economy: DmpEconomy,
    pub u_base: f64,
    pub noise_scale: f64,
    pub seed: u64,
    pub start: QuarterKey,
    pub quarters: usize,
    pub s_amplitude: f64,
    pub mu_amplitude: f64,
    /// Shock CSV path, relative to the scenario file. Overrides the sine path.
    pub shocks: Option<String>,
    pub statics: PlannerScenario,
    pub perturbations: Perturbations,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, PlannerError> {
        let ini = Ini::load_from_str(text).map_err(|e| PlannerError::Scenario(e.to_string()))?;
        let raw = |section: &str, key: &str| ini.section(Some(section)).and_then(|s| s.get(key)).map(str::trim);
        let num = |section: &str, key: &str, default: Option<f64>| -> Result<f64, PlannerError> {
            match (raw(section, key), default) {
                (Some(r), _) => r
                    .parse::<f64>()
                    .map_err(|_| PlannerError::Scenario(format!("[{section}] {key}: bad number `{r}`"))),
                (None, Some(d)) => Ok(d),
                (None, None) => Err(PlannerError::Scenario(format!("missing [{section}] {key}"))),
            }
        };
        let economy = DmpEconomy {
            alpha: num("economy", "alpha", None)?,
            mu: num("economy", "mu", None)?,
            s: num("economy", "s", None)?,
            p: num("economy", "p", Some(1.0))?,
            z: num("economy", "z", None)?,
            c: num("economy", "c", None)?,
            labor_force: num("economy", "labor_force", Some(1.0))?,
        };
        economy.validate()?;
        let seed = match raw("simulation", "seed") {
            Some(r) => r
                .parse::<u64>()
                .map_err(|_| PlannerError::Scenario(format!("[simulation] seed: bad integer `{r}`")))?,
            None => 0,
        };
        let start = match raw("simulation", "start") {
            Some(r) => r
                .parse::<QuarterKey>()
                .map_err(|e| PlannerError::Scenario(format!("[simulation] start: {e}")))?,
            None => QuarterKey::new(2000, 1),
        };
        let quarters = num("simulation", "quarters", Some(40.0))?;
        if !(quarters >= 3.0 && quarters.fract() == 0.0) {
            return Err(PlannerError::Scenario(format!("[simulation] quarters must be an integer >= 3, got {quarters}")));
        }
        let defaults = Perturbations::default();
        let zeta = economy.z / economy.p;
        let statics = PlannerScenario {
            curve: IsoelasticCurve::new(num("statics", "v0", Some(0.0016))?, num("statics", "epsilon", Some(1.0))?)?,
            zeta: num("statics", "zeta", Some(zeta))?,
            kappa: num("statics", "kappa", Some(economy.c))?,
        };
        Ok(Scenario {
            economy,
            u_base: num("simulation", "u_base", None)?,
            noise_scale: num("simulation", "noise_scale", Some(0.0))?,
            seed,
            start,
            quarters: quarters as usize,
            s_amplitude: num("simulation", "s_amplitude", Some(0.1))?,
            mu_amplitude: num("simulation", "mu_amplitude", Some(0.0))?,
            shocks: raw("simulation", "shocks").filter(|s| !s.is_empty()).map(String::from),
            statics,
            perturbations: Perturbations {
                kappa_step: num("perturbations", "kappa_step", Some(defaults.kappa_step))?,
                zeta_step: num("perturbations", "zeta_step", Some(defaults.zeta_step))?,
                v0_factor: num("perturbations", "v0_factor", Some(defaults.v0_factor))?,
                epsilon_step: num("perturbations", "epsilon_step", Some(defaults.epsilon_step))?,
            },
        })
    }

    /// Shock path generated from the sine settings.
    pub fn generated_shocks(&self) -> Vec<Shock> {
        sinusoidal_shocks(self.start, self.quarters, self.s_amplitude, self.mu_amplitude)
    }
}
