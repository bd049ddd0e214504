//! In-memory analysis stages. Commands call these and then write artifacts;
//! nothing here touches the output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use beveridge_gap::calibration::{CalibrationProfile, ZetaBounds};
use beveridge_gap::fit::{fit_each, RegimeFit};
use beveridge_gap::gap::{
    gap_series_with, implied_zeta_series, sensitivity_with, GapOptions, GapPoint, ImpliedZetaPoint, Sensitivity,
};
use beveridge_gap::ingest::{
    build_panel, parse_series_csv, splice_vacancy, to_quarterly, DroppedQuarter, SpliceAudit,
};
use beveridge_gap::regimes::build_schedule;
use beveridge_gap::{ElasticitySchedule, LaborMarketPanel, QuarterKey, Regime, RegimeTable};
use serde::Serialize;

use crate::config::RunConfig;

pub fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {what} file {}", path.display()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Dropped {
    pub series: &'static str,
    pub quarter: QuarterKey,
    pub months_present: usize,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub panel: LaborMarketPanel,
    pub splice: Option<SpliceAudit>,
    pub dropped: Vec<Dropped>,
}

fn quarterly(path: &Path, what: &'static str, cfg: &RunConfig, dropped: &mut Vec<Dropped>) -> Result<Vec<beveridge_gap::ingest::QuarterlyPoint>> {
    let monthly = parse_series_csv(&read(path, what)?, cfg.unit).with_context(|| format!("{what} file {}", path.display()))?;
    let q = to_quarterly(&monthly);
    dropped.extend(q.dropped.iter().map(|d: &DroppedQuarter| Dropped {
        series: what,
        quarter: d.quarter,
        months_present: d.months_present,
    }));
    Ok(q.points)
}

/// Load the panel, either ready-made or from the raw monthly series, and
/// restrict it to the configured window.
pub fn ingest(cfg: &RunConfig) -> Result<Ingested> {
    let (panel, splice, dropped) = if let Some(path) = &cfg.panel {
        let panel = LaborMarketPanel::from_csv(&read(path, "panel")?).with_context(|| format!("panel file {}", path.display()))?;
        (panel, None, Vec::new())
    } else {
        let need = |p: &Option<std::path::PathBuf>, key: &str| {
            p.clone().ok_or_else(|| anyhow!("no [data] {key} configured (or give [data] panel)"))
        };
        let mut dropped = Vec::new();
        let u = quarterly(&need(&cfg.unemployment, "unemployment")?, "unemployment", cfg, &mut dropped)?;
        let pre = quarterly(&need(&cfg.vacancy_pre, "vacancy_pre")?, "vacancy", cfg, &mut dropped)?;
        let (v, splice) = match &cfg.vacancy_post {
            Some(path) => {
                let post = quarterly(path, "vacancy", cfg, &mut dropped)?;
                let s = splice_vacancy(&pre, &post, cfg.cutover).context("splicing vacancy sources")?;
                (s.points, Some(s.audit))
            }
            None => (pre, None),
        };
        (build_panel(&u, &v).context("building panel")?, splice, dropped)
    };
    let panel = window(panel, cfg.start, cfg.end)?;
    Ok(Ingested { panel, splice, dropped })
}

fn window(panel: LaborMarketPanel, start: Option<QuarterKey>, end: Option<QuarterKey>) -> Result<LaborMarketPanel> {
    if start.is_none() && end.is_none() {
        return Ok(panel);
    }
    let (Some(first), Some(last)) = (panel.first_quarter(), panel.last_quarter()) else {
        return Ok(panel);
    };
    let rows = panel.slice(start.unwrap_or(first), end.unwrap_or(last)).to_vec();
    if rows.is_empty() {
        bail!("no panel quarters inside the configured window");
    }
    Ok(LaborMarketPanel::from_rows(rows)?)
}

pub fn regime_table(cfg: &RunConfig) -> Result<RegimeTable> {
    match &cfg.regimes {
        None => Ok(RegimeTable::default_us()),
        Some(path) => RegimeTable::parse(&read(path, "regime")?).with_context(|| format!("regime file {}", path.display())),
    }
}

#[derive(Debug, Clone)]
pub struct Fitted {
    pub fits: Vec<RegimeFit>,
    pub failures: Vec<(Regime, String)>,
}

pub fn fit(cfg: &RunConfig, panel: &LaborMarketPanel, table: &RegimeTable) -> Fitted {
    let mut out = Fitted {
        fits: Vec::new(),
        failures: Vec::new(),
    };
    for (regime, res) in fit_each(panel, table, cfg.se) {
        match res {
            Ok(estimate) => out.fits.push(RegimeFit { regime, estimate }),
            Err(e) => out.failures.push((regime, e.to_string())),
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub kappa: f64,
    pub zeta: f64,
    pub benefit_offset: f64,
    pub zeta_bounds: ZetaBounds,
    #[serde(skip)]
    pub profile: CalibrationProfile,
}

pub fn calibrate(cfg: &RunConfig) -> Result<Calibration> {
    let profile = match &cfg.profile {
        None => CalibrationProfile::default(),
        Some(path) => CalibrationProfile::parse(&read(path, "calibration profile")?)
            .with_context(|| format!("calibration profile {}", path.display()))?,
    };
    let kappa = match cfg.kappa {
        Some(k) => k,
        None => profile.kappa()?,
    };
    if !(kappa > 0.0) {
        bail!("kappa = {kappa} must be positive");
    }
    Ok(Calibration {
        kappa,
        zeta: cfg.zeta.unwrap_or(profile.zeta),
        benefit_offset: profile.benefit_offset(),
        zeta_bounds: profile.zeta_bounds()?,
        profile,
    })
}

/// `regime,kappa` rows.
pub fn kappa_overrides(cfg: &RunConfig, table: &RegimeTable) -> Result<BTreeMap<String, f64>> {
    let Some(path) = &cfg.kappa_overrides else {
        return Ok(BTreeMap::new());
    };
    let text = read(path, "kappa override")?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for rec in rdr.deserialize::<(String, f64)>() {
        let (label, kappa) = rec.with_context(|| format!("kappa override file {}", path.display()))?;
        if table.get(&label).is_none() {
            bail!("kappa override for unknown regime `{label}`");
        }
        if !(kappa > 0.0) {
            bail!("kappa override for `{label}` must be positive");
        }
        out.insert(label, kappa);
    }
    Ok(out)
}

/// `start,end` quarters, inclusive.
pub fn recessions(cfg: &RunConfig) -> Result<Vec<(QuarterKey, QuarterKey)>> {
    let Some(path) = &cfg.recessions else {
        return Ok(Vec::new());
    };
    let text = read(path, "recession")?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.with_context(|| format!("recession file {}", path.display()))?;
        let parse = |i: usize| {
            rec.get(i)
                .unwrap_or("")
                .parse::<QuarterKey>()
                .map_err(|e| anyhow!("recession file {}: {e}", path.display()))
        };
        let (a, b) = (parse(0)?, parse(1)?);
        if b < a {
            bail!("recession {a}..{b} ends before it starts");
        }
        out.push((a, b));
    }
    Ok(out)
}

/// Everything downstream of the fit.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub ingested: Ingested,
    pub table: RegimeTable,
    pub fitted: Fitted,
    pub calibration: Calibration,
    pub schedule: ElasticitySchedule,
    pub options: GapOptions,
}

impl Analysis {
    pub fn run(cfg: &RunConfig) -> Result<Self> {
        let ingested = ingest(cfg)?;
        if ingested.panel.is_empty() {
            bail!("panel is empty");
        }
        let table = regime_table(cfg)?;
        let fitted = fit(cfg, &ingested.panel, &table);
        if let Some((regime, err)) = fitted.failures.first() {
            bail!("cannot build elasticity schedule: regime {} failed: {err}", regime.label);
        }
        let calibration = calibrate(cfg)?;
        let schedule = build_schedule(&table, &fitted.fits, ingested.panel.quarters())?;
        let options = GapOptions {
            tolerance: cfg.tolerance,
            kappa_overrides: kappa_overrides(cfg, &table)?,
        };
        Ok(Analysis {
            ingested,
            table,
            fitted,
            calibration,
            schedule,
            options,
        })
    }

    pub fn panel(&self) -> &LaborMarketPanel {
        &self.ingested.panel
    }

    pub fn gap(&self) -> Result<Vec<GapPoint>> {
        Ok(gap_series_with(
            self.panel(),
            &self.schedule,
            self.calibration.kappa,
            self.calibration.zeta,
            &self.options,
        )?)
    }

    pub fn gap_at(&self, zeta: f64) -> Result<Vec<GapPoint>> {
        Ok(gap_series_with(self.panel(), &self.schedule, self.calibration.kappa, zeta, &self.options)?)
    }

    pub fn sensitivity(&self, zetas: &[f64], exclude_gap_quarters: bool) -> Result<Sensitivity> {
        Ok(sensitivity_with(
            self.panel(),
            &self.schedule,
            self.calibration.kappa,
            zetas,
            self.calibration.zeta,
            &self.options,
            exclude_gap_quarters,
        )?)
    }

    pub fn implied_zeta(&self) -> Result<Vec<ImpliedZetaPoint>> {
        Ok(implied_zeta_series(self.panel(), &self.schedule, self.calibration.kappa)?)
    }
}
