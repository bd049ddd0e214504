//! Sufficient-statistic formulas for efficient tightness, the efficient
//! unemployment rate, and the unemployment gap, plus time-series evaluation
//! and sensitivity sweeps over the social value of nonwork.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::calibration::{CalibrationError, SufficientStats};
use crate::ingest::{fmt_value, LaborMarketPanel};
use crate::quarter::QuarterKey;
use crate::regimes::ElasticitySchedule;

/// Default relative tolerance on tightness for calling a quarter efficient.
pub const DEFAULT_TOLERANCE: f64 = 0.01;

/// Baseline social value of nonwork, the reference for sensitivity shifts.
pub const BASELINE_ZETA: f64 = 0.25;

/// Social values of nonwork swept by default.
pub const DEFAULT_ZETAS: [f64; 4] = [0.0, 0.25, 0.5, 0.96];

#[derive(Debug, Error, PartialEq)]
pub enum GapError {
    #[error("u and v must be positive (got u={u}, v={v})")]
    NonPositive { u: f64, v: f64 },
    #[error("{quarter}: {source}")]
    AtQuarter {
        quarter: QuarterKey,
        #[source]
        source: Box<GapError>,
    },
    #[error("no elasticity scheduled for {0}")]
    Unscheduled(QuarterKey),
    #[error(transparent)]
    Stats(#[from] CalibrationError),
    #[error("zeta list is empty")]
    NoZetas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    InefficientlySlack,
    InefficientlyTight,
    Efficient,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::InefficientlySlack => "inefficiently_slack",
            Classification::InefficientlyTight => "inefficiently_tight",
            Classification::Efficient => "efficient",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `(1 - zeta) / (kappa * epsilon)`.
pub fn efficient_tightness(stats: &SufficientStats) -> f64 {
    (1.0 - stats.zeta) / (stats.kappa * stats.epsilon)
}

pub fn classify(theta: f64, theta_star: f64, tol: f64) -> Classification {
    if theta > theta_star * (1.0 + tol) {
        Classification::InefficientlyTight
    } else if theta < theta_star * (1.0 - tol) {
        Classification::InefficientlySlack
    } else {
        Classification::Efficient
    }
}

/// `u* = [kappa * epsilon / (1 - zeta) * v / u]^(1 / (1 + epsilon)) * u`.
///
/// The result is returned even when it is 1 or more; see [`is_admissible_rate`].
pub fn efficient_unemployment(u: f64, v: f64, stats: &SufficientStats) -> Result<f64, GapError> {
    if !(u > 0.0 && v > 0.0) {
        return Err(GapError::NonPositive { u, v });
    }
    let ratio = stats.kappa * stats.epsilon / (1.0 - stats.zeta) * (v / u);
    Ok(ratio.powf(1.0 / (1.0 + stats.epsilon)) * u)
}

pub fn is_admissible_rate(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

pub fn unemployment_gap(u: f64, u_star: f64) -> f64 {
    u - u_star
}

/// Social value of nonwork that would make tightness `theta` efficient:
/// `1 - kappa * epsilon * theta`.
pub fn implied_zeta(theta: f64, kappa: f64, epsilon: f64) -> f64 {
    1.0 - kappa * epsilon * theta
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapPoint {
    pub quarter: QuarterKey,
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub u_star: f64,
    pub theta_star: f64,
    pub gap: f64,
    pub classification: Classification,
    pub is_gap_quarter: bool,
    /// `u_star` fell outside (0, 1).
    pub out_of_range: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GapOptions {
    pub tolerance: f64,
    /// Per-regime recruiting costs keyed by schedule regime label.
    pub kappa_overrides: BTreeMap<String, f64>,
}

impl GapOptions {
    pub fn new() -> Self {
        GapOptions {
            tolerance: DEFAULT_TOLERANCE,
            kappa_overrides: BTreeMap::new(),
        }
    }
}

/// Evaluate the formulas quarter by quarter with that quarter's elasticity.
pub fn gap_series(
    panel: &LaborMarketPanel,
    schedule: &ElasticitySchedule,
    kappa: f64,
    zeta: f64,
) -> Result<Vec<GapPoint>, GapError> {
    gap_series_with(panel, schedule, kappa, zeta, &GapOptions::new())
}

pub fn gap_series_with(
    panel: &LaborMarketPanel,
    schedule: &ElasticitySchedule,
    kappa: f64,
    zeta: f64,
    opts: &GapOptions,
) -> Result<Vec<GapPoint>, GapError> {
    panel
        .rows()
        .iter()
        .map(|row| {
            let at = |e: GapError| GapError::AtQuarter {
                quarter: row.quarter,
                source: Box::new(e),
            };
            let entry = schedule.get(row.quarter).ok_or(GapError::Unscheduled(row.quarter))?;
            let kappa = opts.kappa_overrides.get(&entry.regime).copied().unwrap_or(kappa);
            let stats = SufficientStats::new(entry.epsilon, kappa, zeta).map_err(|e| at(e.into()))?;
            let theta_star = efficient_tightness(&stats);
            let u_star = efficient_unemployment(row.u, row.v, &stats).map_err(at)?;
            Ok(GapPoint {
                quarter: row.quarter,
                u: row.u,
                v: row.v,
                theta: row.theta,
                epsilon: entry.epsilon,
                kappa,
                u_star,
                theta_star,
                gap: unemployment_gap(row.u, u_star),
                classification: classify(row.theta, theta_star, opts.tolerance),
                is_gap_quarter: entry.is_gap_quarter,
                out_of_range: !is_admissible_rate(u_star),
            })
        })
        .collect()
}

/// `quarter,u,v,theta,epsilon,u_star,theta_star,gap,classification,is_gap_quarter`
pub fn gap_to_csv(points: &[GapPoint]) -> String {
    let mut out = String::from("quarter,u,v,theta,epsilon,u_star,theta_star,gap,classification,is_gap_quarter\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            p.quarter,
            fmt_value(p.u),
            fmt_value(p.v),
            fmt_value(p.theta),
            fmt_value(p.epsilon),
            fmt_value(p.u_star),
            fmt_value(p.theta_star),
            fmt_value(p.gap),
            p.classification,
            p.is_gap_quarter
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extreme {
    pub quarter: QuarterKey,
    pub value: f64,
}

/// Unweighted quarterly averages and extremes of a gap series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSummary {
    pub n_quarters: usize,
    pub mean_u: f64,
    pub mean_u_star: f64,
    pub mean_gap: f64,
    pub min_gap: Extreme,
    pub max_gap: Extreme,
    pub n_out_of_range: usize,
    pub share_slack: f64,
    pub share_tight: f64,
}

impl GapSummary {
    /// `None` when no quarter survives the filter.
    pub fn from_points(points: &[GapPoint], exclude_gap_quarters: bool) -> Option<Self> {
        let kept: Vec<&GapPoint> = points
            .iter()
            .filter(|p| !(exclude_gap_quarters && p.is_gap_quarter))
            .collect();
        let first = kept.first()?;
        let n = kept.len() as f64;
        let mean = |f: fn(&GapPoint) -> f64| kept.iter().map(|p| f(p)).sum::<f64>() / n;
        let mut min_gap = Extreme { quarter: first.quarter, value: first.gap };
        let mut max_gap = min_gap;
        for p in &kept {
            if p.gap < min_gap.value {
                min_gap = Extreme { quarter: p.quarter, value: p.gap };
            }
            if p.gap > max_gap.value {
                max_gap = Extreme { quarter: p.quarter, value: p.gap };
            }
        }
        let share = |c: Classification| kept.iter().filter(|p| p.classification == c).count() as f64 / n;
        Some(GapSummary {
            n_quarters: kept.len(),
            mean_u: mean(|p| p.u),
            mean_u_star: mean(|p| p.u_star),
            mean_gap: mean(|p| p.gap),
            min_gap,
            max_gap,
            n_out_of_range: kept.iter().filter(|p| p.out_of_range).count(),
            share_slack: share(Classification::InefficientlySlack),
            share_tight: share(Classification::InefficientlyTight),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandRow {
    pub quarter: QuarterKey,
    pub u: f64,
    pub is_gap_quarter: bool,
    /// One entry per swept zeta, in sweep order.
    pub u_star: Vec<f64>,
}

/// Efficient unemployment under each of several social values of nonwork.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityBand {
    pub zetas: Vec<f64>,
    pub rows: Vec<BandRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaSummary {
    pub zeta: f64,
    pub mean_u_star: f64,
    /// Mean of `u*(zeta) - u*(baseline)`.
    pub mean_shift: f64,
    pub min_u_star: f64,
    pub max_u_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivitySummary {
    pub baseline_zeta: f64,
    pub per_zeta: Vec<ZetaSummary>,
    /// Mean distance between the lowest- and highest-zeta lines.
    pub mean_band_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sensitivity {
    pub band: SensitivityBand,
    pub summary: SensitivitySummary,
}

impl SensitivityBand {
    fn column(&self, zeta: f64) -> Option<usize> {
        self.zetas.iter().position(|&z| z == zeta)
    }

    fn kept_rows(&self, exclude_gap_quarters: bool) -> impl Iterator<Item = &BandRow> {
        self.rows.iter().filter(move |r| !(exclude_gap_quarters && r.is_gap_quarter))
    }

    /// Mean of `u*(hi) - u*(lo)` over quarters.
    pub fn mean_width(&self, lo: f64, hi: f64, exclude_gap_quarters: bool) -> Option<f64> {
        let (a, b) = (self.column(lo)?, self.column(hi)?);
        let diffs: Vec<f64> = self.kept_rows(exclude_gap_quarters).map(|r| r.u_star[b] - r.u_star[a]).collect();
        (!diffs.is_empty()).then(|| diffs.iter().sum::<f64>() / diffs.len() as f64)
    }

    pub fn summarize(&self, baseline: &[f64], baseline_zeta: f64, exclude_gap_quarters: bool) -> SensitivitySummary {
        let keep: Vec<bool> = self.rows.iter().map(|r| !(exclude_gap_quarters && r.is_gap_quarter)).collect();
        let n = keep.iter().filter(|k| **k).count().max(1) as f64;
        let per_zeta = self
            .zetas
            .iter()
            .enumerate()
            .map(|(j, &zeta)| {
                let col: Vec<(f64, f64)> = self
                    .rows
                    .iter()
                    .zip(baseline)
                    .zip(&keep)
                    .filter(|(_, k)| **k)
                    .map(|((r, b), _)| (r.u_star[j], *b))
                    .collect();
                ZetaSummary {
                    zeta,
                    mean_u_star: col.iter().map(|c| c.0).sum::<f64>() / n,
                    mean_shift: col.iter().map(|c| c.0 - c.1).sum::<f64>() / n,
                    min_u_star: col.iter().map(|c| c.0).fold(f64::INFINITY, f64::min),
                    max_u_star: col.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max),
                }
            })
            .collect();
        let lo = self.zetas.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.zetas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        SensitivitySummary {
            baseline_zeta,
            per_zeta,
            mean_band_width: self.mean_width(lo, hi, exclude_gap_quarters).unwrap_or(0.0),
        }
    }

    /// Column name for a zeta, e.g. `u_star_z25` for 0.25.
    pub fn column_name(zeta: f64) -> String {
        let pct = (zeta * 100.0).round();
        if (zeta * 100.0 - pct).abs() < 1e-9 {
            format!("u_star_z{}", pct as i64).replace('-', "m")
        } else {
            format!("u_star_z{zeta}").replace('-', "m").replace('.', "p")
        }
    }

    /// `quarter,u,u_star_z0,u_star_z25,...`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quarter,u");
        for &z in &self.zetas {
            out.push(',');
            out.push_str(&Self::column_name(z));
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{}", r.quarter, fmt_value(r.u));
            for x in &r.u_star {
                let _ = write!(out, ",{}", fmt_value(*x));
            }
            out.push('\n');
        }
        out
    }
}

/// Sweep the social value of nonwork; shifts are measured against
/// [`BASELINE_ZETA`].
pub fn sensitivity(
    panel: &LaborMarketPanel,
    schedule: &ElasticitySchedule,
    kappa: f64,
    zetas: &[f64],
) -> Result<Sensitivity, GapError> {
    sensitivity_with(panel, schedule, kappa, zetas, BASELINE_ZETA, &GapOptions::new(), false)
}

pub fn sensitivity_with(
    panel: &LaborMarketPanel,
    schedule: &ElasticitySchedule,
    kappa: f64,
    zetas: &[f64],
    baseline_zeta: f64,
    opts: &GapOptions,
    exclude_gap_quarters: bool,
) -> Result<Sensitivity, GapError> {
    if zetas.is_empty() {
        return Err(GapError::NoZetas);
    }
    let series: Vec<Vec<GapPoint>> = zetas
        .iter()
        .map(|&z| gap_series_with(panel, schedule, kappa, z, opts))
        .collect::<Result<_, _>>()?;
    let baseline: Vec<f64> = gap_series_with(panel, schedule, kappa, baseline_zeta, opts)?
        .iter()
        .map(|p| p.u_star)
        .collect();
    let rows = panel
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| BandRow {
            quarter: row.quarter,
            u: row.u,
            is_gap_quarter: series[0][i].is_gap_quarter,
            u_star: series.iter().map(|s| s[i].u_star).collect(),
        })
        .collect();
    let band = SensitivityBand {
        zetas: zetas.to_vec(),
        rows,
    };
    let summary = band.summarize(&baseline, baseline_zeta, exclude_gap_quarters);
    Ok(Sensitivity { band, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpliedZetaPoint {
    pub quarter: QuarterKey,
    pub zeta_star: f64,
    pub is_gap_quarter: bool,
}

/// The social value of nonwork that would make each observed quarter efficient.
pub fn implied_zeta_series(
    panel: &LaborMarketPanel,
    schedule: &ElasticitySchedule,
    kappa: f64,
) -> Result<Vec<ImpliedZetaPoint>, GapError> {
    panel
        .rows()
        .iter()
        .map(|row| {
            let entry = schedule.get(row.quarter).ok_or(GapError::Unscheduled(row.quarter))?;
            Ok(ImpliedZetaPoint {
                quarter: row.quarter,
                zeta_star: implied_zeta(row.theta, kappa, entry.epsilon),
                is_gap_quarter: entry.is_gap_quarter,
            })
        })
        .collect()
}

pub fn implied_zeta_to_csv(points: &[ImpliedZetaPoint]) -> String {
    let mut out = String::from("quarter,zeta_star,is_gap_quarter\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.quarter, fmt_value(p.zeta_star), p.is_gap_quarter);
    }
    out
}
