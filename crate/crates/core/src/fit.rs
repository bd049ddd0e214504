//! Beveridge elasticity estimation: OLS of log vacancy rate on log
//! unemployment rate, one regression per stable-curve regime.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{fmt_value, LaborMarketPanel, PanelRow};
use crate::regimes::{Regime, RegimeTable};

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 3 observations, got {0}")]
    SampleSize(usize),
    #[error("log unemployment has no variation")]
    DegenerateRegressor,
    #[error("fitted curve slopes upward (slope {slope:.4}); elasticity must be positive")]
    NonNegativeSlope { slope: f64 },
    #[error("u and v must be positive (got u={u}, v={v})")]
    NonPositive { u: f64, v: f64 },
    #[error("regime {label}: {source}")]
    InRegime {
        label: String,
        #[source]
        source: Box<FitError>,
    },
    #[error("{what} must satisfy {requirement} (got {value})")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

/// Standard-error flavour for the slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StdErrorKind {
    /// Homoskedastic OLS standard error.
    #[default]
    Classical,
    /// White heteroskedasticity-consistent, with the n/(n-2) correction.
    Hc1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElasticityEstimate {
    /// Minus the log-log slope.
    pub epsilon: f64,
    /// Intercept of the log-log regression; `v0 = exp(log_v0)`.
    pub log_v0: f64,
    pub se_epsilon: f64,
    pub r_squared: f64,
    pub n_obs: usize,
}

impl ElasticityEstimate {
    pub fn v0(&self) -> f64 {
        self.log_v0.exp()
    }

    pub fn predict(&self, u: f64) -> Result<f64, FitError> {
        predicted_vacancy(self.log_v0, self.epsilon, u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeFit {
    pub regime: Regime,
    pub estimate: ElasticityEstimate,
}

pub fn fit_elasticity(rows: &[PanelRow]) -> Result<ElasticityEstimate, FitError> {
    fit_elasticity_with(rows, StdErrorKind::Classical)
}

pub fn fit_elasticity_with(
    rows: &[PanelRow],
    se_kind: StdErrorKind,
) -> Result<ElasticityEstimate, FitError> {
    if rows.len() < 3 {
        return Err(FitError::SampleSize(rows.len()));
    }
    if let Some(r) = rows.iter().find(|r| !(r.u > 0.0 && r.v > 0.0)) {
        return Err(FitError::NonPositive { u: r.u, v: r.v });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.u.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.v.ln()).collect();
    let n = x.len() as f64;
    let x_bar = x.iter().sum::<f64>() / n;
    let y_bar = y.iter().sum::<f64>() / n;

    let sxx: f64 = x.iter().map(|xi| (xi - x_bar).powi(2)).sum();
    if sxx <= f64::EPSILON * n * x_bar.abs().max(1.0).powi(2) {
        return Err(FitError::DegenerateRegressor);
    }
    let sxy: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi - x_bar) * (yi - y_bar)).sum();
    let syy: f64 = y.iter().map(|yi| (yi - y_bar).powi(2)).sum();

    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    if slope >= 0.0 {
        return Err(FitError::NonNegativeSlope { slope });
    }

    let residuals: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| yi - intercept - slope * xi).collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let dof = n - 2.0;
    let se = match se_kind {
        StdErrorKind::Classical => (ssr / dof / sxx).sqrt(),
        StdErrorKind::Hc1 => {
            let meat: f64 = x
                .iter()
                .zip(&residuals)
                .map(|(xi, e)| (xi - x_bar).powi(2) * e * e)
                .sum();
            (n / dof * meat).sqrt() / sxx
        }
    };
    let r_squared = if syy > 0.0 { (1.0 - ssr / syy).clamp(0.0, 1.0) } else { 1.0 };

    Ok(ElasticityEstimate {
        epsilon: -slope,
        log_v0: intercept,
        se_epsilon: se,
        r_squared,
        n_obs: rows.len(),
    })
}

/// Fit every regime, returning per-regime outcomes in table order. Failures in
/// one regime do not stop the others.
pub fn fit_each(
    panel: &LaborMarketPanel,
    table: &RegimeTable,
    se_kind: StdErrorKind,
) -> Vec<(Regime, Result<ElasticityEstimate, FitError>)> {
    table
        .regimes()
        .iter()
        .map(|r| {
            let rows = panel.slice(r.start, r.end);
            (r.clone(), fit_elasticity_with(rows, se_kind))
        })
        .collect()
}

/// One estimate per regime, in table order; the first failure is returned
/// with the regime label attached.
pub fn fit_all(panel: &LaborMarketPanel, table: &RegimeTable) -> Result<Vec<RegimeFit>, FitError> {
    fit_each(panel, table, StdErrorKind::Classical)
        .into_iter()
        .map(|(regime, res)| match res {
            Ok(estimate) => Ok(RegimeFit { regime, estimate }),
            Err(e) => Err(FitError::InRegime {
                label: regime.label,
                source: Box::new(e),
            }),
        })
        .collect()
}

/// Isoelastic curve `v = exp(log_v0) * u^(-epsilon)`.
pub fn predicted_vacancy(log_v0: f64, epsilon: f64, u: f64) -> Result<f64, FitError> {
    if u <= 0.0 || u.is_nan() {
        return Err(FitError::Domain {
            what: "u",
            requirement: "u > 0",
            value: u,
        });
    }
    Ok((log_v0 - epsilon * u.ln()).exp())
}

/// Beveridge elasticity implied by a steady-state matching model with
/// Cobb-Douglas matching elasticity `alpha`: `(alpha + u/(1-u)) / (1-alpha)`.
pub fn dmp_elasticity(alpha: f64, u: f64) -> Result<f64, FitError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FitError::Domain {
            what: "alpha",
            requirement: "0 < alpha < 1",
            value: alpha,
        });
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(FitError::Domain {
            what: "u",
            requirement: "0 < u < 1",
            value: u,
        });
    }
    Ok((alpha + u / (1.0 - u)) / (1.0 - alpha))
}

/// `regime,start,end,epsilon,se,log_v0,r2,n_obs`
pub fn estimates_to_csv(fits: &[RegimeFit]) -> String {
    let mut out = String::from("regime,start,end,epsilon,se,log_v0,r2,n_obs\n");
    for f in fits {
        let e = &f.estimate;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            f.regime.label,
            f.regime.start,
            f.regime.end,
            fmt_value(e.epsilon),
            fmt_value(e.se_epsilon),
            fmt_value(e.log_v0),
            fmt_value(e.r_squared),
            e.n_obs
        );
    }
    out
}

/// Reads an estimates export back into regime fits.
pub fn estimates_from_csv(text: &str) -> Result<Vec<RegimeFit>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut fits = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 8 {
            return Err(format!("line {line}: expected 8 columns"));
        }
        let num = |i: usize| -> Result<f64, String> {
            record[i]
                .parse::<f64>()
                .map_err(|_| format!("line {line}: bad number `{}`", &record[i]))
        };
        let quarter = |i: usize| record[i].parse().map_err(|e| format!("line {line}: {e}"));
        fits.push(RegimeFit {
            regime: Regime::new(&record[0], quarter(1)?, quarter(2)?),
            estimate: ElasticityEstimate {
                epsilon: num(3)?,
                se_epsilon: num(4)?,
                log_v0: num(5)?,
                r_squared: num(6)?,
                n_obs: record[7]
                    .parse()
                    .map_err(|_| format!("line {line}: bad n_obs `{}`", &record[7]))?,
            },
        });
    }
    Ok(fits)
}
