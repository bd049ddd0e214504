//! Stable-curve subperiods and the per-quarter elasticity schedule.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::fit::RegimeFit;
use crate::quarter::QuarterKey;

const US_REGIMES: &str = include_str!("../data/regimes_us.txt");

#[derive(Debug, Error, PartialEq)]
pub enum RegimeError {
    #[error("regime file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("regime `{label}` starts after it ends")]
    Inverted { label: String },
    #[error("regimes `{first}` and `{second}` overlap or are out of order")]
    Overlap { first: String, second: String },
    #[error("duplicate regime label `{0}`")]
    DuplicateLabel(String),
    #[error("regime table is empty")]
    Empty,
    #[error("no elasticity estimate for regime `{0}`")]
    MissingEstimate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Regime {
    pub label: String,
    pub start: QuarterKey,
    /// Inclusive.
    pub end: QuarterKey,
}

impl Regime {
    pub fn new(label: impl Into<String>, start: QuarterKey, end: QuarterKey) -> Self {
        Regime {
            label: label.into(),
            start,
            end,
        }
    }

    pub fn contains(&self, q: QuarterKey) -> bool {
        self.start <= q && q <= self.end
    }
}

/// Sorted, pairwise-disjoint regimes. Gaps between regimes are shift quarters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegimeTable {
    regimes: Vec<Regime>,
}

impl RegimeTable {
    pub fn new(regimes: Vec<Regime>) -> Result<Self, RegimeError> {
        if regimes.is_empty() {
            return Err(RegimeError::Empty);
        }
        for r in &regimes {
            if r.start > r.end {
                return Err(RegimeError::Inverted { label: r.label.clone() });
            }
        }
        for w in regimes.windows(2) {
            if w[0].end >= w[1].start {
                return Err(RegimeError::Overlap {
                    first: w[0].label.clone(),
                    second: w[1].label.clone(),
                });
            }
        }
        let mut labels: Vec<&str> = regimes.iter().map(|r| r.label.as_str()).collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(RegimeError::DuplicateLabel(w[0].to_string()));
        }
        Ok(RegimeTable { regimes })
    }

    /// The seven US subperiods bundled with the crate.
    pub fn default_us() -> Self {
        RegimeTable::parse(US_REGIMES).expect("bundled regime table is valid")
    }

    /// Parses `label,start,end` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, RegimeError> {
        let mut regimes = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split(',').map(str::trim).collect();
            let [label, start, end] = fields[..] else {
                return Err(RegimeError::Parse {
                    line,
                    message: format!("expected `label,start,end`, got `{content}`"),
                });
            };
            let parse_q = |s: &str| {
                s.parse::<QuarterKey>().map_err(|e| RegimeError::Parse {
                    line,
                    message: e.to_string(),
                })
            };
            regimes.push(Regime::new(label, parse_q(start)?, parse_q(end)?));
        }
        RegimeTable::new(regimes)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.regimes {
            let _ = writeln!(out, "{},{},{}", r.label, r.start, r.end);
        }
        out
    }

    pub fn regimes(&self) -> &[Regime] {
        &self.regimes
    }

    pub fn len(&self) -> usize {
        self.regimes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regimes.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Regime> {
        self.regimes.iter().find(|r| r.label == label)
    }
}

/// The regime containing `q`, or `None` for shift quarters and quarters
/// outside the table's coverage.
pub fn assign_regime(q: QuarterKey, table: &RegimeTable) -> Option<&Regime> {
    let idx = table.regimes.partition_point(|r| r.end < q);
    table.regimes.get(idx).filter(|r| r.contains(q))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleEntry {
    pub epsilon: f64,
    pub log_v0: f64,
    pub regime: String,
    /// True when the quarter lies outside every regime and borrows parameters.
    pub is_gap_quarter: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ElasticitySchedule {
    entries: BTreeMap<QuarterKey, ScheduleEntry>,
}

impl ElasticitySchedule {
    pub fn get(&self, q: QuarterKey) -> Option<&ScheduleEntry> {
        self.entries.get(&q)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QuarterKey, &ScheduleEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same parameters for every quarter, e.g. for a single fitted curve.
    pub fn constant(
        quarters: impl IntoIterator<Item = QuarterKey>,
        epsilon: f64,
        log_v0: f64,
        label: &str,
    ) -> Self {
        let entries = quarters
            .into_iter()
            .map(|q| {
                let entry = ScheduleEntry {
                    epsilon,
                    log_v0,
                    regime: label.to_string(),
                    is_gap_quarter: false,
                };
                (q, entry)
            })
            .collect();
        ElasticitySchedule { entries }
    }
}

/// Map every quarter to its regime's fitted curve.
///
/// Shift quarters (and quarters past the last regime) carry forward the most
/// recent preceding regime; quarters before the first regime use the first
/// regime. Borrowed entries are flagged with `is_gap_quarter`.
pub fn build_schedule(
    table: &RegimeTable,
    estimates: &[RegimeFit],
    quarters: impl IntoIterator<Item = QuarterKey>,
) -> Result<ElasticitySchedule, RegimeError> {
    let params: Vec<(f64, f64)> = table
        .regimes
        .iter()
        .map(|r| {
            estimates
                .iter()
                .find(|e| e.regime.label == r.label)
                .map(|e| (e.estimate.epsilon, e.estimate.log_v0))
                .ok_or_else(|| RegimeError::MissingEstimate(r.label.clone()))
        })
        .collect::<Result<_, _>>()?;

    let mut entries = BTreeMap::new();
    for q in quarters {
        // index of the last regime starting at or before q
        let idx = table.regimes.partition_point(|r| r.start <= q);
        let (ri, is_gap) = match idx.checked_sub(1) {
            None => (0, true),
            Some(i) => (i, !table.regimes[i].contains(q)),
        };
        let (epsilon, log_v0) = params[ri];
        entries.insert(
            q,
            ScheduleEntry {
                epsilon,
                log_v0,
                regime: table.regimes[ri].label.clone(),
                is_gap_quarter: is_gap,
            },
        );
    }
    Ok(ElasticitySchedule { entries })
}
