//! Raw series ingestion: monthly CSV parsing, quarterly averaging, splicing of
//! the two vacancy sources, and assembly of the aligned labor-market panel.
//!
//! Rates are fractions of the labor force everywhere past [`parse_series_csv`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::quarter::QuarterKey;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: duplicate date {year}-{month:02}")]
    DuplicateDate { line: u64, year: i32, month: u8 },
    #[error("line {line}: value {value} is negative or not finite")]
    Domain { line: u64, value: f64 },
    #[error("no vacancy data for {missing} at the splice cutover {cutover}")]
    Coverage {
        missing: QuarterKey,
        cutover: QuarterKey,
    },
    #[error("unemployment and vacancy series share no quarter")]
    Alignment,
    #[error("{series} rate at {quarter} is {value}, outside (0, 1)")]
    RateOutOfRange {
        quarter: QuarterKey,
        series: &'static str,
        value: f64,
    },
    #[error("panel quarters must be strictly increasing ({prev} then {next})")]
    Unordered { prev: QuarterKey, next: QuarterKey },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValueUnit {
    #[default]
    Fraction,
    Percent,
}

impl std::str::FromStr for ValueUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fraction" => Ok(ValueUnit::Fraction),
            "percent" => Ok(ValueUnit::Percent),
            other => Err(format!("unknown unit `{other}` (expected percent or fraction)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonthlyPoint {
    pub year: i32,
    pub month: u8,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarterlyPoint {
    pub quarter: QuarterKey,
    pub value: f64,
}

fn parse_month(field: &str) -> Option<(i32, u8)> {
    // YYYY-MM, with an optional trailing -DD as in FRED downloads
    let mut parts = field.trim().split('-');
    let year = parts.next()?.parse::<i32>().ok()?;
    let month = parts.next()?.parse::<u8>().ok()?;
    if let Some(day) = parts.next() {
        day.parse::<u8>().ok().filter(|d| (1..=31).contains(d))?;
    }
    if parts.next().is_some() || !(1..=12).contains(&month) {
        return None;
    }
    Some((year, month))
}

/// Parse a `date,value` CSV (header row required) into monthly points sorted
/// by date. Percent inputs are divided by 100.
pub fn parse_series_csv(text: &str, unit: ValueUnit) -> Result<Vec<MonthlyPoint>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut seen: BTreeMap<(i32, u8), MonthlyPoint> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() < 2 {
            return Err(IngestError::Parse {
                line,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let (year, month) = parse_month(&record[0]).ok_or_else(|| IngestError::Parse {
            line,
            message: format!("bad date `{}` (expected YYYY-MM)", &record[0]),
        })?;
        let raw: f64 = record[1].parse().map_err(|_| IngestError::Parse {
            line,
            message: format!("bad value `{}`", &record[1]),
        })?;
        if !raw.is_finite() || raw < 0.0 {
            return Err(IngestError::Domain { line, value: raw });
        }
        let value = match unit {
            ValueUnit::Fraction => raw,
            ValueUnit::Percent => raw / 100.0,
        };
        if seen.insert((year, month), MonthlyPoint { year, month, value }).is_some() {
            return Err(IngestError::DuplicateDate { line, year, month });
        }
    }
    Ok(seen.into_values().collect())
}

/// A quarter left out of [`to_quarterly`] because some of its months were missing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedQuarter {
    pub quarter: QuarterKey,
    pub months_present: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuarterlySeries {
    pub points: Vec<QuarterlyPoint>,
    pub dropped: Vec<DroppedQuarter>,
}

/// Average complete quarters; quarters with only one or two months are dropped
/// and listed in [`QuarterlySeries::dropped`].
pub fn to_quarterly(points: &[MonthlyPoint]) -> QuarterlySeries {
    let mut buckets: BTreeMap<QuarterKey, Vec<f64>> = BTreeMap::new();
    for p in points {
        buckets
            .entry(QuarterKey::of_month(p.year, p.month))
            .or_default()
            .push(p.value);
    }
    let mut out = QuarterlySeries::default();
    for (quarter, values) in buckets {
        if values.len() == 3 {
            let value = values.iter().sum::<f64>() / 3.0;
            out.points.push(QuarterlyPoint { quarter, value });
        } else {
            out.dropped.push(DroppedQuarter {
                quarter,
                months_present: values.len(),
            });
        }
    }
    out
}

/// Level comparison around the splice cutover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpliceAudit {
    pub cutover: QuarterKey,
    /// Last pre-source value used (the quarter before the cutover).
    pub pre_last: Option<f64>,
    /// First post-source value used (the cutover quarter).
    pub post_first: f64,
    /// `post_first - pre_last`.
    pub jump: Option<f64>,
    /// Pre-source value at the cutover itself, when both sources define it.
    pub pre_at_cutover: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplicedSeries {
    pub points: Vec<QuarterlyPoint>,
    pub audit: SpliceAudit,
}

/// Join two vacancy sources at `cutover`: quarters strictly before the cutover
/// come from `pre`, the cutover and later from `post`. No level adjustment.
pub fn splice_vacancy(
    pre: &[QuarterlyPoint],
    post: &[QuarterlyPoint],
    cutover: QuarterKey,
) -> Result<SplicedSeries, IngestError> {
    let post_first = post
        .iter()
        .find(|p| p.quarter == cutover)
        .map(|p| p.value)
        .ok_or(IngestError::Coverage {
            missing: cutover,
            cutover,
        })?;
    let before: Vec<QuarterlyPoint> = pre.iter().copied().filter(|p| p.quarter < cutover).collect();
    let pre_last = match before.iter().max_by_key(|p| p.quarter) {
        Some(last) if last.quarter == cutover.prev() => Some(last.value),
        Some(_) => {
            return Err(IngestError::Coverage {
                missing: cutover.prev(),
                cutover,
            })
        }
        None => None,
    };
    let pre_at_cutover = pre.iter().find(|p| p.quarter == cutover).map(|p| p.value);

    let mut points = before;
    points.extend(post.iter().copied().filter(|p| p.quarter >= cutover));
    points.sort_by_key(|p| p.quarter);
    Ok(SplicedSeries {
        points,
        audit: SpliceAudit {
            cutover,
            pre_last,
            post_first,
            jump: pre_last.map(|v| post_first - v),
            pre_at_cutover,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PanelRow {
    pub quarter: QuarterKey,
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub n: f64,
}

impl PanelRow {
    /// Builds a row with `theta = v/u` and `n = 1 - u`.
    pub fn new(quarter: QuarterKey, u: f64, v: f64) -> Result<Self, IngestError> {
        check_rate(quarter, "unemployment", u)?;
        check_rate(quarter, "vacancy", v)?;
        Ok(PanelRow {
            quarter,
            u,
            v,
            theta: v / u,
            n: 1.0 - u,
        })
    }
}

fn check_rate(quarter: QuarterKey, series: &'static str, value: f64) -> Result<(), IngestError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(IngestError::RateOutOfRange {
            quarter,
            series,
            value,
        })
    }
}

/// Quarterly unemployment/vacancy panel with strictly increasing quarters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaborMarketPanel {
    rows: Vec<PanelRow>,
}

impl LaborMarketPanel {
    pub fn from_rows(rows: Vec<PanelRow>) -> Result<Self, IngestError> {
        for w in rows.windows(2) {
            if w[0].quarter >= w[1].quarter {
                return Err(IngestError::Unordered {
                    prev: w[0].quarter,
                    next: w[1].quarter,
                });
            }
        }
        Ok(LaborMarketPanel { rows })
    }

    pub fn rows(&self) -> &[PanelRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn quarters(&self) -> impl Iterator<Item = QuarterKey> + '_ {
        self.rows.iter().map(|r| r.quarter)
    }

    pub fn first_quarter(&self) -> Option<QuarterKey> {
        self.rows.first().map(|r| r.quarter)
    }

    pub fn last_quarter(&self) -> Option<QuarterKey> {
        self.rows.last().map(|r| r.quarter)
    }

    /// Rows with `start <= quarter <= end`.
    pub fn slice(&self, start: QuarterKey, end: QuarterKey) -> &[PanelRow] {
        let lo = self.rows.partition_point(|r| r.quarter < start);
        let hi = self.rows.partition_point(|r| r.quarter <= end);
        &self.rows[lo..hi.max(lo)]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quarter,u,v,theta,n\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.quarter,
                fmt_value(r.u),
                fmt_value(r.v),
                fmt_value(r.theta),
                fmt_value(r.n)
            );
        }
        out
    }

    /// Reads a panel export. `theta` and `n` are recomputed from `u` and `v`.
    pub fn from_csv(text: &str) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| IngestError::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let bad = |message: String| IngestError::Parse { line, message };
            if record.len() < 3 {
                return Err(bad(format!("expected at least 3 columns, found {}", record.len())));
            }
            let quarter: QuarterKey = record[0].parse().map_err(|e| bad(format!("{e}")))?;
            let u: f64 = record[1].parse().map_err(|_| bad(format!("bad u `{}`", &record[1])))?;
            let v: f64 = record[2].parse().map_err(|_| bad(format!("bad v `{}`", &record[2])))?;
            rows.push(PanelRow::new(quarter, u, v)?);
        }
        LaborMarketPanel::from_rows(rows)
    }
}

/// Decimal formatting used by every CSV export: 12 decimals, which keeps at
/// least six significant digits for rates down to 1e-6.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.12}")
}

/// Inner join of unemployment and vacancy series on quarter.
pub fn build_panel(
    u_series: &[QuarterlyPoint],
    v_series: &[QuarterlyPoint],
) -> Result<LaborMarketPanel, IngestError> {
    let v_by_quarter: BTreeMap<QuarterKey, f64> =
        v_series.iter().map(|p| (p.quarter, p.value)).collect();
    let u_by_quarter: BTreeMap<QuarterKey, f64> =
        u_series.iter().map(|p| (p.quarter, p.value)).collect();
    let rows = u_by_quarter
        .iter()
        .filter_map(|(q, &u)| v_by_quarter.get(q).map(|&v| PanelRow::new(*q, u, v)))
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(IngestError::Alignment);
    }
    LaborMarketPanel::from_rows(rows)
}
