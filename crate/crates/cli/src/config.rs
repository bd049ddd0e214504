//! Run configuration: a sectioned `key = value` file plus command-line
//! overrides. Relative paths resolve against the file that supplied them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use beveridge_gap::fit::StdErrorKind;
use beveridge_gap::gap::DEFAULT_TOLERANCE;
use beveridge_gap::ingest::ValueUnit;
use beveridge_gap::QuarterKey;
use ini::Ini;

/// Every recognised `(section, key)`.
pub const KEYS: &[(&str, &str)] = &[
    ("data", "unemployment"),
    ("data", "vacancy_pre"),
    ("data", "vacancy_post"),
    ("data", "panel"),
    ("data", "unit"),
    ("data", "cutover"),
    ("data", "start"),
    ("data", "end"),
    ("data", "regimes"),
    ("data", "recessions"),
    ("calibration", "profile"),
    ("calibration", "kappa"),
    ("calibration", "zeta"),
    ("calibration", "zetas"),
    ("calibration", "kappa_overrides"),
    ("gap", "tolerance"),
    ("gap", "exclude_gap_quarters"),
    ("gap", "implied_zeta"),
    ("gap", "se"),
    ("simulation", "scenario"),
    ("simulation", "seed"),
    ("output", "out"),
];

const PATH_KEYS: &[&str] = &[
    "unemployment",
    "vacancy_pre",
    "vacancy_post",
    "panel",
    "regimes",
    "recessions",
    "profile",
    "kappa_overrides",
    "scenario",
    "out",
];

#[derive(Debug, Clone)]
struct Setting {
    value: String,
    base: PathBuf,
}

/// Raw settings before typing; later inserts win.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<(String, String), Setting>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| anyhow!("{e}"))?;
        let mut out = Settings::default();
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("");
            for (key, value) in props.iter() {
                out.set(section, key, value, base)?;
            }
        }
        Ok(out)
    }

    /// Insert one value, rejecting unknown keys.
    pub fn set(&mut self, section: &str, key: &str, value: &str, base: &Path) -> Result<()> {
        if !KEYS.contains(&(section, key)) {
            bail!("unknown setting [{section}] {key}");
        }
        self.values.insert(
            (section.to_string(), key.to_string()),
            Setting {
                value: value.trim().to_string(),
                base: base.to_path_buf(),
            },
        );
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&Setting> {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .filter(|s| !s.value.is_empty())
    }

    fn path(&self, section: &str, key: &str) -> Option<PathBuf> {
        debug_assert!(PATH_KEYS.contains(&key));
        self.get(section, key).map(|s| s.base.join(&s.value))
    }

    fn parsed<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(section, key)
            .map(|s| {
                s.value
                    .parse::<T>()
                    .map_err(|e| anyhow!("[{section}] {key} = `{}`: {e}", s.value))
            })
            .transpose()
    }

    fn flag(&self, section: &str, key: &str) -> Result<bool> {
        Ok(self.parsed::<bool>(section, key)?.unwrap_or(false))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub unemployment: Option<PathBuf>,
    pub vacancy_pre: Option<PathBuf>,
    pub vacancy_post: Option<PathBuf>,
    /// A ready-made panel CSV; replaces the three raw series.
    pub panel: Option<PathBuf>,
    pub unit: ValueUnit,
    pub cutover: QuarterKey,
    pub start: Option<QuarterKey>,
    pub end: Option<QuarterKey>,
    pub regimes: Option<PathBuf>,
    pub recessions: Option<PathBuf>,
    pub profile: Option<PathBuf>,
    pub kappa: Option<f64>,
    pub zeta: Option<f64>,
    pub zetas: Vec<f64>,
    pub kappa_overrides: Option<PathBuf>,
    pub tolerance: f64,
    pub exclude_gap_quarters: bool,
    pub implied_zeta: bool,
    pub se: StdErrorKind,
    pub scenario: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

fn parse_zetas(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|z| {
            let z = z.trim();
            z.parse::<f64>().map_err(|_| anyhow!("bad zeta `{z}`"))
        })
        .collect()
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let unit = match s.get("data", "unit") {
            None => ValueUnit::Percent,
            Some(u) => u.value.parse::<ValueUnit>().map_err(|e| anyhow!("[data] unit: {e}"))?,
        };
        let zetas = match s.get("calibration", "zetas") {
            None => vec![0.0, 0.25, 0.5],
            Some(z) => parse_zetas(&z.value).context("[calibration] zetas")?,
        };
        if zetas.is_empty() {
            bail!("[calibration] zetas is empty");
        }
        let zeta = s.parsed::<f64>("calibration", "zeta")?;
        for &z in zetas.iter().chain(zeta.iter()) {
            if !(z < 1.0) {
                bail!("zeta = {z} must be below 1");
            }
        }
        let se = match s.get("gap", "se").map(|v| v.value.as_str()) {
            None | Some("classical") => StdErrorKind::Classical,
            Some("hc1") => StdErrorKind::Hc1,
            Some(other) => bail!("[gap] se = `{other}`: expected classical or hc1"),
        };
        let tolerance = s.parsed::<f64>("gap", "tolerance")?.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance >= 0.0) {
            bail!("[gap] tolerance must be non-negative");
        }
        Ok(RunConfig {
            unemployment: s.path("data", "unemployment"),
            vacancy_pre: s.path("data", "vacancy_pre"),
            vacancy_post: s.path("data", "vacancy_post"),
            panel: s.path("data", "panel"),
            unit,
            cutover: s.parsed("data", "cutover")?.unwrap_or(QuarterKey::new(2001, 1)),
            start: s.parsed("data", "start")?,
            end: s.parsed("data", "end")?,
            regimes: s.path("data", "regimes"),
            recessions: s.path("data", "recessions"),
            profile: s.path("calibration", "profile"),
            kappa: s.parsed("calibration", "kappa")?,
            zeta,
            zetas,
            kappa_overrides: s.path("calibration", "kappa_overrides"),
            tolerance,
            exclude_gap_quarters: s.flag("gap", "exclude_gap_quarters")?,
            implied_zeta: s.parsed::<bool>("gap", "implied_zeta")?.unwrap_or(true),
            se,
            scenario: s.path("simulation", "scenario"),
            seed: s.parsed("simulation", "seed")?,
            out: s.path("output", "out").unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}
