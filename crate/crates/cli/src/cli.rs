use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Status};
use crate::config::{RunConfig, Settings};

/// Environment override for the simulation seed; a `--seed` flag wins over it.
pub const SEED_ENV: &str = "TOOLKIT_SEED";

#[derive(Debug, Parser)]
#[command(name = "toolkit", version, about = "Beveridge-curve unemployment gap toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the quarterly panel from the monthly series.
    Ingest(Common),
    /// Estimate the Beveridge elasticity in each regime.
    Fit(Common),
    /// Efficient unemployment and the unemployment gap.
    Gap(Common),
    /// Sweep the social value of nonwork.
    Sensitivity(Common),
    /// Synthetic-economy checks of the gap formulas.
    Simulate(Common),
    /// Bundle tables and figures into report.md.
    Report {
        #[command(flatten)]
        common: Common,
        /// Rerun ingest, fit, gap and sensitivity first.
        #[arg(long)]
        recompute: bool,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Ingest(c)
            | Command::Fit(c)
            | Command::Gap(c)
            | Command::Sensitivity(c)
            | Command::Simulate(c)
            | Command::Report { common: c, .. } => c,
        }
    }
}

/// Each flag overrides the config key of the same name.
#[derive(Debug, Args, Default)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub unemployment: Option<String>,
    #[arg(long)]
    pub vacancy_pre: Option<String>,
    #[arg(long)]
    pub vacancy_post: Option<String>,
    #[arg(long)]
    pub panel: Option<String>,
    /// `percent` or `fraction`.
    #[arg(long)]
    pub unit: Option<String>,
    #[arg(long)]
    pub cutover: Option<String>,
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub end: Option<String>,
    #[arg(long)]
    pub regimes: Option<String>,
    #[arg(long)]
    pub recessions: Option<String>,
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub zeta: Option<String>,
    /// Comma-separated list.
    #[arg(long)]
    pub zetas: Option<String>,
    #[arg(long)]
    pub kappa_overrides: Option<String>,
    #[arg(long)]
    pub tolerance: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exclude_gap_quarters: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub implied_zeta: Option<String>,
    /// `classical` or `hc1`.
    #[arg(long)]
    pub se: Option<String>,
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Any other key, as `section.key=value`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub set: Vec<String>,
}

impl Common {
    fn overrides(&self) -> Vec<(&'static str, &'static str, &Option<String>)> {
        vec![
            ("output", "out", &self.out),
            ("data", "unemployment", &self.unemployment),
            ("data", "vacancy_pre", &self.vacancy_pre),
            ("data", "vacancy_post", &self.vacancy_post),
            ("data", "panel", &self.panel),
            ("data", "unit", &self.unit),
            ("data", "cutover", &self.cutover),
            ("data", "start", &self.start),
            ("data", "end", &self.end),
            ("data", "regimes", &self.regimes),
            ("data", "recessions", &self.recessions),
            ("calibration", "profile", &self.profile),
            ("calibration", "kappa", &self.kappa),
            ("calibration", "zeta", &self.zeta),
            ("calibration", "zetas", &self.zetas),
            ("calibration", "kappa_overrides", &self.kappa_overrides),
            ("gap", "tolerance", &self.tolerance),
            ("gap", "exclude_gap_quarters", &self.exclude_gap_quarters),
            ("gap", "implied_zeta", &self.implied_zeta),
            ("gap", "se", &self.se),
            ("simulation", "scenario", &self.scenario),
            ("simulation", "seed", &self.seed),
        ]
    }

    /// Config file, then the seed environment variable, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut settings = Settings::from_file(&self.config)?;
        let here = Path::new("");
        if let Ok(seed) = std::env::var(SEED_ENV) {
            settings
                .set("simulation", "seed", &seed, here)
                .map_err(|e| anyhow!("{SEED_ENV}: {e}"))?;
        }
        for pair in &self.set {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| anyhow!("--set expects section.key=value, got `{pair}`"))?;
            let (section, key) = key
                .split_once('.')
                .ok_or_else(|| anyhow!("--set expects section.key=value, got `{pair}`"))?;
            settings.set(section.trim(), key.trim(), value, here)?;
        }
        for (section, key, value) in self.overrides() {
            if let Some(v) = value {
                settings.set(section, key, v, here)?;
            }
        }
        RunConfig::from_settings(&settings)
    }
}

pub fn run(cli: &Cli) -> Result<Status> {
    let cfg = cli.command.common().resolve()?;
    match &cli.command {
        Command::Ingest(_) => commands::ingest(&cfg),
        Command::Fit(_) => commands::fit(&cfg),
        Command::Gap(_) => commands::gap(&cfg),
        Command::Sensitivity(_) => commands::sensitivity(&cfg),
        Command::Simulate(_) => commands::simulate(&cfg),
        Command::Report { recompute, .. } => commands::report(&cfg, *recompute),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_map_to_known_keys() {
        let c = Common::default();
        for (section, key, _) in c.overrides() {
            assert!(crate::config::KEYS.contains(&(section, key)), "{section}.{key}");
        }
    }
}
