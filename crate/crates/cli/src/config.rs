//! Run configuration: documented defaults, then a flat TOML file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use mmr_core::engine::{Spacing, StreamScheme, DEFAULT_REPLICATES, DEFAULT_SEED};
use mmr_core::treat::EmptyArm;
use mmr_core::{Panel, TieBreak};

use crate::error::CliError;

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Flags shared by every command. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat TOML file with any of the keys below (dashes become underscores)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Monte Carlo replicates per state [default: 5000]
    #[arg(long, global = true)]
    pub replicates: Option<u64>,
    /// Master seed [default: 20191203]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Points per probability axis
    #[arg(long, global = true, value_name = "POINTS")]
    pub grid: Option<usize>,
    /// `endpoints` (i/(k-1)) or `interior` (j/(k+1))
    #[arg(long, global = true)]
    pub grid_spacing: Option<String>,
    /// State space: `a` (unrestricted) or `b` (band of half-width 1/2)
    #[arg(long, global = true)]
    pub panel: Option<String>,
    /// Choice when a rule yields no unique treatment: `a`, `b`, or `random`
    #[arg(long, global = true)]
    pub tie: Option<String>,
    /// ES with an empty arm: `half` (mean 1/2) or `no-choice` (tie policy)
    #[arg(long, global = true)]
    pub empty_arm: Option<String>,
    /// Size of the one-sided test [default: 0.05]
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Write the CSV here instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core [default: 0]
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Replicate streams: `common` or `per-state`
    #[arg(long, global = true)]
    pub streams: Option<String>,
    /// Evaluate every grid state instead of corners only
    #[arg(long, global = true)]
    pub brute_force: bool,
    /// Print CSV cells at full precision instead of 4 decimals
    #[arg(long, global = true)]
    pub full_precision: bool,
    /// Sample sizes (comma separated)
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Values of the column parameter (comma separated)
    #[arg(long, global = true, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    replicates: Option<u64>,
    seed: Option<u64>,
    grid: Option<usize>,
    grid_spacing: Option<String>,
    panel: Option<String>,
    tie: Option<String>,
    empty_arm: Option<String>,
    alpha: Option<f64>,
    out: Option<PathBuf>,
    workers: Option<usize>,
    streams: Option<String>,
    brute_force: Option<bool>,
    full_precision: Option<bool>,
    n: Option<Vec<usize>>,
    p: Option<Vec<f64>>,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

/// Fully resolved settings. `None` fields fall back to per-command defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub replicates: u64,
    pub seed: u64,
    pub grid: Option<usize>,
    pub grid_spacing: Option<Spacing>,
    pub panel: Panel,
    pub tie: Option<TieBreak>,
    pub empty_arm: Option<EmptyArm>,
    pub alpha: f64,
    pub out: Option<PathBuf>,
    pub workers: usize,
    pub streams: StreamScheme,
    pub brute_force: bool,
    pub full_precision: bool,
    pub n: Option<Vec<usize>>,
    pub p: Option<Vec<f64>>,
}

fn parsed<T>(
    value: Option<String>,
    parse: impl Fn(&str) -> mmr_core::Result<T>,
) -> Result<Option<T>, CliError> {
    value.map(|v| parse(&v).map_err(CliError::from)).transpose()
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let a = args.clone();
        let config = RunConfig {
            replicates: a.replicates.or(file.replicates).unwrap_or(DEFAULT_REPLICATES),
            seed: a.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            grid: a.grid.or(file.grid),
            grid_spacing: parsed(a.grid_spacing.or(file.grid_spacing), Spacing::parse)?,
            panel: parsed(a.panel.or(file.panel), Panel::parse)?.unwrap_or(Panel::A),
            tie: parsed(a.tie.or(file.tie), TieBreak::parse)?,
            empty_arm: parsed(a.empty_arm.or(file.empty_arm), EmptyArm::parse)?,
            alpha: a.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA),
            out: a.out.or(file.out),
            workers: a.workers.or(file.workers).unwrap_or(0),
            streams: parsed(a.streams.or(file.streams), StreamScheme::parse)?.unwrap_or_default(),
            brute_force: a.brute_force || file.brute_force.unwrap_or(false),
            full_precision: a.full_precision || file.full_precision.unwrap_or(false),
            n: a.n.or(file.n),
            p: a.p.or(file.p),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.replicates == 0 {
            return Err(CliError::Usage("--replicates must be at least 1".into()));
        }
        if let Some(k) = self.grid {
            if k < 2 {
                return Err(CliError::Usage("--grid must be at least 2".into()));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Usage(format!("--alpha {} must lie strictly between 0 and 1", self.alpha)));
        }
        if let Some(n) = &self.n {
            if n.is_empty() || n.contains(&0) {
                return Err(CliError::Usage("--n needs positive sample sizes".into()));
            }
        }
        if let Some(p) = &self.p {
            if p.is_empty() || p.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(CliError::Usage("--p values must lie in [0, 1]".into()));
            }
        }
        Ok(())
    }

    pub fn decimals(&self) -> Option<usize> {
        if self.full_precision {
            None
        } else {
            Some(4)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(&CommonArgs::default()).unwrap();
        assert_eq!(c.replicates, 5000);
        assert_eq!(c.seed, 20191203);
        assert_eq!(c.alpha, 0.05);
        assert_eq!(c.tie, None);
        assert_eq!(c.panel, Panel::A);
    }

    #[test]
    fn flags_override_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "replicates = 100\nseed = 7\ntie = \"b\"\nn = [25, 50]").unwrap();
        let args = CommonArgs {
            config: Some(f.path().to_path_buf()),
            seed: Some(9),
            ..Default::default()
        };
        let c = RunConfig::resolve(&args).unwrap();
        assert_eq!((c.replicates, c.seed), (100, 9));
        assert_eq!(c.tie, Some(TieBreak::B));
        assert_eq!(c.n, Some(vec![25, 50]));
    }

    #[test]
    fn bad_values_are_usage_errors() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "colour = 3").unwrap();
        let args = CommonArgs {
            config: Some(f.path().to_path_buf()),
            ..Default::default()
        };
        assert!(matches!(RunConfig::resolve(&args), Err(CliError::Usage(_))));
        let args = CommonArgs {
            alpha: Some(1.5),
            ..Default::default()
        };
        assert!(matches!(RunConfig::resolve(&args), Err(CliError::Usage(_))));
    }
}
