//! Run configuration: command-line flags over a `key=value` file named by
//! `MATORBIT_CONFIG`, over built-in defaults.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use matorbit_core::Tolerances;

use crate::CliError;

pub const CONFIG_ENV: &str = "MATORBIT_CONFIG";
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_ORACLE_STARTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub tolerances: Tolerances,
    pub seed: u64,
    pub oracle_starts: usize,
    pub output: OutputFormat,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            seed: DEFAULT_SEED,
            oracle_starts: DEFAULT_ORACLE_STARTS,
            output: OutputFormat::Json,
        }
    }
}

/// Partial settings from one source; `None` defers to the next source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub eps_residual: Option<f64>,
    pub eps_disc: Option<f64>,
    pub cluster_radius: Option<f64>,
    pub eps_rank: Option<f64>,
    pub eps_singular: Option<f64>,
    pub seed: Option<u64>,
    pub oracle_starts: Option<usize>,
    pub output: Option<OutputFormat>,
}

impl Overrides {
    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut o = Overrides::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::config(format!("{origin}:{}: {msg}", n + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let real = || value.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")));
            match key {
                "eps_residual" => o.eps_residual = Some(real()?),
                "eps_disc" => o.eps_disc = Some(real()?),
                "cluster_radius" => o.cluster_radius = Some(real()?),
                "eps_rank" => o.eps_rank = Some(real()?),
                "eps_singular" => o.eps_singular = Some(real()?),
                "seed" => o.seed = Some(value.parse().map_err(|e| bad(format!("seed: {e}")))?),
                "oracle_starts" => {
                    o.oracle_starts = Some(value.parse().map_err(|e| bad(format!("oracle_starts: {e}")))?)
                }
                "output" => o.output = Some(OutputFormat::from_str(value, true).map_err(|e| bad(format!("output: {e}")))?),
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Fields set here win over those in `lower`.
    pub fn over(self, lower: Overrides) -> Overrides {
        Overrides {
            eps_residual: self.eps_residual.or(lower.eps_residual),
            eps_disc: self.eps_disc.or(lower.eps_disc),
            cluster_radius: self.cluster_radius.or(lower.cluster_radius),
            eps_rank: self.eps_rank.or(lower.eps_rank),
            eps_singular: self.eps_singular.or(lower.eps_singular),
            seed: self.seed.or(lower.seed),
            oracle_starts: self.oracle_starts.or(lower.oracle_starts),
            output: self.output.or(lower.output),
        }
    }

    pub fn resolve(self) -> Result<CliConfig, CliError> {
        let d = CliConfig::default();
        let tolerances = Tolerances {
            eps_residual: self.eps_residual.unwrap_or(d.tolerances.eps_residual),
            eps_disc: self.eps_disc.unwrap_or(d.tolerances.eps_disc),
            cluster_radius: self.cluster_radius.unwrap_or(d.tolerances.cluster_radius),
            eps_rank: self.eps_rank.unwrap_or(d.tolerances.eps_rank),
            eps_singular: self.eps_singular.unwrap_or(d.tolerances.eps_singular),
        };
        tolerances.validate().map_err(|e| CliError::config(e.to_string()))?;
        let oracle_starts = self.oracle_starts.unwrap_or(d.oracle_starts);
        if oracle_starts == 0 {
            return Err(CliError::config("oracle_starts must be at least 1".into()));
        }
        Ok(CliConfig {
            tolerances,
            seed: self.seed.unwrap_or(d.seed),
            oracle_starts,
            output: self.output.unwrap_or(d.output),
        })
    }
}

/// Flags over the file named by `env_path` (if any) over defaults.
pub fn load(flags: Overrides, env_path: Option<&Path>) -> Result<CliConfig, CliError> {
    let file = match env_path {
        Some(p) => Overrides::from_file(p)?,
        None => Overrides::default(),
    };
    flags.over(file).resolve()
}
