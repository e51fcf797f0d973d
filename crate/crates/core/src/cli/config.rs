use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::explorer::Budget;
use crate::geometry::Tolerances;

/// Settings shared by every subcommand. Loaded from the TOML file named by
/// `FLIPGRAPH_CONFIG` (or `--config`), then overridden by flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub explorer: Budget,
    pub output_dir: Option<PathBuf>,
    pub verbosity: u8,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [("eps_res", t.eps_res), ("eps_flat", t.eps_flat), ("eps_deg", t.eps_deg)] {
            if v.is_nan() || v <= 0.0 {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        if t.max_iter == 0 {
            return Err(CliError::Config("max_iter must be at least 1".into()));
        }
        if self.explorer.max_nodes == 0 {
            return Err(CliError::Config("max_nodes must be at least 1".into()));
        }
        Ok(())
    }

    /// Resolves an output path against `output_dir` when it is relative.
    pub fn output_path(&self, p: &Path) -> PathBuf {
        match &self.output_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }
}
