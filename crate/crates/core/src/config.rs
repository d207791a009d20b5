//! Experiment configuration, read from a TOML file.
//!
//! ```toml
//! seed = 7
//! replicates = 100000
//! delta_dkw = 0.001
//! t_grid = [100.0, 1000.0]
//!
//! [distribution]
//! family = "exponential"
//! rate = 1.0
//!
//! [n_policy]
//! kind = "lattice"      # or kind = "explicit", n = [10, 100]
//!
//! [outputs]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::mc::{default_n_max, DEFAULT_DELTA, MAX_LATTICE};

/// Which counts `n` a command evaluates at each horizon `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NPolicy {
    /// Every `n` in `1..=n_max`; `n_max` defaults to `ceil(t/μ + 12σ√t μ^{−3/2}) + 16`.
    Lattice {
        #[serde(default)]
        n_max: Option<u64>,
    },
    Explicit {
        n: Vec<u64>,
    },
}

impl Default for NPolicy {
    fn default() -> Self {
        NPolicy::Lattice { n_max: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
    pub bound: String,
    pub ecdf: String,
    pub summary: String,
    pub verify: String,
    pub compare: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            dir: PathBuf::from("out"),
            bound: "bound.csv".into(),
            ecdf: "ecdf.csv".into(),
            summary: "summary.json".into(),
            verify: "verify.json".into(),
            compare: "compare.csv".into(),
        }
    }
}

impl Outputs {
    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }
}

fn default_replicates() -> u64 {
    100_000
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub n_policy: NPolicy,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_delta")]
    pub delta_dkw: f64,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn new(distribution: DistributionSpec, t_grid: Vec<f64>) -> Self {
        ExperimentConfig {
            distribution,
            t_grid,
            n_policy: NPolicy::default(),
            replicates: default_replicates(),
            seed: 0,
            delta_dkw: DEFAULT_DELTA,
            outputs: Outputs::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() {
            return Err(Error::Config("t_grid: must not be empty".into()));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::Config(format!(
                "t_grid: entries must be positive and finite, got {t}"
            )));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates: must be >= 1".into()));
        }
        if !(self.delta_dkw > 0.0 && self.delta_dkw < 1.0) {
            return Err(Error::Config(format!(
                "delta_dkw: must lie in (0, 1), got {}",
                self.delta_dkw
            )));
        }
        match &self.n_policy {
            NPolicy::Explicit { n } if n.is_empty() || n.contains(&0) => Err(Error::Config(
                "n_policy.n: must be a nonempty list of counts >= 1".into(),
            )),
            NPolicy::Lattice { n_max: Some(0) } => {
                Err(Error::Config("n_policy.n_max: must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// The counts evaluated at horizon `t`.
    pub fn n_values(&self, t: f64) -> Result<Vec<u64>> {
        match &self.n_policy {
            NPolicy::Explicit { n } => Ok(n.clone()),
            NPolicy::Lattice { n_max } => {
                let top = n_max.unwrap_or_else(|| default_n_max(&self.distribution, t));
                if top > MAX_LATTICE {
                    return Err(Error::Simulation(format!(
                        "lattice of {top} counts at t = {t} exceeds {MAX_LATTICE}"
                    )));
                }
                Ok((1..=top).collect())
            }
        }
    }
}
