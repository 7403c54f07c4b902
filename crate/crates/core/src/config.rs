//! Run configuration read from a single TOML file.
//!
//! ```toml
//! seed = 42
//!
//! [data]
//! path = "bladder1.csv"      # relative to the config file
//! format = "bladder1"        # generic | bladder1 | lung | ovarian
//!
//! [data.schema]              # generic format only
//! time = "time"
//! status = "status"
//! covariates = ["age"]
//!
//! [model]
//! kind = "ig-gw"
//!
//! [priors.zeta]
//! law = "uniform"
//! lower = 0.0
//! upper = 100.0
//!
//! [mcmc]
//! iterations = 20000
//! burn_in = 5000
//! thin = 10
//!
//! [simulate]
//! n = 200
//! censoring_rate = 0.05
//! params = { zeta = 2.0, delta = 0.7, xi = 1.5, eta = 0.8, beta = [0.5] }
//! ```
//!
//! The README lists every key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baseline::GwParams;
use crate::bayes::{McmcConfig, PriorConfig};
use crate::error::{Error, Result};
use crate::frailty::{GlFrailty, IgFrailty};
use crate::io::{CsvSchema, DataFormat};
use crate::models::{ModelKind, ModelParams};
use crate::simulate::{CovariateLaw, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: DataFormat,
    #[serde(default)]
    pub schema: CsvSchema,
}

fn default_format() -> DataFormat {
    DataFormat::Generic
}

/// Model parameters written out by name, as in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedParams {
    pub zeta: f64,
    pub delta: f64,
    pub xi: f64,
    pub eta: f64,
    /// Required for the generalized Lindley model only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub beta: Vec<f64>,
}

impl NamedParams {
    pub fn to_params(&self, kind: ModelKind) -> Result<ModelParams> {
        let frailty = match (kind, self.epsilon) {
            (ModelKind::IgGw, None) => IgFrailty::new(self.eta)?.into(),
            (ModelKind::GlGw, Some(eps)) => GlFrailty::new(self.eta, eps)?.into(),
            (ModelKind::IgGw, Some(_)) => {
                return Err(Error::config("epsilon is only a parameter of the gl-gw model"))
            }
            (ModelKind::GlGw, None) => {
                return Err(Error::config("the gl-gw model needs epsilon"))
            }
        };
        Ok(ModelParams {
            baseline: GwParams::new(self.zeta, self.delta, self.xi)?,
            frailty,
            beta: self.beta.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Starting point of the first chain; derived from the data when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<NamedParams>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            kind: ModelKind::IgGw,
            init: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub n: usize,
    pub censoring_rate: f64,
    pub params: NamedParams,
    #[serde(default)]
    pub covariate_law: CovariateLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseConfig {
    /// Leading fraction of each chain compared by the Geweke test.
    pub geweke_first: f64,
    /// Trailing fraction of each chain compared by the Geweke test.
    pub geweke_last: f64,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            geweke_first: 0.1,
            geweke_last: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Master seed; overrides `mcmc.seed` when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<DataConfig>,
    pub model: ModelConfig,
    pub priors: PriorConfig,
    pub mcmc: McmcConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    pub diagnose: DiagnoseConfig,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub model: Option<ModelKind>,
    pub iterations: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a config file. Relative data paths are resolved against the
    /// directory holding the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Config::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(data) = &mut cfg.data {
            if data.path.is_relative() {
                data.path = base.join(&data.path);
            }
        }
        Ok(cfg)
    }

    /// The config with overrides applied and the master seed propagated.
    pub fn resolved(&self, o: &Overrides) -> Config {
        let mut cfg = self.clone();
        if let Some(s) = o.seed {
            cfg.seed = Some(s);
        }
        if let Some(k) = o.model {
            cfg.model.kind = k;
        }
        if let Some(v) = o.iterations {
            cfg.mcmc.iterations = v;
        }
        if let Some(v) = o.burn_in {
            cfg.mcmc.burn_in = v;
        }
        if let Some(v) = o.thin {
            cfg.mcmc.thin = v;
        }
        if let Some(s) = cfg.seed {
            cfg.mcmc.seed = s;
        }
        cfg
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(self.mcmc.seed)
    }

    pub fn validate(&self) -> Result<()> {
        self.priors.validate()?;
        self.mcmc.validate()?;
        let d = &self.diagnose;
        if !(d.geweke_first > 0.0 && d.geweke_last > 0.0 && d.geweke_first + d.geweke_last <= 1.0) {
            return Err(Error::config(
                "Geweke fractions must be positive and sum to at most 1",
            ));
        }
        if let Some(init) = &self.model.init {
            init.to_params(self.model.kind)?;
        }
        Ok(())
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let s = self
            .simulate
            .as_ref()
            .ok_or_else(|| Error::config("missing [simulate] section"))?;
        let kind = self.model.kind;
        let cfg = SimConfig {
            kind,
            n: s.n,
            true_params: s.params.to_params(kind)?,
            covariate_law: s.covariate_law,
            censoring_rate: s.censoring_rate,
            seed: self.seed(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical JSON form, used for `--dump-config` and hashing.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
