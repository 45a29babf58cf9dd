//! TOML configuration for the simulation study.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bandwidth::KurtosisMode;
use crate::distributions::{benchmark_distributions, DistributionSpec};
use crate::error::{Error, Result};
use crate::harness::methods::MethodId;
use crate::quadrature::{QuadratureRule, DEFAULT_ORDER, DEFAULT_PANELS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDistribution {
    pub label: String,
    #[serde(flatten)]
    pub spec: DistributionSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub panels: usize,
    pub order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panels: DEFAULT_PANELS,
            order: DEFAULT_ORDER,
        }
    }
}

fn default_methods() -> Vec<MethodId> {
    MethodId::ALL.to_vec()
}

fn default_true() -> bool {
    true
}

fn default_folds() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distributions: Vec<LabeledDistribution>,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodId>,
    pub root_seed: u64,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub kurtosis_mode: KurtosisMode,
    pub output_path: PathBuf,
    /// Record fit times. Turn off for byte-reproducible output.
    #[serde(default = "default_true")]
    pub timing: bool,
    /// Folds of the recorded k-fold LSCV score.
    #[serde(default = "default_folds")]
    pub lscv_folds: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        ExperimentConfig::from_toml(&text).map_err(|e| Error::Input {
            path: path.display().to_string(),
            detail: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 2) {
            return Err(Error::Config("sample sizes must be at least 2".into()));
        }
        if self.distributions.is_empty() {
            return Err(Error::Config("no distributions configured".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods configured".into()));
        }
        if self.lscv_folds < 2 {
            return Err(Error::Config("lscv_folds must be at least 2".into()));
        }
        let mut seen = HashSet::new();
        for d in &self.distributions {
            if !seen.insert(d.label.as_str()) {
                return Err(Error::Config(format!("duplicate distribution label '{}'", d.label)));
            }
            d.spec.validate()?;
        }
        self.rule()?;
        Ok(())
    }

    pub fn rule(&self) -> Result<QuadratureRule> {
        QuadratureRule::composite(self.quadrature.panels, self.quadrature.order)
    }

    /// The desk-scale study: all eight benchmark densities, 200 trials.
    pub fn desk(output_path: PathBuf) -> Self {
        ExperimentConfig {
            distributions: benchmark_distributions()
                .into_iter()
                .map(|(label, spec)| LabeledDistribution { label, spec })
                .collect(),
            sample_sizes: vec![50, 100, 250, 500],
            trials: 200,
            methods: default_methods(),
            root_seed: 20_240_601,
            quadrature: QuadratureConfig::default(),
            kurtosis_mode: KurtosisMode::Standard,
            output_path,
            timing: false,
            lscv_folds: 10,
        }
    }
}
