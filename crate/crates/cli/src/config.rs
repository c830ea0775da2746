//! Configuration file. Every section and key is optional; command-line flags
//! take precedence over file values, which take precedence over defaults.

use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use aphase_core::data::DEFAULT_CHANNEL_PRIORITY;
use aphase_core::dsp::SpectrogramConfig;
use aphase_core::experiments::{ExperimentConfig, ValidationBasis};
use aphase_core::TrainConfig;
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub channel_priority: Vec<String>,
    pub stft: SpectrogramConfig,
    pub train: TrainConfig,
    pub experiment: ExperimentSection,
    pub paths: Paths,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            channel_priority: DEFAULT_CHANNEL_PRIORITY.iter().map(|s| s.to_string()).collect(),
            stft: SpectrogramConfig::default(),
            train: TrainConfig::default(),
            experiment: ExperimentSection::default(),
            paths: Paths::default(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub fractions: Vec<f64>,
    pub runs_per_cell: usize,
    pub base_fraction: f64,
    pub validated_fractions: Vec<f64>,
    pub base_seed: u64,
    pub jobs: usize,
    pub validation_basis: ValidationBasis,
    pub warm_start: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            fractions: vec![0.125, 0.25, 0.375, 0.5],
            runs_per_cell: 20,
            base_fraction: 0.125,
            validated_fractions: vec![0.2, 0.3, 0.4, 0.5],
            base_seed: 0,
            jobs: 1,
            validation_basis: ValidationBasis::Pool,
            warm_start: false,
        }
    }
}

/// Default output directories, used when an output flag is omitted.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub datasets: PathBuf,
    pub checkpoints: PathBuf,
    pub reports: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            datasets: "datasets".into(),
            checkpoints: "checkpoints".into(),
            reports: "reports".into(),
        }
    }
}

impl CliConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let config: Self = toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        config
            .validate()
            .with_context(|| format!("invalid config {}", path.display()))?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.channel_priority.is_empty(), "channel_priority must not be empty");
        self.stft.validate()?;
        self.experiment_config().validate()?;
        let e = &self.experiment;
        let unit = |f: &f64| *f > 0.0 && *f < 1.0;
        ensure!(e.fractions.iter().all(unit), "fractions must lie in (0, 1)");
        ensure!(unit(&e.base_fraction), "base_fraction must lie in (0, 1)");
        ensure!(
            e.validated_fractions.iter().all(unit),
            "validated_fractions must lie in (0, 1)"
        );
        Ok(())
    }

    pub fn experiment_config(&self) -> ExperimentConfig {
        let e = &self.experiment;
        ExperimentConfig {
            train: self.train.clone(),
            runs_per_cell: e.runs_per_cell,
            base_seed: e.base_seed,
            jobs: e.jobs,
            validation_basis: e.validation_basis,
            warm_start: e.warm_start,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let c: CliConfig = toml::from_str("[train]\nmax_epochs = 5\n[experiment]\njobs = 2\n").unwrap();
        assert_eq!(c.train.max_epochs, 5);
        assert_eq!(c.train.batch_size, 128);
        assert_eq!(c.experiment.jobs, 2);
        assert_eq!(c.experiment.runs_per_cell, 20);
        assert_eq!(c.channel_priority[0], "C4-A1");
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(toml::from_str::<CliConfig>("[train]\nepochs = 5\n").is_err());
        let c: CliConfig = toml::from_str("[experiment]\nfractions = [0.5, 1.5]\n").unwrap();
        assert!(c.validate().is_err());
        let c: CliConfig = toml::from_str("[stft]\nhop = 64\n").unwrap();
        assert!(c.validate().is_err());
    }
}
