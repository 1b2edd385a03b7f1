//! Experiment configuration file.
//!
//! Every key is optional; a missing section falls back to the desk-scale
//! defaults (D = 10, NP = 5·D, 10⁴·D evaluations, 25 runs).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mlcc::de_ops::MutationStrategy;
use serde::{Deserialize, Serialize};

use crate::algorithms::{parse_algorithm, NamedAlgorithm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: SuiteSection,
    pub run: RunSection,
    pub mlcc: MlccSection,
    pub shade: ShadeSection,
    pub bide: BideSection,
    pub fixed_de: FixedDeSection,
    pub stats: StatsSection,
    pub sweep: SweepSection,
    pub motivate: MotivateSection,
    pub ablate: AblateSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSection {
    pub dimension: usize,
    pub seed: u64,
    /// Problem ids to run; empty means the whole suite.
    pub problems: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub runs: usize,
    /// Evaluations per dimension.
    pub budget_multiplier: u64,
    /// NP = population_factor · D unless `population` is set.
    pub population_factor: usize,
    pub population: Option<usize>,
    /// Run `k` uses seed `base_seed + k`.
    pub base_seed: u64,
    pub share_interval: usize,
    pub algorithms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlccSection {
    pub layers: Vec<String>,
    pub n: f64,
    pub synchronous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShadeSection {
    pub memory_f: f64,
    pub memory_cr: f64,
    /// Memory length; defaults to NP.
    pub history: Option<usize>,
    pub archive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BideSection {
    pub archive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedDeSection {
    pub f: f64,
    pub cr: f64,
    pub strategy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSection {
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// The first entry is the baseline.
    pub settings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotivateSection {
    pub algorithms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblateSection {
    pub variants: Vec<String>,
    pub baselines: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            suite: SuiteSection::default(),
            run: RunSection::default(),
            mlcc: MlccSection::default(),
            shade: ShadeSection::default(),
            bide: BideSection::default(),
            fixed_de: FixedDeSection::default(),
            stats: StatsSection::default(),
            sweep: SweepSection::default(),
            motivate: MotivateSection::default(),
            ablate: AblateSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl Default for SuiteSection {
    fn default() -> Self {
        Self {
            dimension: 10,
            seed: 2024,
            problems: Vec::new(),
        }
    }
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            runs: 25,
            budget_multiplier: 10_000,
            population_factor: 5,
            population: None,
            base_seed: 1,
            share_interval: mlcc::framework::DEFAULT_SHARE_INTERVAL,
            algorithms: vec!["mlcc".into(), "shade".into(), "bide".into()],
        }
    }
}

impl Default for MlccSection {
    fn default() -> Self {
        Self {
            layers: vec!["shade".into(), "bide".into()],
            n: mlcc::framework::DEFAULT_N,
            synchronous: false,
        }
    }
}

impl Default for ShadeSection {
    fn default() -> Self {
        Self {
            memory_f: 0.7,
            memory_cr: 0.5,
            history: None,
            archive: true,
        }
    }
}

impl Default for BideSection {
    fn default() -> Self {
        Self { archive: true }
    }
}

impl Default for FixedDeSection {
    fn default() -> Self {
        Self {
            f: 0.7,
            cr: 0.5,
            strategy: "rand/1".into(),
        }
    }
}

impl Default for StatsSection {
    fn default() -> Self {
        Self { alpha: 0.05 }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            settings: ["n=0.05", "n=0.1", "n=0.2", "n=0.5", "n=1.0", "topg=1", "topg=np"]
                .map(String::from)
                .to_vec(),
        }
    }
}

impl Default for MotivateSection {
    fn default() -> Self {
        Self {
            algorithms: vec!["de/rand/1".into(), "de/best/1".into()],
        }
    }
}

impl Default for AblateSection {
    fn default() -> Self {
        Self {
            variants: ["mlcc", "variant-i", "variant-ii", "variant-iii", "variant-iv"]
                .map(String::from)
                .to_vec(),
            baselines: vec!["shade".into(), "bide".into()],
        }
    }
}

impl ExperimentConfig {
    /// Parses TOML text. Errors carry the offending line and column.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| anyhow::anyhow!("{e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn population(&self) -> usize {
        self.run
            .population
            .unwrap_or(self.run.population_factor * self.suite.dimension)
    }

    pub fn max_evaluations(&self) -> u64 {
        self.run.budget_multiplier * self.suite.dimension as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.suite.dimension < 2 {
            bail!("suite.dimension must be >= 2");
        }
        if self.run.runs == 0 {
            bail!("run.runs must be >= 1");
        }
        if self.run.share_interval == 0 {
            bail!("run.share_interval must be >= 1");
        }
        if !(self.stats.alpha > 0.0 && self.stats.alpha < 1.0) {
            bail!("stats.alpha must be in (0, 1)");
        }
        if self.max_evaluations() < self.population() as u64 {
            bail!(
                "budget {} is smaller than the population {}",
                self.max_evaluations(),
                self.population()
            );
        }
        self.fixed_de
            .strategy
            .parse::<MutationStrategy>()
            .context("fixed_de.strategy")?;
        for name in self
            .run
            .algorithms
            .iter()
            .chain(&self.motivate.algorithms)
            .chain(&self.ablate.variants)
            .chain(&self.ablate.baselines)
        {
            parse_algorithm(name, self).with_context(|| format!("algorithm `{name}`"))?;
        }
        for setting in &self.sweep.settings {
            crate::algorithms::sweep_setting(setting, self)
                .with_context(|| format!("sweep setting `{setting}`"))?;
        }
        Ok(())
    }

    /// Runs needed by the statistics commands.
    pub fn require_statistics(&self) -> Result<()> {
        if self.run.runs < 2 {
            bail!(
                "statistical comparison needs at least 2 runs per problem, got {}",
                self.run.runs
            );
        }
        Ok(())
    }

    pub fn algorithms(&self, names: &[String]) -> Result<Vec<NamedAlgorithm>> {
        names.iter().map(|n| parse_algorithm(n, self)).collect()
    }
}
