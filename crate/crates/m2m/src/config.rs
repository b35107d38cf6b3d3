//! TOML experiment configuration.
//!
//! Unknown keys are rejected everywhere. Relative paths are resolved
//! against the directory holding the config file.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use m2m_core::m2m::M2mConfig;
use m2m_core::netcore::LrSchedule;
use m2m_core::rebalance::{StrategyKind, StrategySpec};
use m2m_core::train::TrainConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSpec {
    Gaussian {
        classes: usize,
        per_class: usize,
        dim: usize,
        separation: f64,
    },
    Crescents {
        per_class: usize,
        noise: f64,
    },
    Rings {
        classes: usize,
        per_class: usize,
        noise: f64,
    },
    Csv {
        path: PathBuf,
    },
    Idx {
        images: PathBuf,
        labels: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub test_per_class: usize,
    /// Validation size per class as a fraction of `test_per_class`.
    #[serde(default)]
    pub val_fraction: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_per_class: 100,
            val_fraction: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decay {
    #[default]
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImbalanceProfile {
    pub ratio: f64,
    #[serde(default)]
    pub decay: Decay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub hidden: Vec<usize>,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self { hidden: vec![64, 64] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSpec {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub warmup_epochs: usize,
    /// `[epoch, factor]` decay steps; defaults to x0.1 at 80% and 90%.
    pub lr_steps: Option<Vec<(usize, f64)>>,
    pub momentum: f64,
    pub weight_decay: f64,
    /// Switch-over epoch of deferred strategies; defaults to 80%.
    pub defer_epoch: Option<usize>,
}

impl Default for TrainSpec {
    fn default() -> Self {
        let core = TrainConfig::default();
        Self {
            epochs: core.epochs,
            batch_size: core.batch_size,
            lr: core.schedule.base,
            warmup_epochs: core.schedule.warmup_epochs,
            lr_steps: None,
            momentum: core.momentum,
            weight_decay: core.weight_decay,
            defer_epoch: None,
        }
    }
}

impl TrainSpec {
    pub fn defer_epoch(&self) -> usize {
        self.defer_epoch
            .unwrap_or_else(|| StrategySpec::default_defer_epoch(self.epochs))
    }

    pub fn lr_steps(&self) -> Vec<(usize, f64)> {
        self.lr_steps.clone().unwrap_or_else(|| {
            vec![(self.epochs * 4 / 5, 0.1), (self.epochs * 9 / 10, 0.1)]
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyEntry {
    pub name: String,
    pub kind: StrategyKind,
    #[serde(default)]
    pub deferred: bool,
    pub defer_epoch: Option<usize>,
    pub cbrw_beta: Option<f64>,
    pub smote_neighbors: Option<usize>,
    /// Keys overriding the top-level `[m2m]` table for this strategy.
    pub m2m: Option<toml::Table>,
}

impl StrategyEntry {
    pub fn new(name: &str, kind: StrategyKind, deferred: bool) -> Self {
        Self {
            name: name.into(),
            kind,
            deferred,
            defer_epoch: None,
            cbrw_beta: None,
            smote_neighbors: None,
            m2m: None,
        }
    }
}

fn default_strategies() -> Vec<StrategyEntry> {
    use StrategyKind::*;
    vec![
        StrategyEntry::new("ERM", Erm, false),
        StrategyEntry::new("RS", Rs, false),
        StrategyEntry::new("SMOTE", Smote, false),
        StrategyEntry::new("RW", Rw, false),
        StrategyEntry::new("CB-RW", Cbrw, false),
        StrategyEntry::new("DRS", Rs, true),
        StrategyEntry::new("DRW", Rw, true),
        StrategyEntry::new("M2m", M2m, true),
    ]
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Name of the m2m strategy whose settings are tuned.
    pub strategy: String,
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            strategy: "M2m".into(),
            lambda: vec![0.01, 0.1, 0.5],
            beta: vec![0.9, 0.99, 0.999],
            gamma: vec![0.9, 0.99],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub split: SplitSpec,
    pub imbalance: Option<ImbalanceProfile>,
    #[serde(default)]
    pub network: NetworkSpec,
    #[serde(default)]
    pub train: TrainSpec,
    #[serde(default)]
    pub m2m: M2mConfig,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<StrategyEntry>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub sweep: Option<SweepSpec>,
}

/// A strategy with every default filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedStrategy {
    pub name: String,
    pub spec: StrategySpec,
    /// Present for m2m strategies.
    pub m2m: Option<M2mConfig>,
}

impl ExperimentConfig {
    /// Reads, resolves and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text).map_err(|message| Error::Config {
            path: path.to_path_buf(),
            message,
        })?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        cfg.validate().map_err(|e| match e {
            Error::Invalid(message) => Error::Config {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        self.dataset.resolve_paths(base);
        self.output_dir = join(base, &self.output_dir);
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.train.epochs,
            batch_size: self.train.batch_size,
            hidden: self.network.hidden.clone(),
            schedule: LrSchedule {
                base: self.train.lr,
                warmup_epochs: self.train.warmup_epochs,
                steps: self.train.lr_steps(),
            },
            momentum: self.train.momentum,
            weight_decay: self.train.weight_decay,
        }
    }

    pub fn strategies(&self) -> Result<Vec<ResolvedStrategy>> {
        self.strategies.iter().map(|s| self.resolve(s)).collect()
    }

    fn resolve(&self, entry: &StrategyEntry) -> Result<ResolvedStrategy> {
        let mut spec = if entry.deferred {
            StrategySpec::deferred(
                entry.kind,
                entry.defer_epoch.unwrap_or_else(|| self.train.defer_epoch()),
            )
        } else {
            StrategySpec::new(entry.kind)
        };
        if let Some(beta) = entry.cbrw_beta {
            spec.cbrw_beta = beta;
        }
        if let Some(k) = entry.smote_neighbors {
            spec.smote_neighbors = k;
        }
        let m2m = match (entry.kind, &entry.m2m) {
            (StrategyKind::M2m, overrides) => Some(merge_m2m(&self.m2m, overrides.as_ref())?),
            (_, Some(_)) => {
                return Err(Error::Invalid(format!(
                    "strategy `{}`: m2m overrides need kind = \"m2m\"",
                    entry.name
                )))
            }
            (_, None) => None,
        };
        Ok(ResolvedStrategy {
            name: entry.name.clone(),
            spec,
            m2m,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::Invalid(m));
        self.dataset.validate()?;
        if let Some(p) = &self.imbalance {
            if !(p.ratio.is_finite() && p.ratio > 1.0) {
                return invalid(format!("imbalance ratio must exceed 1, got {}", p.ratio));
            }
        }
        if self.split.test_per_class == 0 {
            return invalid("split.test_per_class must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.split.val_fraction) {
            return invalid("split.val_fraction must lie in [0, 1]".into());
        }
        if self.network.hidden.contains(&0) {
            return invalid("network widths must be positive".into());
        }
        if self.seeds.is_empty() {
            return invalid("at least one seed is required".into());
        }
        let mut seen = HashSet::new();
        if let Some(s) = self.seeds.iter().find(|&&s| !seen.insert(s)) {
            return invalid(format!("seed {s} is listed twice"));
        }
        let train = self.train_config();
        train.validate()?;
        if self.strategies.is_empty() {
            return invalid("at least one strategy is required".into());
        }
        let mut names = HashSet::new();
        for s in &self.strategies {
            if s.name.is_empty()
                || !s.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.=()".contains(c))
            {
                return invalid(format!(
                    "strategy name `{}` must be non-empty ASCII letters, digits or -_.=()",
                    s.name
                ));
            }
            if !names.insert(s.name.as_str()) {
                return invalid(format!("strategy `{}` is listed twice", s.name));
            }
        }
        for s in self.strategies()? {
            s.spec.validate(train.epochs)?;
            if let Some(m) = &s.m2m {
                m.validate()?;
            }
        }
        if let Some(sweep) = &self.sweep {
            let target = self.strategies.iter().find(|s| s.name == sweep.strategy);
            if !matches!(target, Some(s) if s.kind == StrategyKind::M2m) {
                return invalid(format!(
                    "sweep.strategy `{}` must name an m2m strategy",
                    sweep.strategy
                ));
            }
            if sweep.lambda.is_empty() || sweep.beta.is_empty() || sweep.gamma.is_empty() {
                return invalid("sweep grids must be non-empty".into());
            }
        }
        Ok(())
    }
}

/// Applies `overrides` on top of `base`; unknown keys are an error.
pub fn merge_m2m(base: &M2mConfig, overrides: Option<&toml::Table>) -> Result<M2mConfig> {
    let Some(overrides) = overrides else {
        return Ok(base.clone());
    };
    let mut table = toml::Table::try_from(base).map_err(|e| Error::Invalid(e.to_string()))?;
    for (k, v) in overrides {
        table.insert(k.clone(), v.clone());
    }
    M2mConfig::deserialize(toml::Value::Table(table))
        .map_err(|e| Error::Invalid(format!("m2m override: {e}")))
}

fn join(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl DatasetSpec {
    fn resolve_paths(&mut self, base: &Path) {
        match self {
            Self::Csv { path } => *path = join(base, path),
            Self::Idx { images, labels } => {
                *images = join(base, images);
                *labels = join(base, labels);
            }
            _ => {}
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Gaussian {
                classes,
                per_class,
                dim,
                separation,
            } => classes >= 2 && per_class > 0 && dim >= 2 && separation.is_finite() && separation >= 0.0,
            Self::Crescents { per_class, noise } => per_class > 0 && noise.is_finite() && noise >= 0.0,
            Self::Rings {
                classes,
                per_class,
                noise,
            } => classes >= 2 && per_class > 0 && noise.is_finite() && noise >= 0.0,
            Self::Csv { .. } | Self::Idx { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("invalid dataset parameters: {self:?}")))
        }
    }
}

/// Input of `gen-data`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub split: SplitSpec,
    pub imbalance: Option<ImbalanceProfile>,
    #[serde(default = "default_data_seed")]
    pub seed: u64,
    pub output_dir: PathBuf,
}

fn default_data_seed() -> u64 {
    1
}

impl DataConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.dataset.resolve_paths(base);
        cfg.output_dir = join(base, &cfg.output_dir);
        cfg.dataset.validate()?;
        Ok(cfg)
    }
}
