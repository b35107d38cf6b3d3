//! Baseline re-balancing: re-sampling, SMOTE, re-weighting, class-balanced
//! re-weighting and their deferred variants.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng as _;
use rand::RngCore;

use crate::datasets::{Batch, LabeledDataset};
use crate::math;
use crate::netcore::Matrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum StrategyKind {
    Erm,
    Rs,
    Smote,
    Rw,
    Cbrw,
    M2m,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrategySpec {
    pub kind: StrategyKind,
    pub deferred: bool,
    pub defer_epoch: usize,
    pub cbrw_beta: f64,
    pub smote_neighbors: usize,
}

impl StrategySpec {
    pub const DEFAULT_CBRW_BETA: f64 = 0.9999;
    pub const DEFAULT_SMOTE_NEIGHBORS: usize = 5;

    /// Non-deferred strategy with default parameters.
    pub fn new(kind: StrategyKind) -> Self {
        Self {
            kind,
            deferred: false,
            defer_epoch: 0,
            cbrw_beta: Self::DEFAULT_CBRW_BETA,
            smote_neighbors: Self::DEFAULT_SMOTE_NEIGHBORS,
        }
    }

    pub fn deferred(kind: StrategyKind, defer_epoch: usize) -> Self {
        Self {
            deferred: true,
            defer_epoch,
            ..Self::new(kind)
        }
    }

    /// Default switch-over point: 80% of training.
    pub fn default_defer_epoch(total_epochs: usize) -> usize {
        total_epochs * 4 / 5
    }

    pub fn validate(&self, total_epochs: usize) -> Result<()> {
        if self.deferred {
            if matches!(self.kind, StrategyKind::Erm | StrategyKind::Smote) {
                return Err(Error::Config(format!("{:?} cannot be deferred", self.kind)));
            }
            if self.defer_epoch >= total_epochs {
                return Err(Error::Config(format!(
                    "defer_epoch {} must be below the epoch count {total_epochs}",
                    self.defer_epoch
                )));
            }
        }
        if !(0.0..1.0).contains(&self.cbrw_beta) {
            return Err(Error::Config("cbrw beta must lie in [0, 1)".into()));
        }
        if self.kind == StrategyKind::Smote && self.smote_neighbors == 0 {
            return Err(Error::Config("SMOTE needs at least one neighbour".into()));
        }
        Ok(())
    }

    /// Whether the strategy-specific behaviour is active at `epoch`.
    pub fn active(&self, epoch: usize) -> bool {
        !self.deferred || epoch >= self.defer_epoch
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampler {
    /// Shuffled pass over the samples.
    Uniform,
    /// Class uniformly at random, then a sample uniformly within it.
    ClassBalanced,
}

/// Sampler, loss weights and generation switch for one epoch.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochPlan {
    pub sampler: Sampler,
    pub class_weights: Option<Vec<f64>>,
    pub generate: bool,
}

/// What a strategy does at `epoch`. SMOTE's augmentation happens once
/// before training, so its per-epoch plan is a plain uniform pass.
pub fn apply_strategy(epoch: usize, spec: &StrategySpec, class_counts: &[usize]) -> EpochPlan {
    let erm = EpochPlan {
        sampler: Sampler::Uniform,
        class_weights: None,
        generate: false,
    };
    if !spec.active(epoch) {
        return erm;
    }
    match spec.kind {
        StrategyKind::Erm | StrategyKind::Smote => erm,
        StrategyKind::Rs => EpochPlan {
            sampler: Sampler::ClassBalanced,
            ..erm
        },
        StrategyKind::Rw => EpochPlan {
            class_weights: Some(rw_weights(class_counts)),
            ..erm
        },
        StrategyKind::Cbrw => EpochPlan {
            class_weights: Some(cbrw_weights(class_counts, spec.cbrw_beta)),
            ..erm
        },
        StrategyKind::M2m => EpochPlan {
            sampler: Sampler::ClassBalanced,
            class_weights: None,
            generate: true,
        },
    }
}

/// Indices of a class-balanced batch of size `m`.
pub fn class_balanced_indices<R: RngCore>(
    class_indices: &[Vec<usize>],
    m: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if let Some(class) = class_indices.iter().position(|c| c.is_empty()) {
        return Err(Error::EmptyClass { class });
    }
    let k = class_indices.len();
    Ok((0..m)
        .map(|_| {
            let pool = &class_indices[rng.random_range(0..k)];
            pool[rng.random_range(0..pool.len())]
        })
        .collect())
}

pub fn class_balanced_batch<R: RngCore>(
    dataset: &LabeledDataset,
    m: usize,
    rng: &mut R,
) -> Result<Batch> {
    let idx = class_balanced_indices(&dataset.class_indices(), m, rng)?;
    Ok(dataset.gather(&idx))
}

fn normalize_mean(mut w: Vec<f64>) -> Vec<f64> {
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    for v in &mut w {
        *v /= mean;
    }
    w
}

/// Inverse-frequency weights, scaled to mean 1.
pub fn rw_weights(class_counts: &[usize]) -> Vec<f64> {
    normalize_mean(class_counts.iter().map(|&n| 1.0 / n as f64).collect())
}

/// Effective number of samples `(1 - beta^n) / (1 - beta)`.
pub fn effective_number(count: usize, beta: f64) -> f64 {
    if beta == 0.0 {
        return if count == 0 { 0.0 } else { 1.0 };
    }
    math::one_minus_pow(beta, count as f64) / (1.0 - beta)
}

/// Inverse effective-number weights, scaled to mean 1.
pub fn cbrw_weights(class_counts: &[usize], beta: f64) -> Vec<f64> {
    normalize_mean(
        class_counts
            .iter()
            .map(|&n| 1.0 / effective_number(n, beta))
            .collect(),
    )
}

/// `a + u (b - a)`.
pub fn interpolate(a: &[f64], b: &[f64], u: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + u * (y - x)).collect()
}

/// Indices of the `count` nearest members of `pool` to `pool[anchor]`
/// (Euclidean, excluding the anchor itself; ties by position in `pool`).
fn nearest_neighbors(inputs: &Matrix, pool: &[usize], anchor: usize, count: usize) -> Vec<usize> {
    let a = inputs.row(pool[anchor]);
    let mut dist: Vec<(f64, usize)> = pool
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != anchor)
        .map(|(_, &i)| {
            let d: f64 = inputs.row(i).iter().zip(a).map(|(x, y)| (x - y) * (x - y)).sum();
            (d, i)
        })
        .collect();
    dist.sort_by(|x, y| x.0.total_cmp(&y.0));
    dist.truncate(count);
    dist.into_iter().map(|(_, i)| i).collect()
}

/// One SMOTE synthetic of class `class`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoteSample {
    pub x: Vec<f64>,
    /// The class had a single sample, so it was duplicated.
    pub duplicated: bool,
}

/// Interpolates a random member of `class` towards one of its `neighbors`
/// nearest same-class samples.
pub fn smote_sample<R: RngCore>(
    dataset: &LabeledDataset,
    class: usize,
    neighbors: usize,
    rng: &mut R,
) -> Result<SmoteSample> {
    let pool = dataset
        .class_indices()
        .into_iter()
        .nth(class)
        .ok_or(Error::LabelOutOfRange {
            label: class,
            classes: dataset.num_classes(),
        })?;
    smote_from_pool(dataset.inputs(), &pool, class, neighbors, rng)
}

fn smote_from_pool<R: RngCore>(
    inputs: &Matrix,
    pool: &[usize],
    class: usize,
    neighbors: usize,
    rng: &mut R,
) -> Result<SmoteSample> {
    match pool.len() {
        0 => Err(Error::EmptyClass { class }),
        1 => {
            log::warn!("SMOTE: class {class} has a single sample, duplicating it");
            Ok(SmoteSample {
                x: inputs.row(pool[0]).to_vec(),
                duplicated: true,
            })
        }
        n => {
            let anchor = rng.random_range(0..n);
            let near = nearest_neighbors(inputs, pool, anchor, neighbors.max(1));
            let other = near[rng.random_range(0..near.len())];
            let u: f64 = rng.random_range(0.0..=1.0);
            Ok(SmoteSample {
                x: interpolate(inputs.row(pool[anchor]), inputs.row(other), u),
                duplicated: false,
            })
        }
    }
}

/// Adds SMOTE synthetics until every class has `N_0` samples.
pub fn smote_oversample<R: RngCore>(
    dataset: &LabeledDataset,
    neighbors: usize,
    rng: &mut R,
) -> Result<LabeledDataset> {
    let target = dataset.class_counts()[0];
    let mut extra = Batch {
        inputs: Matrix::zeros(0, dataset.dim()),
        labels: Vec::new(),
    };
    for (class, pool) in dataset.class_indices().iter().enumerate() {
        for _ in pool.len()..target {
            let s = smote_from_pool(dataset.inputs(), pool, class, neighbors, rng)?;
            extra.inputs.push_row(&s.x)?;
            extra.labels.push(class);
        }
    }
    dataset.extended(&extra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use alloc::vec;

    #[test]
    fn rw_weights_examples() {
        assert_eq!(rw_weights(&[7, 7, 7]), [1.0, 1.0, 1.0]);
        let w = rw_weights(&[100, 1]);
        assert!((w[0] - 2.0 / 101.0).abs() < 1e-15);
        assert!((w[1] - 200.0 / 101.0).abs() < 1e-15);
        let w = rw_weights(&[5000, 50]);
        assert!((w[1] / w[0] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn cbrw_degenerate_cases() {
        assert_eq!(cbrw_weights(&[100, 10, 1], 0.0), [1.0, 1.0, 1.0]);
        for beta in [0.0, 0.5, 0.9999] {
            assert!((effective_number(1, beta) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn class_balanced_single_class_and_singleton() {
        let inputs = Matrix::from_vec(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let ds = LabeledDataset::new(inputs.clone(), vec![0, 0, 0, 0], 1).unwrap();
        let b = class_balanced_batch(&ds, 16, &mut rng::stream(1, &[])).unwrap();
        assert!(b.labels.iter().all(|&y| y == 0));

        let ds = LabeledDataset::new(inputs, vec![0, 0, 0, 1], 2).unwrap();
        let b = class_balanced_batch(&ds, 64, &mut rng::stream(2, &[])).unwrap();
        let minority: Vec<f64> = b
            .labels
            .iter()
            .zip(b.inputs.iter_rows())
            .filter(|(&y, _)| y == 1)
            .map(|(_, r)| r[0])
            .collect();
        assert!(minority.len() > 1);
        assert!(minority.iter().all(|&x| x == 3.0));
    }

    #[test]
    fn smote_edge_cases() {
        assert_eq!(interpolate(&[0.0, 0.0], &[1.0, 1.0], 0.5), [0.5, 0.5]);
        let inputs = Matrix::from_vec(3, 2, vec![1.0, 2.0, 1.0, 2.0, 9.0, 9.0]).unwrap();
        let ds = LabeledDataset::new(inputs, vec![0, 0, 1], 2).unwrap();
        let s = smote_sample(&ds, 0, 5, &mut rng::stream(3, &[])).unwrap();
        assert_eq!(s.x, [1.0, 2.0]);
        let s = smote_sample(&ds, 1, 5, &mut rng::stream(3, &[])).unwrap();
        assert!(s.duplicated);
        assert_eq!(s.x, [9.0, 9.0]);
    }

    #[test]
    fn smote_oversample_balances() {
        let inputs = Matrix::from_vec(6, 1, vec![0.0, 1.0, 2.0, 3.0, 10.0, 11.0]).unwrap();
        let ds = LabeledDataset::new(inputs, vec![0, 0, 0, 0, 1, 1], 2).unwrap();
        let out = smote_oversample(&ds, 5, &mut rng::stream(4, &[])).unwrap();
        assert_eq!(out.class_counts(), [4, 4]);
        for (x, &y) in out.inputs().iter_rows().zip(out.labels()) {
            if y == 1 {
                assert!((10.0..=11.0).contains(&x[0]));
            }
        }
    }

    #[test]
    fn deferral_switches_behaviour() {
        let counts = [100, 10];
        let drs = StrategySpec::deferred(StrategyKind::Rs, 8);
        assert_eq!(apply_strategy(7, &drs, &counts).sampler, Sampler::Uniform);
        assert_eq!(apply_strategy(8, &drs, &counts).sampler, Sampler::ClassBalanced);
        let rw = StrategySpec::new(StrategyKind::Rw);
        let plan = apply_strategy(0, &rw, &counts);
        assert_eq!(plan.class_weights.unwrap(), rw_weights(&counts));
        assert!(StrategySpec::deferred(StrategyKind::Rs, 10).validate(10).is_err());
        assert!(StrategySpec::deferred(StrategyKind::Erm, 1).validate(10).is_err());
    }
}
