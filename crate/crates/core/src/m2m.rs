//! Major-to-minor translation.
//!
//! A synthetic sample of a minority class `k` is produced by moving a seed
//! `x0` of a more frequent class `k0` along normalised gradient steps of
//!
//! ```text
//! CE(g; x, k) + lambda * f_{k0}(x)
//! ```
//!
//! where `g` is a classifier pre-trained on the imbalanced data and `f` is
//! the network being trained. The result is kept only when the final loss
//! stays under `gamma` and a Bernoulli draw with probability
//! `beta^max(N_k0 - N_k, 0)` does not reject it; otherwise a real sample of
//! class `k` takes its place.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::slice;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand::RngCore;

use crate::datasets::{Batch, LabeledDataset};
use crate::math;
use crate::metrics::{evaluate, EvalReport};
use crate::netcore::{Net, ObjectiveTerm};
use crate::rebalance::{StrategyKind, StrategySpec};
use crate::rng::{self, tag};
use crate::train::{train, TrainConfig, TrainRun};
use crate::{Error, Result};

/// Generation hyperparameters and ablation switches.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct M2mConfig {
    /// Weight of the `f_{k0}` logit penalty.
    pub lambda: f64,
    /// Base of the rejection probability, in `[0, 1)`.
    pub beta: f64,
    /// Largest accepted generation loss.
    pub gamma: f64,
    /// Step size of each normalised gradient step.
    pub step_size: f64,
    /// Number of gradient steps.
    pub steps: usize,
    /// Half-width of the uniform noise added to the seed.
    pub init_noise: f64,
    /// Generate with `f` instead of a separate `g`.
    pub use_self_as_g: bool,
    /// Over-sample the seed itself instead of the translated sample.
    pub clean_seed: bool,
    /// Label accepted samples with a random class other than `k0` and `k`.
    pub random_target_label: bool,
    /// Skip the Bernoulli rejection.
    pub disable_reject: bool,
    /// Skip the `gamma` threshold.
    pub disable_gamma: bool,
    /// Restrict seeds to a fixed random subset of this size per class.
    pub seed_pool: Option<usize>,
    /// Number of pre-trained classifiers averaged in the generation loss.
    pub ensemble_size: usize,
    /// Seed-class draws allowed before giving up on one batch position.
    pub retry_budget: usize,
}

impl Default for M2mConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            beta: 0.999,
            gamma: 0.9,
            step_size: 0.1,
            steps: 10,
            init_noise: 0.01,
            use_self_as_g: false,
            clean_seed: false,
            random_target_label: false,
            disable_reject: false,
            disable_gamma: false,
            seed_pool: None,
            ensemble_size: 1,
            retry_budget: 10,
        }
    }
}

impl M2mConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(format!("m2m: {msg}")));
        if !(0.0..1.0).contains(&self.beta) {
            return fail("beta must lie in [0, 1)");
        }
        if self.steps == 0 {
            return fail("steps must be at least 1");
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return fail("step_size must be positive");
        }
        if !self.disable_gamma && !(self.gamma > 0.0) {
            return fail("gamma must be positive");
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return fail("lambda must be finite and non-negative");
        }
        if !(self.init_noise >= 0.0 && self.init_noise.is_finite()) {
            return fail("init_noise must be finite and non-negative");
        }
        if self.ensemble_size == 0 {
            return fail("ensemble_size must be at least 1");
        }
        if self.seed_pool == Some(0) {
            return fail("seed_pool must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum GenerationStatus {
    Accepted,
    RejectedBernoulli,
    RejectedGamma,
    /// No seed class exists; a real sample was duplicated.
    ReplacedReal,
    /// No seed of the drawn classes was found within the retry budget.
    Skipped,
}

/// One generation attempt.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenerationOutcome {
    pub seed_class: usize,
    pub target_class: usize,
    /// Label the added sample carries.
    pub label: usize,
    /// Seed plus initial noise.
    pub start: Vec<f64>,
    /// Result of the gradient steps.
    pub translated: Vec<f64>,
    /// Generation loss at `translated` (NaN when nothing was translated).
    pub loss: f64,
    pub status: GenerationStatus,
}

/// Counts of generation outcomes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenerationStats {
    pub attempts: usize,
    pub accepted: usize,
    pub rejected_bernoulli: usize,
    pub rejected_gamma: usize,
    pub replaced_real: usize,
    pub skipped: usize,
}

impl GenerationStats {
    pub fn record(&mut self, status: GenerationStatus) {
        self.attempts += 1;
        match status {
            GenerationStatus::Accepted => self.accepted += 1,
            GenerationStatus::RejectedBernoulli => self.rejected_bernoulli += 1,
            GenerationStatus::RejectedGamma => self.rejected_gamma += 1,
            GenerationStatus::ReplacedReal => self.replaced_real += 1,
            GenerationStatus::Skipped => self.skipped += 1,
        }
    }
}

/// Result of [`translate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Translation {
    pub start: Vec<f64>,
    pub x: Vec<f64>,
    pub loss: f64,
}

/// Mean cross-entropy of the guides toward `target` at `x`.
pub fn generation_loss(guides: &[Net], x: &[f64], target: usize) -> Result<f64> {
    let mut total = 0.0;
    for g in guides {
        let logits = g.logits(x)?;
        if target >= logits.len() {
            return Err(Error::LabelOutOfRange {
                label: target,
                classes: logits.len(),
            });
        }
        total += math::log_sum_exp(&logits) - logits[target];
    }
    Ok(total / guides.len() as f64)
}

/// Moves `x0 + noise` through `cfg.steps` normalised gradient steps of
/// `mean_g CE(g; x, target) + lambda * f_{seed_class}(x)`.
pub fn translate<R: RngCore>(
    guides: &[Net],
    f: &Net,
    x0: &[f64],
    seed_class: usize,
    target: usize,
    cfg: &M2mConfig,
    rng: &mut R,
) -> Result<Translation> {
    if guides.is_empty() {
        return Err(Error::Config("translation needs at least one guide network".into()));
    }
    if seed_class == target {
        return Err(Error::Config(format!(
            "seed class and target class are both {target}"
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("seed sample"));
    }
    let mut x: Vec<f64> = x0
        .iter()
        .map(|&v| {
            if cfg.init_noise > 0.0 {
                v + rng.random_range(-cfg.init_noise..=cfg.init_noise)
            } else {
                v
            }
        })
        .collect();
    let start = x.clone();
    let ce = [ObjectiveTerm::CrossEntropy {
        target,
        weight: 1.0 / guides.len() as f64,
    }];
    let penalty = [ObjectiveTerm::Logit {
        class: seed_class,
        weight: cfg.lambda,
    }];
    let mut grad = vec![0.0; x.len()];
    for step in 0..cfg.steps {
        grad.iter_mut().for_each(|v| *v = 0.0);
        for g in guides {
            let (_, dg) = g.input_gradient(&x, &ce)?;
            grad.iter_mut().zip(&dg).for_each(|(a, b)| *a += b);
        }
        if cfg.lambda != 0.0 {
            let (_, df) = f.input_gradient(&x, &penalty)?;
            grad.iter_mut().zip(&df).for_each(|(a, b)| *a += b);
        }
        let norm = math::l2_norm(&grad);
        if !(norm > 0.0 && norm.is_finite()) {
            log::debug!("translation step {step}: gradient norm {norm}, step skipped");
            continue;
        }
        let scale = cfg.step_size / norm;
        x.iter_mut().zip(&grad).for_each(|(xi, gi)| *xi -= scale * gi);
    }
    let loss = generation_loss(guides, &x, target)?;
    Ok(Translation { start, x, loss })
}

/// One Bernoulli draw of the rejection rule; `true` means rejected.
pub fn draw_reject<R: RngCore>(n_seed: usize, n_target: usize, beta: f64, rng: &mut R) -> bool {
    rng.random::<f64>() < reject_probability(n_seed, n_target, beta)
}

/// `beta^max(n_seed - n_target, 0)`.
pub fn reject_probability(n_seed: usize, n_target: usize, beta: f64) -> f64 {
    let gap = n_seed.saturating_sub(n_target);
    math::pow(beta, gap as f64)
}

/// `Q(k0 | target) ∝ 1 - beta^max(N_k0 - N_target, 0)`.
///
/// Returns `None` when no class is larger than `target`.
pub fn seed_class_distribution(class_counts: &[usize], target: usize, beta: f64) -> Option<Vec<f64>> {
    let n_target = *class_counts.get(target)?;
    let accept: Vec<f64> = class_counts
        .iter()
        .map(|&n| {
            let gap = n.saturating_sub(n_target);
            if gap == 0 {
                0.0
            } else {
                math::one_minus_pow(beta, gap as f64)
            }
        })
        .collect();
    let total: f64 = accept.iter().sum();
    if total <= 0.0 {
        return None;
    }
    Some(accept.into_iter().map(|a| a / total).collect())
}

/// Probability of attempting a generation at a batch position of class
/// `class`: `1 - N_class / N_0`.
pub fn generation_probability(class_counts: &[usize], class: usize) -> f64 {
    1.0 - class_counts[class] as f64 / class_counts[0] as f64
}

/// A fixed random subset of at most `size` indices per class.
pub fn seed_pools(data: &LabeledDataset, size: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = rng::stream(seed, &[tag::SEED_POOL]);
    data.class_indices()
        .into_iter()
        .map(|mut idx| {
            idx.shuffle(&mut rng);
            idx.truncate(size);
            idx.sort_unstable();
            idx
        })
        .collect()
}

fn random_other_label<R: RngCore>(classes: usize, a: usize, b: usize, rng: &mut R) -> Result<usize> {
    if classes < 3 {
        return Err(Error::Config("random target labels need at least three classes".into()));
    }
    let excluded = if a == b { 1 } else { 2 };
    let mut pick = rng.random_range(0..classes - excluded);
    for skip in [a.min(b), a.max(b)] {
        if pick >= skip {
            pick += 1;
        }
    }
    Ok(pick)
}

/// Everything generation needs besides the live network.
pub struct GenerationContext<'a> {
    pub data: &'a LabeledDataset,
    pub class_indices: &'a [Vec<usize>],
    pub config: &'a M2mConfig,
    /// Pre-trained guides; ignored when `config.use_self_as_g`.
    pub guides: &'a [Net],
    pub seed_pools: Option<&'a [Vec<usize>]>,
    seed_dists: Vec<Option<WeightedIndex<f64>>>,
}

impl<'a> GenerationContext<'a> {
    pub fn new(
        data: &'a LabeledDataset,
        class_indices: &'a [Vec<usize>],
        config: &'a M2mConfig,
        guides: &'a [Net],
        seed_pools: Option<&'a [Vec<usize>]>,
    ) -> Result<Self> {
        config.validate()?;
        if !config.use_self_as_g && guides.is_empty() {
            return Err(Error::Config("m2m needs a pre-trained guide network".into()));
        }
        let counts = data.class_counts();
        let seed_dists = (0..counts.len())
            .map(|k| {
                seed_class_distribution(counts, k, config.beta)
                    .map(|q| WeightedIndex::new(q).expect("normalised weights"))
            })
            .collect();
        Ok(Self {
            data,
            class_indices,
            config,
            guides,
            seed_pools,
            seed_dists,
        })
    }

    fn guides_for<'n>(&'n self, f: &'n Net) -> &'n [Net] {
        if self.config.use_self_as_g {
            slice::from_ref(f)
        } else {
            self.guides
        }
    }

    fn real_sample<R: RngCore>(&self, class: usize, rng: &mut R) -> &'a [f64] {
        let pool = &self.class_indices[class];
        self.data.inputs().row(pool[rng.random_range(0..pool.len())])
    }

    /// Translates `x0` toward `target` and applies both rejection rules.
    /// Returns the outcome and the sample that should be used.
    fn attempt<R: RngCore>(
        &self,
        f: &Net,
        x0: &[f64],
        seed_class: usize,
        target: usize,
        rng: &mut R,
    ) -> Result<(GenerationOutcome, Vec<f64>)> {
        let cfg = self.config;
        let counts = self.data.class_counts();
        let t = translate(self.guides_for(f), f, x0, seed_class, target, cfg, rng)?;
        let bernoulli =
            !cfg.disable_reject && draw_reject(counts[seed_class], counts[target], cfg.beta, rng);
        let over_gamma = !t.loss.is_finite() || (!cfg.disable_gamma && t.loss > cfg.gamma);
        let status = if over_gamma {
            GenerationStatus::RejectedGamma
        } else if bernoulli {
            GenerationStatus::RejectedBernoulli
        } else {
            GenerationStatus::Accepted
        };
        let (sample, label) = if status == GenerationStatus::Accepted {
            let label = if cfg.random_target_label {
                random_other_label(counts.len(), seed_class, target, rng)?
            } else {
                target
            };
            let sample = if cfg.clean_seed { x0.to_vec() } else { t.x.clone() };
            (sample, label)
        } else {
            (self.real_sample(target, rng).to_vec(), target)
        };
        let outcome = GenerationOutcome {
            seed_class,
            target_class: target,
            label,
            start: t.start,
            translated: t.x,
            loss: t.loss,
            status,
        };
        Ok((outcome, sample))
    }

    fn pool_seed<R: RngCore>(&self, pools: &[Vec<usize>], class: usize, rng: &mut R) -> &'a [f64] {
        let pool = &pools[class];
        self.data.inputs().row(pool[rng.random_range(0..pool.len())])
    }

    /// Batch-wise generation on a class-balanced mini-batch.
    ///
    /// Each position `i` independently attempts a generation with
    /// probability `1 - N_{y_i} / N_0`. The seed class is drawn from `Q`
    /// until a class present in the batch comes up (at most
    /// `retry_budget` draws) and the seed is a random batch member of that
    /// class. With a limited seed pool, the seed is drawn from the pool
    /// instead. Accepted samples replace position `i`; rejected ones are
    /// replaced by a random real sample of class `y_i`.
    ///
    /// Position `i` uses its own stream derived from `stream_seed`.
    pub fn generate_for_batch(
        &self,
        f: &Net,
        batch: &mut Batch,
        stream_seed: u64,
    ) -> Result<Vec<GenerationOutcome>> {
        let counts = self.data.class_counts();
        let snapshot = batch.clone();
        let mut positions: Vec<Vec<usize>> = vec![Vec::new(); counts.len()];
        for (i, &y) in snapshot.labels.iter().enumerate() {
            positions[y].push(i);
        }
        let mut outcomes = Vec::new();
        for (i, &y) in snapshot.labels.iter().enumerate() {
            let mut rng = rng::stream(stream_seed, &[i as u64]);
            if rng.random::<f64>() >= generation_probability(counts, y) {
                continue;
            }
            let Some(q) = &self.seed_dists[y] else {
                continue;
            };
            let mut seed = None;
            let mut last = 0;
            for _ in 0..self.config.retry_budget.max(1) {
                let k0 = q.sample(&mut rng);
                last = k0;
                if let Some(pools) = self.seed_pools {
                    seed = Some((k0, self.pool_seed(pools, k0, &mut rng)));
                    break;
                }
                let here = &positions[k0];
                if !here.is_empty() {
                    let j = here[rng.random_range(0..here.len())];
                    seed = Some((k0, snapshot.inputs.row(j)));
                    break;
                }
            }
            let Some((k0, x0)) = seed else {
                log::debug!("no seed for batch position {i} (class {y}) within the retry budget");
                outcomes.push(GenerationOutcome {
                    seed_class: last,
                    target_class: y,
                    label: y,
                    start: Vec::new(),
                    translated: Vec::new(),
                    loss: f64::NAN,
                    status: GenerationStatus::Skipped,
                });
                continue;
            };
            let (outcome, sample) = self.attempt(f, x0, k0, y, &mut rng)?;
            batch.inputs.row_mut(i).copy_from_slice(&sample);
            batch.labels[i] = outcome.label;
            outcomes.push(outcome);
        }
        Ok(outcomes)
    }

    /// Offline balancing: adds `N_0 - N_k` samples to every class `k`.
    pub fn build_balanced_dataset(
        &self,
        f: &Net,
        seed: u64,
    ) -> Result<(LabeledDataset, Vec<GenerationOutcome>)> {
        let counts = self.data.class_counts();
        let mut extra = Batch {
            inputs: crate::netcore::Matrix::zeros(0, self.data.dim()),
            labels: Vec::new(),
        };
        let mut outcomes = Vec::new();
        for k in 1..counts.len() {
            for i in 0..counts[0] - counts[k] {
                let mut rng = rng::stream(seed, &[tag::GENERATION, k as u64, i as u64]);
                let Some(q) = &self.seed_dists[k] else {
                    let x = self.real_sample(k, &mut rng);
                    extra.inputs.push_row(x)?;
                    extra.labels.push(k);
                    outcomes.push(GenerationOutcome {
                        seed_class: k,
                        target_class: k,
                        label: k,
                        start: Vec::new(),
                        translated: Vec::new(),
                        loss: f64::NAN,
                        status: GenerationStatus::ReplacedReal,
                    });
                    continue;
                };
                let k0 = q.sample(&mut rng);
                let x0 = match self.seed_pools {
                    Some(pools) => self.pool_seed(pools, k0, &mut rng),
                    None => self.real_sample(k0, &mut rng),
                };
                let (outcome, sample) = self.attempt(f, x0, k0, k, &mut rng)?;
                extra.inputs.push_row(&sample)?;
                extra.labels.push(outcome.label);
                outcomes.push(outcome);
            }
        }
        Ok((self.data.extended(&extra)?, outcomes))
    }
}

/// Trains member `member` of the guide ensemble by ERM.
pub fn train_guide(data: &LabeledDataset, cfg: &TrainConfig, seed: u64, member: usize) -> Result<Net> {
    let erm = StrategySpec::new(StrategyKind::Erm);
    let s = rng::derive_seed(seed, &[tag::GUIDE, member as u64]);
    Ok(train(data, cfg, &erm, None, s, &mut |_| {})?.net)
}

/// Trains `count` ERM classifiers to serve as generation guides.
pub fn train_guides(
    data: &LabeledDataset,
    cfg: &TrainConfig,
    count: usize,
    seed: u64,
) -> Result<Vec<Net>> {
    (0..count).map(|j| train_guide(data, cfg, seed, j)).collect()
}

/// Result of [`train_m2m`].
#[derive(Clone, Debug)]
pub struct M2mRun {
    pub run: TrainRun,
    pub guides: Vec<Net>,
    pub report: EvalReport,
}

/// Two-phase M2m training.
///
/// Phase 1 trains the guides by ERM (unless they are supplied, or `f`
/// generates for itself). Phase 2 trains `f` with `strategy`, which must be
/// of kind [`StrategyKind::M2m`]: plain ERM before its defer epoch, then
/// class-balanced batches with generation. The report is computed on `test`.
pub fn train_m2m(
    data: &LabeledDataset,
    test: &LabeledDataset,
    train_cfg: &TrainConfig,
    m2m_cfg: &M2mConfig,
    strategy: &StrategySpec,
    guides: Option<Vec<Net>>,
    seed: u64,
    sink: &mut dyn FnMut(&GenerationOutcome),
) -> Result<M2mRun> {
    if strategy.kind != StrategyKind::M2m {
        return Err(Error::Config("train_m2m needs an m2m strategy".into()));
    }
    let guides = match guides {
        Some(g) => g,
        None if m2m_cfg.use_self_as_g => Vec::new(),
        None => train_guides(data, train_cfg, m2m_cfg.ensemble_size, seed)?,
    };
    let pools = m2m_cfg
        .seed_pool
        .map(|size| seed_pools(data, size, seed));
    let setup = crate::train::GenerationSetup {
        config: m2m_cfg,
        guides: &guides,
        seed_pools: pools.as_deref(),
    };
    let run = train(data, train_cfg, strategy, Some(setup), seed, sink)?;
    let report = evaluate(&run.net, test, data.class_counts())?;
    Ok(M2mRun { run, guides, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Activation, Layer, Matrix};

    fn linear(weights: Vec<f64>, classes: usize, dim: usize) -> Net {
        let layer = Layer::new(
            Matrix::from_vec(classes, dim, weights).unwrap(),
            vec![0.0; classes],
            Activation::Identity,
        )
        .unwrap();
        Net::new(vec![layer]).unwrap()
    }

    #[test]
    fn reject_probability_examples() {
        assert!((reject_probability(4702, 100, 0.999) - 0.01).abs() < 1e-4);
        assert!((reject_probability(46149, 100, 0.9999) - 0.01).abs() < 1e-4);
        assert_eq!(reject_probability(10, 10, 0.9), 1.0);
        assert_eq!(reject_probability(5, 10, 0.0), 1.0);
    }

    #[test]
    fn seed_distribution_examples() {
        assert_eq!(seed_class_distribution(&[100, 10], 1, 0.99).unwrap(), [1.0, 0.0]);
        assert!(seed_class_distribution(&[100, 10], 0, 0.99).is_none());
        assert!(seed_class_distribution(&[7, 7, 7], 2, 0.99).is_none());
        // unnormalised (1 - 0.999^900, 1 - 0.999^400)
        let a = 1.0 - 0.999f64.powi(900);
        let b = 1.0 - 0.999f64.powi(400);
        let q = seed_class_distribution(&[1000, 500, 100], 2, 0.999).unwrap();
        assert!((a - 0.5936).abs() < 1e-3 && (b - 0.3298).abs() < 1e-3);
        assert!((q[0] - a / (a + b)).abs() < 1e-12);
        assert!((q[1] - b / (a + b)).abs() < 1e-12);
        assert_eq!(q[2], 0.0);
        assert!((q[0] - 0.6428).abs() < 1e-3);
    }

    #[test]
    fn generation_probability_examples() {
        assert_eq!(generation_probability(&[5000, 50], 0), 0.0);
        assert!((generation_probability(&[5000, 50], 1) - 0.99).abs() < 1e-15);
        assert_eq!(generation_probability(&[30, 30, 30], 2), 0.0);
    }

    #[test]
    fn zero_step_size_keeps_the_noisy_seed() {
        let g = linear(vec![1.0, 0.0, 0.0, 1.0], 2, 2);
        let cfg = M2mConfig {
            steps: 1,
            step_size: 0.0,
            ..M2mConfig::default()
        };
        let x0 = [0.3, -0.2];
        let t = translate(slice::from_ref(&g), &g, &x0, 0, 1, &cfg, &mut rng::stream(1, &[])).unwrap();
        assert_eq!(t.x, t.start);
        assert!(t.start.iter().zip(&x0).all(|(s, x)| (s - x).abs() <= 0.01));
        let expected = generation_loss(slice::from_ref(&g), &t.start, 1).unwrap();
        assert_eq!(t.loss, expected);
    }

    #[test]
    fn stationary_point_skips_the_step() {
        // all-zero guide: softmax is uniform, input gradient is zero
        let g = linear(vec![0.0; 6], 3, 2);
        let cfg = M2mConfig {
            lambda: 0.0,
            init_noise: 0.0,
            ..M2mConfig::default()
        };
        let t = translate(slice::from_ref(&g), &g, &[1.0, 2.0], 0, 2, &cfg, &mut rng::stream(1, &[])).unwrap();
        assert_eq!(t.x, [1.0, 2.0]);
    }

    #[test]
    fn same_seed_and_target_is_rejected() {
        let g = linear(vec![1.0, 0.0, 0.0, 1.0], 2, 2);
        let cfg = M2mConfig::default();
        assert!(translate(slice::from_ref(&g), &g, &[0.0, 0.0], 1, 1, &cfg, &mut rng::stream(1, &[])).is_err());
    }

    #[test]
    fn random_other_label_excludes_both() {
        let mut r = rng::stream(9, &[]);
        for _ in 0..200 {
            let l = random_other_label(5, 3, 1, &mut r).unwrap();
            assert!(l < 5 && l != 3 && l != 1);
        }
        assert!(random_other_label(2, 0, 1, &mut r).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(M2mConfig::default().validate().is_ok());
        let bad = M2mConfig { beta: 1.0, ..M2mConfig::default() };
        assert!(bad.validate().is_err());
        let bad = M2mConfig { steps: 0, ..M2mConfig::default() };
        assert!(bad.validate().is_err());
        let ok = M2mConfig {
            gamma: 0.0,
            disable_gamma: true,
            ..M2mConfig::default()
        };
        assert!(ok.validate().is_ok());
    }
}
