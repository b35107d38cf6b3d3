//! Mini-batch training shared by every re-balancing strategy.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::datasets::LabeledDataset;
use crate::m2m::{GenerationContext, GenerationOutcome, GenerationStats, M2mConfig};
use crate::netcore::{cross_entropy, weighted_cross_entropy, LrSchedule, Net, Sgd};
use crate::rebalance::{apply_strategy, class_balanced_indices, smote_oversample, Sampler, StrategyKind, StrategySpec};
use crate::rng::{self, tag};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Hidden layer widths of the dense relu network.
    pub hidden: Vec<usize>,
    pub schedule: LrSchedule,
    pub momentum: f64,
    pub weight_decay: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 40,
            batch_size: 64,
            hidden: alloc::vec![64, 64],
            schedule: LrSchedule {
                base: 0.1,
                warmup_epochs: 5,
                steps: Vec::new(),
            },
            momentum: 0.9,
            weight_decay: 2e-4,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("epochs and batch_size must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config("momentum must lie in [0, 1)".into()));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::Config("weight_decay must be finite and non-negative".into()));
        }
        self.schedule.validate()
    }
}

/// Generation inputs for the M2m strategy.
#[derive(Clone, Copy)]
pub struct GenerationSetup<'a> {
    pub config: &'a M2mConfig,
    pub guides: &'a [Net],
    pub seed_pools: Option<&'a [Vec<usize>]>,
}

#[derive(Clone, Debug)]
pub struct TrainRun {
    pub net: Net,
    /// Mean mini-batch loss of every epoch.
    pub epoch_losses: Vec<f64>,
    pub generation: GenerationStats,
}

/// Trains a fresh network on `data` with `strategy`.
///
/// Random streams: the initial weights, the batch sampler and every
/// generation position draw from separate streams of `seed`, so enabling
/// generation never changes which batches are drawn.
pub fn train(
    data: &LabeledDataset,
    cfg: &TrainConfig,
    strategy: &StrategySpec,
    generation: Option<GenerationSetup<'_>>,
    seed: u64,
    sink: &mut dyn FnMut(&GenerationOutcome),
) -> Result<TrainRun> {
    cfg.validate()?;
    strategy.validate(cfg.epochs)?;
    let smoted;
    let work = if strategy.kind == StrategyKind::Smote {
        let mut rng = rng::stream(seed, &[tag::SMOTE]);
        smoted = smote_oversample(data, strategy.smote_neighbors, &mut rng)?;
        &smoted
    } else {
        data
    };
    let class_indices = work.class_indices();
    let context = match (strategy.kind, generation) {
        (StrategyKind::M2m, Some(g)) => Some(GenerationContext::new(
            data,
            &class_indices,
            g.config,
            g.guides,
            g.seed_pools,
        )?),
        (StrategyKind::M2m, None) => {
            return Err(Error::Config("the m2m strategy needs a generation setup".into()))
        }
        _ => None,
    };

    let mut net = Net::dense(
        data.dim(),
        &cfg.hidden,
        data.num_classes(),
        &mut rng::stream(seed, &[tag::INIT]),
    );
    let mut sgd = Sgd::new(&net, cfg.schedule.base, cfg.momentum, cfg.weight_decay);
    let mut sampler_rng = rng::stream(seed, &[tag::SAMPLER]);
    let n = work.len();
    let m = cfg.batch_size;
    let steps = n.div_ceil(m);
    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut stats = GenerationStats::default();

    for epoch in 0..cfg.epochs {
        let plan = apply_strategy(epoch, strategy, data.class_counts());
        if plan.sampler == Sampler::Uniform {
            order.shuffle(&mut sampler_rng);
        }
        let mut total = 0.0;
        for step in 0..steps {
            let indices = match plan.sampler {
                Sampler::Uniform => order[step * m..((step + 1) * m).min(n)].to_vec(),
                Sampler::ClassBalanced => class_balanced_indices(&class_indices, m, &mut sampler_rng)?,
            };
            let mut batch = work.gather(&indices);
            if plan.generate {
                if let Some(ctx) = &context {
                    let stream = rng::derive_seed(seed, &[tag::GENERATION, epoch as u64, step as u64]);
                    for outcome in ctx.generate_for_batch(&net, &mut batch, stream)? {
                        stats.record(outcome.status);
                        sink(&outcome);
                    }
                }
            }
            let trace = net.trace(&batch.inputs)?;
            let loss = match &plan.class_weights {
                Some(w) => weighted_cross_entropy(trace.logits(), &batch.labels, w)?,
                None => cross_entropy(trace.logits(), &batch.labels)?,
            };
            if !loss.loss.is_finite() {
                return Err(Error::NonFinite("training loss"));
            }
            total += loss.loss;
            let grads = net.backward(&trace, &loss.grad)?;
            sgd.lr = cfg.schedule.rate(epoch, step as f64 / steps as f64);
            sgd.step(&mut net, &grads)?;
        }
        epoch_losses.push(total / steps as f64);
    }
    Ok(TrainRun {
        net,
        epoch_losses,
        generation: stats,
    })
}
