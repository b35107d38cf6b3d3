//! Labeled datasets, synthetic generators and the long-tail transform.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::math;
use crate::netcore::Matrix;
use crate::rng::{self, tag};
use crate::{Error, Result};

/// Inputs with zero-based class labels.
///
/// Classes are re-indexed on construction so that `class_counts` is
/// non-increasing: class 0 is the most frequent. Ties keep the original
/// label order. `class_ids` maps each class index back to the label it
/// carried in the data handed to [`LabeledDataset::new`].
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    inputs: Matrix,
    labels: Vec<usize>,
    class_counts: Vec<usize>,
    class_ids: Vec<usize>,
}

/// A materialised mini-batch.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub inputs: Matrix,
    pub labels: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(inputs: Matrix, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if labels.len() != inputs.rows() {
            return Err(Error::Shape {
                context: "dataset labels",
                expected: inputs.rows(),
                found: labels.len(),
            });
        }
        if !inputs.is_finite() {
            return Err(Error::NonFinite("dataset inputs"));
        }
        let mut counts = vec![0usize; num_classes];
        for &y in &labels {
            if y >= num_classes {
                return Err(Error::LabelOutOfRange {
                    label: y,
                    classes: num_classes,
                });
            }
            counts[y] += 1;
        }
        if let Some(class) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass { class });
        }
        let mut order: Vec<usize> = (0..num_classes).collect();
        order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
        let mut rank = vec![0usize; num_classes];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }
        let labels = labels.into_iter().map(|y| rank[y]).collect();
        let class_counts = order.iter().map(|&c| counts[c]).collect();
        Ok(Self {
            inputs,
            labels,
            class_counts,
            class_ids: order,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn class_ids(&self) -> &[usize] {
        &self.class_ids
    }

    pub fn sample(&self, i: usize) -> (&[f64], usize) {
        (self.inputs.row(i), self.labels[i])
    }

    pub fn is_balanced(&self) -> bool {
        self.class_counts.windows(2).all(|w| w[0] == w[1])
    }

    /// Sample indices grouped by class, ascending within each class.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.class_counts.iter().map(|&c| Vec::with_capacity(c)).collect();
        for (i, &y) in self.labels.iter().enumerate() {
            out[y].push(i);
        }
        out
    }

    pub fn gather(&self, indices: &[usize]) -> Batch {
        Batch {
            inputs: self.inputs.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Rows at `indices` as a new dataset; class ids carry over.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let labels = indices.iter().map(|&i| self.class_ids[self.labels[i]]).collect();
        Self::new(self.inputs.select_rows(indices), labels, self.num_classes())
    }

    /// Appends rows labelled with current class indices and re-sorts classes.
    pub fn extended(&self, extra: &Batch) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        let mut labels: Vec<usize> = self.labels.iter().map(|&y| self.class_ids[y]).collect();
        for (row, &y) in extra.inputs.iter_rows().zip(&extra.labels) {
            if y >= self.num_classes() {
                return Err(Error::LabelOutOfRange {
                    label: y,
                    classes: self.num_classes(),
                });
            }
            inputs.push_row(row)?;
            labels.push(self.class_ids[y]);
        }
        Self::new(inputs, labels, self.num_classes())
    }

    /// Relabels this dataset with the class order of `reference`.
    ///
    /// Both datasets must descend from the same labelling. The result keeps
    /// the non-increasing count order, so this only applies when it is
    /// compatible with the reference order (e.g. for balanced splits).
    pub fn align_to(&self, reference: &LabeledDataset) -> Result<Self> {
        let k = self.num_classes();
        if reference.num_classes() != k {
            return Err(Error::Shape {
                context: "aligned class count",
                expected: reference.num_classes(),
                found: k,
            });
        }
        let mut target = vec![0usize; k];
        for (idx, &id) in reference.class_ids.iter().enumerate() {
            target[id] = idx;
        }
        let mut counts = vec![0usize; k];
        let labels: Vec<usize> = self
            .labels
            .iter()
            .map(|&y| target[self.class_ids[y]])
            .collect();
        for &y in &labels {
            counts[y] += 1;
        }
        if counts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "class order of the reference would break non-increasing counts".into(),
            ));
        }
        Ok(Self {
            inputs: self.inputs.clone(),
            labels,
            class_counts: counts,
            class_ids: reference.class_ids.clone(),
        })
    }

    /// Keeps `min(class_counts)` random samples of every class.
    pub fn trim_to_balanced(&self, seed: u64) -> Result<Self> {
        let n = *self.class_counts.last().expect("at least one class");
        let mut rng = rng::stream(seed, &[tag::LONG_TAIL, 0]);
        let mut keep = Vec::with_capacity(n * self.num_classes());
        for mut idx in self.class_indices() {
            idx.shuffle(&mut rng);
            keep.extend_from_slice(&idx[..n]);
        }
        keep.sort_unstable();
        self.subset(&keep)
    }
}

/// Per-class counts of an exponentially decaying long tail:
/// `round(n * ratio^(-k / (K - 1)))` for `k = 0..K`, rounding half up.
pub fn long_tail_counts(per_class: usize, classes: usize, ratio: f64) -> Result<Vec<usize>> {
    if !(ratio.is_finite() && ratio > 1.0) {
        return Err(Error::Profile(format!("imbalance ratio must exceed 1, got {ratio}")));
    }
    if classes < 2 {
        return Err(Error::Profile("a long tail needs at least two classes".into()));
    }
    let counts: Vec<usize> = (0..classes)
        .map(|k| {
            let exponent = -(k as f64) / (classes - 1) as f64;
            math::round_half_up(per_class as f64 * math::pow(ratio, exponent)) as usize
        })
        .collect();
    if counts[classes - 1] < 1 {
        return Err(Error::Profile(format!(
            "{per_class} samples per class leave the tail class empty at ratio {ratio}"
        )));
    }
    Ok(counts)
}

/// Subsamples a class-balanced dataset into a long tail with
/// `N_0 / N_{K-1} = ratio`.
pub fn make_long_tail(balanced: &LabeledDataset, ratio: f64, seed: u64) -> Result<LabeledDataset> {
    if !balanced.is_balanced() {
        return Err(Error::Profile("long-tail input must be class-balanced".into()));
    }
    let counts = long_tail_counts(balanced.class_counts[0], balanced.num_classes(), ratio)?;
    let mut rng = rng::stream(seed, &[tag::LONG_TAIL]);
    let mut keep = Vec::with_capacity(counts.iter().sum());
    for (mut idx, &n) in balanced.class_indices().into_iter().zip(&counts) {
        idx.shuffle(&mut rng);
        keep.extend_from_slice(&idx[..n]);
    }
    keep.sort_unstable();
    balanced.subset(&keep)
}

/// Train / validation / test partition.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train: LabeledDataset,
    pub val: LabeledDataset,
    pub test: LabeledDataset,
}

/// Stratified split: every class gives exactly `test_per_class` samples to
/// the test set and `round(val_fraction * test_per_class)` to validation;
/// the rest is training data. Validation is empty when that count is zero.
pub fn split(
    dataset: &LabeledDataset,
    val_fraction: f64,
    test_per_class: usize,
    seed: u64,
) -> Result<Split> {
    if !(0.0..=1.0).contains(&val_fraction) {
        return Err(Error::Config(format!("val_fraction {val_fraction} outside [0, 1]")));
    }
    let val_per_class = math::round_half_up(val_fraction * test_per_class as f64) as usize;
    let required = test_per_class + val_per_class + 1;
    let mut rng = rng::stream(seed, &[tag::SPLIT]);
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for (class, mut idx) in dataset.class_indices().into_iter().enumerate() {
        if idx.len() < required {
            return Err(Error::Split {
                class,
                available: idx.len(),
                required,
            });
        }
        idx.shuffle(&mut rng);
        test.extend_from_slice(&idx[..test_per_class]);
        val.extend_from_slice(&idx[test_per_class..test_per_class + val_per_class]);
        train.extend_from_slice(&idx[test_per_class + val_per_class..]);
    }
    for v in [&mut train, &mut val, &mut test] {
        v.sort_unstable();
    }
    let train = dataset.subset(&train)?;
    let test = dataset.subset(&test)?.align_to(&train)?;
    let val = if val.is_empty() {
        LabeledDataset {
            inputs: Matrix::zeros(0, dataset.dim()),
            labels: Vec::new(),
            class_counts: vec![0; dataset.num_classes()],
            class_ids: train.class_ids.clone(),
        }
    } else {
        dataset.subset(&val)?.align_to(&train)?
    };
    Ok(Split { train, val, test })
}

fn class_means(classes: usize, dim: usize, separation: f64) -> Vec<Vec<f64>> {
    if classes > 2 && classes <= dim {
        // scaled simplex: (s / sqrt 2) e_k, centred; pairwise distance s
        let scale = separation / math::sqrt(2.0);
        let centre = scale / classes as f64;
        (0..classes)
            .map(|k| {
                let mut m = vec![0.0; dim];
                for (j, v) in m.iter_mut().enumerate().take(classes) {
                    *v = if j == k { scale - centre } else { -centre };
                }
                m
            })
            .collect()
    } else {
        // circle in the first two coordinates; neighbouring means s apart
        let radius = separation / (2.0 * libm::sin(PI / classes as f64));
        (0..classes)
            .map(|k| {
                let angle = 2.0 * PI * k as f64 / classes as f64;
                let mut m = vec![0.0; dim];
                m[0] = radius * libm::cos(angle);
                m[1] = radius * libm::sin(angle);
                m
            })
            .collect()
    }
}

/// Isotropic unit-variance Gaussian classes.
///
/// When `2 < classes <= dim` the means sit on a centred simplex with
/// pairwise distance `separation`; otherwise they sit on a circle in the
/// first two coordinates with neighbouring means `separation` apart (for
/// two classes: `+-(separation / 2, 0, ...)`).
pub fn gaussian_mixture(
    classes: usize,
    per_class: usize,
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if classes < 2 || dim < 2 {
        return Err(Error::Config("gaussian mixture needs K >= 2 and d >= 2".into()));
    }
    if per_class == 0 {
        return Err(Error::Config("per_class must be positive".into()));
    }
    let means = class_means(classes, dim, separation);
    let mut rng = rng::stream(seed, &[tag::DATA]);
    let mut inputs = Matrix::zeros(0, dim);
    let mut labels = Vec::with_capacity(classes * per_class);
    let mut row = vec![0.0; dim];
    for (k, mean) in means.iter().enumerate() {
        for _ in 0..per_class {
            for (v, m) in row.iter_mut().zip(mean) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v = m + z;
            }
            inputs.push_row(&row)?;
            labels.push(k);
        }
    }
    LabeledDataset::new(inputs, labels, classes)
}

/// Two interleaved half-moons in the plane with Gaussian jitter.
pub fn crescents(per_class: usize, noise: f64, seed: u64) -> Result<LabeledDataset> {
    if per_class == 0 {
        return Err(Error::Config("per_class must be positive".into()));
    }
    let mut rng = rng::stream(seed, &[tag::DATA]);
    let mut inputs = Matrix::zeros(0, 2);
    let mut labels = Vec::with_capacity(2 * per_class);
    for k in 0..2 {
        for _ in 0..per_class {
            let t: f64 = rng.random_range(0.0..PI);
            let (x, y) = if k == 0 {
                (libm::cos(t), libm::sin(t))
            } else {
                (1.0 - libm::cos(t), 0.5 - libm::sin(t))
            };
            let nx: f64 = StandardNormal.sample(&mut rng);
            let ny: f64 = StandardNormal.sample(&mut rng);
            inputs.push_row(&[x + noise * nx, y + noise * ny])?;
            labels.push(k);
        }
    }
    LabeledDataset::new(inputs, labels, 2)
}

/// Concentric rings: class `k` lies at radius `k + 1` with radial jitter.
pub fn rings(classes: usize, per_class: usize, noise: f64, seed: u64) -> Result<LabeledDataset> {
    if classes < 2 || per_class == 0 {
        return Err(Error::Config("rings need K >= 2 and a positive per_class".into()));
    }
    let mut rng = rng::stream(seed, &[tag::DATA]);
    let mut inputs = Matrix::zeros(0, 2);
    let mut labels = Vec::with_capacity(classes * per_class);
    for k in 0..classes {
        for _ in 0..per_class {
            let angle: f64 = rng.random_range(0.0..2.0 * PI);
            let z: f64 = StandardNormal.sample(&mut rng);
            let r = (k + 1) as f64 + noise * z;
            inputs.push_row(&[r * libm::cos(angle), r * libm::sin(angle)])?;
            labels.push(k);
        }
    }
    LabeledDataset::new(inputs, labels, classes)
}
