//! Balanced evaluation metrics.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::datasets::LabeledDataset;
use crate::math;
use crate::netcore::Net;
use crate::{Error, Result};

/// Evaluation of a classifier on a labelled test set.
///
/// `confusion[t][p]` counts samples of true class `t` predicted as `p`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub confusion: Vec<Vec<u64>>,
    pub recall: Vec<f64>,
    pub accuracy: f64,
    pub bacc: f64,
    pub gm: f64,
    pub major: Vec<usize>,
    pub minor: Vec<usize>,
    /// Mean recall over the majority classes.
    pub major_recall: f64,
    /// Mean recall over the minority classes.
    pub minor_recall: f64,
    pub cumulative_fp: Vec<u64>,
}

impl EvalReport {
    /// Builds a report from a confusion matrix and the training class counts
    /// used for the majority/minority split.
    pub fn from_confusion(confusion: Vec<Vec<u64>>, train_counts: &[usize]) -> Result<Self> {
        let k = confusion.len();
        if confusion.iter().any(|row| row.len() != k) {
            return Err(Error::Shape {
                context: "confusion matrix",
                expected: k,
                found: confusion.iter().map(Vec::len).find(|&l| l != k).unwrap_or(k),
            });
        }
        if train_counts.len() != k {
            return Err(Error::Shape {
                context: "training class counts",
                expected: k,
                found: train_counts.len(),
            });
        }
        let mut recall = Vec::with_capacity(k);
        for (class, row) in confusion.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total == 0 {
                return Err(Error::EmptyClass { class });
            }
            recall.push(row[class] as f64 / total as f64);
        }
        let total: u64 = confusion.iter().flatten().sum();
        let correct: u64 = (0..k).map(|c| confusion[c][c]).sum();
        let (major, minor) = major_minor_split(train_counts);
        let mean_over = |set: &[usize]| {
            if set.is_empty() {
                f64::NAN
            } else {
                set.iter().map(|&c| recall[c]).sum::<f64>() / set.len() as f64
            }
        };
        Ok(Self {
            accuracy: correct as f64 / total as f64,
            bacc: balanced_accuracy(&recall),
            gm: geometric_mean(&recall),
            major_recall: mean_over(&major),
            minor_recall: mean_over(&minor),
            cumulative_fp: cumulative_fp_curve(&confusion),
            confusion,
            recall,
            major,
            minor,
        })
    }

    /// Checks the report's internal identities.
    pub fn check(&self) -> Result<()> {
        let fail = |msg| Err(Error::Config(format!("report invariant violated: {msg}")));
        if !(0.0..=1.0).contains(&self.bacc) || !(0.0..=1.0).contains(&self.gm) {
            return fail("metrics outside [0, 1]");
        }
        if self.gm > self.bacc {
            return fail("GM exceeds bACC");
        }
        let total: u64 = self.confusion.iter().flatten().sum();
        let trace: u64 = (0..self.confusion.len()).map(|c| self.confusion[c][c]).sum();
        if self.cumulative_fp.last().copied().unwrap_or(0) != total - trace {
            return fail("cumulative false positives do not end at the error count");
        }
        for (row, &r) in self.confusion.iter().zip(&self.recall) {
            let n: u64 = row.iter().sum();
            if n == 0 || !(0.0..=1.0).contains(&r) {
                return fail("bad recall");
            }
        }
        Ok(())
    }
}

/// Predicts every test sample and summarises the result.
pub fn evaluate(net: &Net, test: &LabeledDataset, train_counts: &[usize]) -> Result<EvalReport> {
    let k = test.num_classes();
    if net.num_classes() != k {
        return Err(Error::Shape {
            context: "evaluated classes",
            expected: k,
            found: net.num_classes(),
        });
    }
    let predictions = net.predict(test.inputs())?;
    let mut confusion = vec![vec![0u64; k]; k];
    for (&y, &p) in test.labels().iter().zip(&predictions) {
        confusion[y][p] += 1;
    }
    EvalReport::from_confusion(confusion, train_counts)
}

pub fn balanced_accuracy(recall: &[f64]) -> f64 {
    recall.iter().sum::<f64>() / recall.len() as f64
}

/// Geometric mean of the recalls; exactly zero if any recall is zero.
pub fn geometric_mean(recall: &[f64]) -> f64 {
    if recall.iter().any(|&r| r <= 0.0) {
        return 0.0;
    }
    let gm = math::exp(recall.iter().map(|&r| math::ln(r)).sum::<f64>() / recall.len() as f64);
    // AM-GM holds exactly; keep it when exp/ln round upward.
    gm.min(balanced_accuracy(recall))
}

/// Geometric mean with recalls floored at `epsilon`, for log-scale plots.
pub fn geometric_mean_smoothed(recall: &[f64], epsilon: f64) -> f64 {
    let floored: Vec<f64> = recall.iter().map(|&r| r.max(epsilon)).collect();
    geometric_mean(&floored)
}

/// Majority classes: the shortest prefix of (non-increasing) counts whose
/// sum strictly exceeds half the total. The rest are minority classes.
pub fn major_minor_split(class_counts: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let total: usize = class_counts.iter().sum();
    let mut acc = 0;
    let mut cut = class_counts.len();
    for (i, &n) in class_counts.iter().enumerate() {
        acc += n;
        if 2 * acc > total {
            cut = i + 1;
            break;
        }
    }
    ((0..cut).collect(), (cut..class_counts.len()).collect())
}

/// Running sum of per-class false positives (column sum minus diagonal),
/// starting from class 0.
pub fn cumulative_fp_curve(confusion: &[Vec<u64>]) -> Vec<u64> {
    let k = confusion.len();
    let mut acc = 0;
    (0..k)
        .map(|p| {
            let column: u64 = confusion.iter().map(|row| row[p]).sum();
            acc += column - confusion[p][p];
            acc
        })
        .collect()
}
