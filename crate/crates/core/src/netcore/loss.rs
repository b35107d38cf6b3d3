use alloc::vec::Vec;

use super::Matrix;
use crate::math;
use crate::{Error, Result};

/// Mean loss over a batch and its gradient with respect to the logits.
#[derive(Clone, Debug)]
pub struct LossOutput {
    pub loss: f64,
    pub grad: Matrix,
}

/// Mean cross-entropy `-log softmax(z)[y]`; gradient `(softmax - onehot) / m`.
pub fn cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<LossOutput> {
    weighted(logits, labels, None)
}

/// Cross-entropy with per-class weights: `(1/m) sum_i w[y_i] * ce_i`.
pub fn weighted_cross_entropy(
    logits: &Matrix,
    labels: &[usize],
    class_weights: &[f64],
) -> Result<LossOutput> {
    if class_weights.len() != logits.cols() {
        return Err(Error::Shape {
            context: "class weights",
            expected: logits.cols(),
            found: class_weights.len(),
        });
    }
    weighted(logits, labels, Some(class_weights))
}

fn weighted(logits: &Matrix, labels: &[usize], weights: Option<&[f64]>) -> Result<LossOutput> {
    let (m, k) = (logits.rows(), logits.cols());
    if labels.len() != m {
        return Err(Error::Shape {
            context: "labels",
            expected: m,
            found: labels.len(),
        });
    }
    if let Some(&label) = labels.iter().find(|&&y| y >= k) {
        return Err(Error::LabelOutOfRange { label, classes: k });
    }
    let mut grad = Matrix::zeros(m, k);
    if m == 0 {
        return Ok(LossOutput { loss: 0.0, grad });
    }
    let scale = 1.0 / m as f64;
    let mut total = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        let z = logits.row(r);
        let w = weights.map_or(1.0, |w| w[y]);
        let log_p: Vec<f64> = math::log_softmax(z);
        total += -w * log_p[y];
        let g = grad.row_mut(r);
        for (c, lp) in log_p.into_iter().enumerate() {
            let onehot = if c == y { 1.0 } else { 0.0 };
            g[c] = w * (math::exp(lp) - onehot) * scale;
        }
    }
    Ok(LossOutput {
        loss: total * scale,
        grad,
    })
}
