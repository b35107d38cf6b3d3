use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use rand::RngCore;

use super::Matrix;
use crate::math;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Activation {
    Identity,
    Relu,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(0.0),
        }
    }

    #[inline]
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// A dense layer computing `act(W x + b)` with `W` stored as `out x in`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::Shape {
                context: "layer bias",
                expected: weights.rows(),
                found: bias.len(),
            });
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    /// Uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]` for weights and bias.
    pub fn random<R: RngCore>(
        input: usize,
        output: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let bound = 1.0 / math::sqrt(input.max(1) as f64);
        let mut weights = Matrix::zeros(output, input);
        for w in weights.as_mut_slice() {
            *w = rng.random_range(-bound..=bound);
        }
        let bias = (0..output)
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        Self {
            weights,
            bias,
            activation,
        }
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    #[inline]
    pub fn output_dim(&self) -> usize {
        self.weights.rows()
    }

    fn pre_activation(&self, input: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(input.rows(), self.output_dim());
        for r in 0..input.rows() {
            let x = input.row(r);
            let z = out.row_mut(r);
            for (o, zo) in z.iter_mut().enumerate() {
                let w = self.weights.row(o);
                *zo = self.bias[o] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        out
    }

    fn activate(&self, pre: &Matrix) -> Matrix {
        let mut out = pre.clone();
        if self.activation != Activation::Identity {
            for v in out.as_mut_slice() {
                *v = self.activation.apply(*v);
            }
        }
        out
    }
}

/// Gradient of one layer's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerGrad {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Gradients for every layer of a [`Net`], in layer order.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

impl Gradients {
    pub fn zeros_like(net: &Net) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrad {
                    weights: Matrix::zeros(l.output_dim(), l.input_dim()),
                    bias: vec![0.0; l.output_dim()],
                })
                .collect(),
        }
    }

    pub fn iter_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers.iter().flat_map(|l| {
            l.weights
                .as_slice()
                .iter()
                .chain(l.bias.iter())
                .copied()
        })
    }
}

/// Intermediate values of a forward pass, consumed by backpropagation.
#[derive(Clone, Debug)]
pub struct Trace {
    inputs: Vec<Matrix>,
    pre: Vec<Matrix>,
    logits: Matrix,
}

impl Trace {
    pub fn logits(&self) -> &Matrix {
        &self.logits
    }
}

/// A scalar objective on one input, built from logits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObjectiveTerm {
    /// `weight * CE(softmax(logits), target)`
    CrossEntropy { target: usize, weight: f64 },
    /// `weight * logits[class]`
    Logit { class: usize, weight: f64 },
}

/// Feed-forward classifier `R^d -> R^K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Net {
    layers: Vec<Layer>,
}

impl Net {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("a network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::Shape {
                    context: "layer chaining",
                    expected: pair[0].output_dim(),
                    found: pair[1].input_dim(),
                });
            }
        }
        Ok(Self { layers })
    }

    /// Relu hidden layers of the given widths followed by a linear output.
    pub fn dense<R: RngCore>(input: usize, hidden: &[usize], classes: usize, rng: &mut R) -> Self {
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut width = input;
        for &h in hidden {
            layers.push(Layer::random(width, h, Activation::Relu, rng));
            width = h;
        }
        layers.push(Layer::random(width, classes, Activation::Identity, rng));
        Self { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn num_classes(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.bias.len())
            .sum()
    }

    fn check_batch(&self, batch: &Matrix) -> Result<()> {
        if batch.cols() != self.input_dim() {
            return Err(Error::Shape {
                context: "network input",
                expected: self.input_dim(),
                found: batch.cols(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, batch: &Matrix) -> Result<Matrix> {
        self.check_batch(batch)?;
        let mut a = batch.clone();
        for layer in &self.layers {
            a = layer.activate(&layer.pre_activation(&a));
        }
        Ok(a)
    }

    /// Forward pass keeping what backpropagation needs.
    pub fn trace(&self, batch: &Matrix) -> Result<Trace> {
        self.check_batch(batch)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut a = batch.clone();
        for layer in &self.layers {
            let z = layer.pre_activation(&a);
            let next = layer.activate(&z);
            inputs.push(a);
            pre.push(z);
            a = next;
        }
        Ok(Trace {
            inputs,
            pre,
            logits: a,
        })
    }

    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>> {
        let batch = Matrix::from_vec(1, x.len(), x.to_vec())?;
        Ok(self.forward(&batch)?.into_vec())
    }

    /// Argmax class per row, ties toward the lower index.
    pub fn predict(&self, batch: &Matrix) -> Result<Vec<usize>> {
        let logits = self.forward(batch)?;
        Ok(logits.iter_rows().map(math::argmax).collect())
    }

    /// Parameter gradients of a loss whose gradient w.r.t. the logits is
    /// `grad_logits`.
    pub fn backward(&self, trace: &Trace, grad_logits: &Matrix) -> Result<Gradients> {
        let (grads, _) = self.backprop(trace, grad_logits, true, false)?;
        Ok(grads.expect("parameter gradients requested"))
    }

    /// Input gradients (one row per batch row).
    pub fn backward_input(&self, trace: &Trace, grad_logits: &Matrix) -> Result<Matrix> {
        let (_, input) = self.backprop(trace, grad_logits, false, true)?;
        Ok(input.expect("input gradients requested"))
    }

    fn backprop(
        &self,
        trace: &Trace,
        grad_logits: &Matrix,
        want_params: bool,
        want_input: bool,
    ) -> Result<(Option<Gradients>, Option<Matrix>)> {
        let m = trace.logits.rows();
        if grad_logits.rows() != m || grad_logits.cols() != self.num_classes() {
            return Err(Error::Shape {
                context: "logit gradient",
                expected: m * self.num_classes(),
                found: grad_logits.rows() * grad_logits.cols(),
            });
        }
        let mut grads = want_params.then(|| Gradients::zeros_like(self));
        let mut upstream = grad_logits.clone();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let pre = &trace.pre[l];
            let input = &trace.inputs[l];
            let mut gz = upstream;
            if layer.activation != Activation::Identity {
                for (g, &z) in gz.as_mut_slice().iter_mut().zip(pre.as_slice()) {
                    *g *= layer.activation.derivative(z);
                }
            }
            if let Some(grads) = grads.as_mut() {
                let lg = &mut grads.layers[l];
                for r in 0..m {
                    let x = input.row(r);
                    for (o, &g) in gz.row(r).iter().enumerate() {
                        if g == 0.0 {
                            continue;
                        }
                        lg.bias[o] += g;
                        for (w, &xi) in lg.weights.row_mut(o).iter_mut().zip(x) {
                            *w += g * xi;
                        }
                    }
                }
            }
            if l == 0 && !want_input {
                return Ok((grads, None));
            }
            let mut down = Matrix::zeros(m, layer.input_dim());
            for r in 0..m {
                let out = down.row_mut(r);
                for (o, &g) in gz.row(r).iter().enumerate() {
                    if g == 0.0 {
                        continue;
                    }
                    for (d, &w) in out.iter_mut().zip(layer.weights.row(o)) {
                        *d += g * w;
                    }
                }
            }
            upstream = down;
        }
        Ok((grads, Some(upstream)))
    }

    /// Value and input gradient of a weighted sum of logit-based terms at a
    /// single input `x`.
    pub fn input_gradient(&self, x: &[f64], terms: &[ObjectiveTerm]) -> Result<(f64, Vec<f64>)> {
        let batch = Matrix::from_vec(1, x.len(), x.to_vec())?;
        let trace = self.trace(&batch)?;
        let k = self.num_classes();
        let logits = trace.logits.row(0);
        let mut value = 0.0;
        let mut grad_logits = Matrix::zeros(1, k);
        for term in terms {
            match *term {
                ObjectiveTerm::CrossEntropy { target, weight } => {
                    if target >= k {
                        return Err(Error::LabelOutOfRange {
                            label: target,
                            classes: k,
                        });
                    }
                    value += weight * (math::log_sum_exp(logits) - logits[target]);
                    let p = math::softmax(logits);
                    let g = grad_logits.row_mut(0);
                    for (c, pc) in p.into_iter().enumerate() {
                        let onehot = if c == target { 1.0 } else { 0.0 };
                        g[c] += weight * (pc - onehot);
                    }
                }
                ObjectiveTerm::Logit { class, weight } => {
                    if class >= k {
                        return Err(Error::LabelOutOfRange { label: class, classes: k });
                    }
                    value += weight * logits[class];
                    grad_logits[(0, class)] += weight;
                }
            }
        }
        let grad = self.backward_input(&trace, &grad_logits)?;
        Ok((value, grad.into_vec()))
    }
}
