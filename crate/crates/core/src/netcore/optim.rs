use super::{Gradients, Net};
use crate::{Error, Result};

/// SGD with heavy-ball momentum and L2 weight decay:
/// `v <- mu v + grad + wd * param; param <- param - lr v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sgd {
    pub momentum: f64,
    pub weight_decay: f64,
    pub lr: f64,
    velocity: Gradients,
}

impl Sgd {
    pub fn new(net: &Net, lr: f64, momentum: f64, weight_decay: f64) -> Self {
        Self {
            momentum,
            weight_decay,
            lr,
            velocity: Gradients::zeros_like(net),
        }
    }

    pub fn velocity(&self) -> &Gradients {
        &self.velocity
    }

    pub fn step(&mut self, net: &mut Net, grads: &Gradients) -> Result<()> {
        if grads.layers.len() != net.layers().len() || self.velocity.layers.len() != grads.layers.len() {
            return Err(Error::Shape {
                context: "gradient layers",
                expected: net.layers().len(),
                found: grads.layers.len(),
            });
        }
        for ((layer, grad), vel) in net
            .layers_mut()
            .iter_mut()
            .zip(&grads.layers)
            .zip(&mut self.velocity.layers)
        {
            let wn = layer.weights.as_slice().len();
            if grad.weights.as_slice().len() != wn || grad.bias.len() != layer.bias.len() {
                return Err(Error::Shape {
                    context: "gradient parameters",
                    expected: wn + layer.bias.len(),
                    found: grad.weights.as_slice().len() + grad.bias.len(),
                });
            }
            update(
                layer.weights.as_mut_slice(),
                grad.weights.as_slice(),
                vel.weights.as_mut_slice(),
                self.lr,
                self.momentum,
                self.weight_decay,
            );
            update(
                &mut layer.bias,
                &grad.bias,
                &mut vel.bias,
                self.lr,
                self.momentum,
                self.weight_decay,
            );
        }
        Ok(())
    }
}

#[inline]
fn update(params: &mut [f64], grads: &[f64], vel: &mut [f64], lr: f64, mu: f64, wd: f64) {
    for ((p, &g), v) in params.iter_mut().zip(grads).zip(vel) {
        *v = mu * *v + g + wd * *p;
        *p -= lr * *v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Activation, Layer, LayerGrad, Matrix};
    use alloc::vec;

    fn scalar_net(w: f64) -> Net {
        let layer = Layer::new(
            Matrix::from_vec(1, 1, vec![w]).unwrap(),
            vec![0.0],
            Activation::Identity,
        )
        .unwrap();
        Net::new(vec![layer]).unwrap()
    }

    fn scalar_grad(g: f64) -> Gradients {
        Gradients {
            layers: vec![LayerGrad {
                weights: Matrix::from_vec(1, 1, vec![g]).unwrap(),
                bias: vec![0.0],
            }],
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut net = scalar_net(0.7);
        let before = net.clone();
        let mut sgd = Sgd::new(&net, 0.1, 0.9, 0.0);
        sgd.step(&mut net, &scalar_grad(0.0)).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn momentum_recurrence_by_hand() {
        let mut net = scalar_net(1.0);
        let mut sgd = Sgd::new(&net, 0.1, 0.9, 0.0);
        sgd.step(&mut net, &scalar_grad(1.0)).unwrap();
        assert!((net.layers()[0].weights[(0, 0)] - 0.9).abs() < 1e-15);
        assert_eq!(sgd.velocity().layers[0].weights[(0, 0)], 1.0);
        sgd.step(&mut net, &scalar_grad(1.0)).unwrap();
        // second update: lr * (0.9 * 1 + 1) = 0.19
        assert!((net.layers()[0].weights[(0, 0)] - (0.9 - 0.19)).abs() < 1e-15);
    }

    #[test]
    fn mismatched_gradient_is_rejected() {
        let mut net = scalar_net(1.0);
        let mut sgd = Sgd::new(&net, 0.1, 0.9, 0.0);
        let bad = Gradients {
            layers: vec![LayerGrad {
                weights: Matrix::zeros(1, 2),
                bias: vec![0.0],
            }],
        };
        assert!(sgd.step(&mut net, &bad).is_err());
    }
}
