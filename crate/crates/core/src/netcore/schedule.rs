use alloc::vec::Vec;

use crate::{Error, Result};

/// Linear warm-up followed by multiplicative step decay.
///
/// Time is measured in fractional epochs. During the first
/// `warmup_epochs` the rate grows linearly from 0 to `base`; afterwards
/// each `(epoch, factor)` step with `epoch <= current epoch` multiplies it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LrSchedule {
    pub base: f64,
    pub warmup_epochs: usize,
    pub steps: Vec<(usize, f64)>,
}

impl LrSchedule {
    pub fn constant(base: f64) -> Self {
        Self {
            base,
            warmup_epochs: 0,
            steps: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base.is_finite() && self.base >= 0.0) {
            return Err(Error::Config("learning rate must be finite and non-negative".into()));
        }
        if self.steps.iter().any(|&(_, f)| !(f.is_finite() && f >= 0.0)) {
            return Err(Error::Config("decay factors must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// Rate at `epoch + fraction` with `fraction` in `[0, 1)`.
    pub fn rate(&self, epoch: usize, fraction: f64) -> f64 {
        if epoch < self.warmup_epochs {
            return self.base * (epoch as f64 + fraction) / self.warmup_epochs as f64;
        }
        self.steps
            .iter()
            .filter(|&&(at, _)| at <= epoch)
            .fold(self.base, |lr, &(_, factor)| lr * factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn warmup_is_linear_from_zero() {
        let s = LrSchedule {
            base: 0.1,
            warmup_epochs: 5,
            steps: vec![],
        };
        assert_eq!(s.rate(0, 0.0), 0.0);
        assert!((s.rate(2, 0.5) - 0.05).abs() < 1e-15);
        assert_eq!(s.rate(5, 0.0), 0.1);
    }

    #[test]
    fn step_decay_compounds() {
        let s = LrSchedule {
            base: 0.1,
            warmup_epochs: 0,
            steps: vec![(160, 0.01), (180, 0.01)],
        };
        assert_eq!(s.rate(159, 0.9), 0.1);
        assert!((s.rate(160, 0.0) - 1e-3).abs() < 1e-18);
        assert!((s.rate(199, 0.0) - 1e-5).abs() < 1e-18);
    }
}
