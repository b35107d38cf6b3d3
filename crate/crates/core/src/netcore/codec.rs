//! Checkpoint byte format.
//!
//! ```text
//! magic        8 bytes   "M2MNET\0\x01"
//! layers       u32 LE    L
//! input_dim    u32 LE    d
//! L times:     u32 LE    output width, u8 activation (0 identity, 1 relu)
//! L times:     f64 LE    weights row-major (out x in), then bias (out)
//! ```
//!
//! Floats are stored as raw IEEE-754 bits, so decoding reproduces the
//! network exactly.

use alloc::format;
use alloc::vec::Vec;

use super::{Activation, Layer, Matrix, Net};
use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: [u8; 8] = *b"M2MNET\x00\x01";

pub fn encode_net(net: &Net) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 5 * net.layers().len() + 8 * net.param_count());
    out.extend_from_slice(&CHECKPOINT_MAGIC);
    out.extend_from_slice(&(net.layers().len() as u32).to_le_bytes());
    out.extend_from_slice(&(net.input_dim() as u32).to_le_bytes());
    for layer in net.layers() {
        out.extend_from_slice(&(layer.output_dim() as u32).to_le_bytes());
        out.push(match layer.activation {
            Activation::Identity => 0,
            Activation::Relu => 1,
        });
    }
    for layer in net.layers() {
        for v in layer.weights.as_slice().iter().chain(&layer.bias) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() < n {
            return Err(Error::Checkpoint("truncated".into()));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| Error::Checkpoint("size overflow".into()))?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn decode_net(bytes: &[u8]) -> Result<Net> {
    let mut r = Reader { bytes };
    if r.take(8)? != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let count = r.u32()?;
    let input = r.u32()?;
    if count == 0 {
        return Err(Error::Checkpoint("no layers".into()));
    }
    let mut header = Vec::with_capacity(count);
    for _ in 0..count {
        let width = r.u32()?;
        let activation = match r.take(1)?[0] {
            0 => Activation::Identity,
            1 => Activation::Relu,
            t => return Err(Error::Checkpoint(format!("unknown activation tag {t}"))),
        };
        header.push((width, activation));
    }
    let mut layers = Vec::with_capacity(count);
    let mut fan_in = input;
    for (width, activation) in header {
        let weights = Matrix::from_vec(width, fan_in, r.f64s(width * fan_in)?)?;
        let bias = r.f64s(width)?;
        layers.push(Layer::new(weights, bias, activation)?);
        fan_in = width;
    }
    if !r.bytes.is_empty() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", r.bytes.len())));
    }
    Net::new(layers)
}
