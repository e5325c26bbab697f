//! Compressor-based estimates of algorithmic entropy.
//!
//! `H(x)` is the bit length of a self-delimiting compression of `x`. True
//! Kolmogorov complexity is uncomputable; each [`Compressor`] gives an upper
//! bound, and different compressors are free to disagree.

mod dft_adapter;
mod lz;

pub use dft_adapter::{bytes_to_signal, signal_to_bytes, DftCompressor};
pub use lz::LzCompressor;

use serde::Serialize;
use thiserror::Error;

use crate::codec::{BitReader, Bits, CodecError};

/// Above this many bits, probabilities are returned as base-2 logarithms.
pub const LOG_DOMAIN_THRESHOLD: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("entropy must be non-negative, got {0}")]
    NegativeEntropy(f64),
    #[error("unknown compressor {0:?} (expected \"lz77\" or \"dft\")")]
    UnknownCompressor(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// A compressor producing self-delimiting output.
///
/// Implementations are treated as pure functions and may be called from
/// several threads at once.
pub trait Compressor: Send + Sync {
    fn name(&self) -> &str;

    fn compress(&self, data: &[u8]) -> Bits;

    /// Reads exactly one compressed stream from `reader`.
    fn decompress_from(&self, reader: &mut BitReader<'_>) -> Result<Vec<u8>, EntropyError>;

    /// Fixed overhead, in bits, for an input of `input_len` bytes.
    fn header_length(&self, input_len: usize) -> usize;

    fn decompress(&self, bits: &Bits) -> Result<Vec<u8>, EntropyError> {
        self.decompress_from(&mut BitReader::new(bits))
    }
}

/// Looks up a built-in compressor by name.
pub fn compressor_by_name(name: &str, epsilon: f64) -> Result<Box<dyn Compressor>, EntropyError> {
    match name {
        "lz77" | "lz" => Ok(Box::new(LzCompressor::default())),
        "dft" => Ok(Box::new(DftCompressor::new(epsilon))),
        other => Err(EntropyError::UnknownCompressor(other.to_string())),
    }
}

/// `H(x) = |C(x)|` in bits.
pub fn entropy(x: &[u8], c: &dyn Compressor) -> u64 {
    c.compress(x).len() as u64
}

/// `2^{−h}`, switching to a log representation past [`LOG_DOMAIN_THRESHOLD`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probability {
    Linear(f64),
    Log2(f64),
}

impl Probability {
    pub fn log2(&self) -> f64 {
        match *self {
            Probability::Linear(p) => p.log2(),
            Probability::Log2(l) => l,
        }
    }

    /// Plain value; may underflow to zero for the log representation.
    pub fn value(&self) -> f64 {
        match *self {
            Probability::Linear(p) => p,
            Probability::Log2(l) => l.exp2(),
        }
    }
}

pub fn solomonoff_probability(h: f64) -> Result<Probability, EntropyError> {
    if h.is_nan() || h < 0.0 {
        return Err(EntropyError::NegativeEntropy(h));
    }
    Ok(if h > LOG_DOMAIN_THRESHOLD {
        Probability::Log2(-h)
    } else {
        Probability::Linear((-h).exp2())
    })
}

/// `x` is random relative to `c` when its compression is no shorter than
/// the raw `8·|x|` bits.
pub fn is_random(x: &[u8], c: &dyn Compressor) -> bool {
    entropy(x, c) >= 8 * x.len() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionalMode {
    /// `H(x) − H(y)`, assuming `y` is entirely shared with `x`.
    Delta,
    /// `H(y‖x) − H(y)`.
    Concat,
}

impl std::str::FromStr for ConditionalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta" => Ok(ConditionalMode::Delta),
            "concat" => Ok(ConditionalMode::Concat),
            other => Err(format!("unknown mode {other:?} (expected delta or concat)")),
        }
    }
}

/// `H(x|y)` estimate, clamped at zero.
pub fn conditional_entropy(x: &[u8], y: &[u8], c: &dyn Compressor, mode: ConditionalMode) -> u64 {
    let h_y = entropy(y, c);
    match mode {
        ConditionalMode::Delta => entropy(x, c).saturating_sub(h_y),
        ConditionalMode::Concat => {
            let mut joined = Vec::with_capacity(x.len() + y.len());
            joined.extend_from_slice(y);
            joined.extend_from_slice(x);
            entropy(&joined, c).saturating_sub(h_y)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub h_x: f64,
    pub h_y: Option<f64>,
    pub h_x_given_y: Option<f64>,
    pub mutual: Option<f64>,
    pub compressor: String,
}

/// Builds a report for `x`, and for `x` given `y` when `y` is supplied.
///
/// `h_x_given_y` is clamped into `[0, h_x]` so `mutual = h_x − h_x_given_y`
/// stays non-negative.
pub fn entropy_report(
    x: &[u8],
    y: Option<&[u8]>,
    c: &dyn Compressor,
    mode: ConditionalMode,
) -> EntropyReport {
    let h_x = entropy(x, c);
    let (h_y, given, mutual) = match y {
        Some(y) => {
            let given = conditional_entropy(x, y, c, mode).min(h_x);
            (
                Some(entropy(y, c) as f64),
                Some(given as f64),
                Some((h_x - given) as f64),
            )
        }
        None => (None, None, None),
    };
    EntropyReport {
        h_x: h_x as f64,
        h_y,
        h_x_given_y: given,
        mutual,
        compressor: c.name().to_string(),
    }
}
