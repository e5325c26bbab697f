//! Lossy compressor adapter that runs bytes through the DFT codec.
//!
//! Bytes are read as interleaved `(re, im)` pairs in offset binary, so
//! sample `x` is `(b[2x] − 128) + i·(b[2x+1] − 128)`. An odd trailing byte
//! gets an imaginary part of zero.

use num_complex::Complex64;

use super::{Compressor, EntropyError};
use crate::codec::{self, BitReader, Bits, CodecParams, MAX_SEARCH_BITS};
use crate::statevec::StateVector;

/// Compresses bytes through [`codec::minimal_encoding`].
///
/// Output is a presence bit (`0` for empty input), a parity bit for odd
/// lengths, then one codec stream. If the budget is out of reach the
/// full-rate 32-bit stream is emitted instead.
#[derive(Debug, Clone)]
pub struct DftCompressor {
    epsilon: f64,
}

impl DftCompressor {
    pub fn new(epsilon: f64) -> Self {
        DftCompressor { epsilon }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for DftCompressor {
    fn default() -> Self {
        DftCompressor::new(codec::DEFAULT_EPSILON)
    }
}

/// Interleaved offset-binary bytes to complex samples.
pub fn bytes_to_signal(data: &[u8]) -> Option<StateVector> {
    let samples: Vec<Complex64> = data
        .chunks(2)
        .map(|pair| {
            let re = pair[0] as f64 - 128.0;
            let im = pair.get(1).map_or(0.0, |&b| b as f64 - 128.0);
            Complex64::new(re, im)
        })
        .collect();
    StateVector::new(samples).ok()
}

/// Inverse of [`bytes_to_signal`], rounding and saturating each component.
pub fn signal_to_bytes(signal: &StateVector, odd: bool) -> Vec<u8> {
    let to_byte = |v: f64| (v + 128.0).round().clamp(0.0, 255.0) as u8;
    let mut out: Vec<u8> = signal
        .iter()
        .flat_map(|c| [to_byte(c.re), to_byte(c.im)])
        .collect();
    if odd {
        out.pop();
    }
    out
}

impl Compressor for DftCompressor {
    fn name(&self) -> &str {
        "dft"
    }

    fn compress(&self, data: &[u8]) -> Bits {
        let mut out = Bits::new();
        let Some(signal) = bytes_to_signal(data) else {
            out.push(false);
            return out;
        };
        out.push(true);
        out.push(data.len() % 2 == 1);
        let stream = codec::minimal_encoding(&signal, self.epsilon).unwrap_or_else(|_| {
            let n = signal.dimension();
            let params = CodecParams::new(n, n, MAX_SEARCH_BITS).expect("valid full-rate params");
            codec::encode(&signal, params).expect("byte samples are finite")
        });
        out.extend(stream.bits());
        out
    }

    fn decompress_from(&self, reader: &mut BitReader<'_>) -> Result<Vec<u8>, EntropyError> {
        if !reader.read_bit()? {
            return Ok(Vec::new());
        }
        let odd = reader.read_bit()?;
        let signal = codec::decode_from(reader, None)?;
        Ok(signal_to_bytes(&signal, odd))
    }

    fn header_length(&self, input_len: usize) -> usize {
        2 + codec::header_length(input_len.div_ceil(2).max(1), 1, 4)
    }
}
