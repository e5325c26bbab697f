//! Truncated-DFT lossy transform codec with a self-delimiting bitstream.
//!
//! Stream layout (MSB-first):
//!
//! ```text
//! γ(N) γ(R) γ(b) A:f32 | R × (re: b/2 bits, im: b/2 bits)
//! ```
//!
//! `γ` is the Elias-gamma code and `A` the quantizer range, the largest
//! absolute real or imaginary component among the retained coefficients,
//! rounded up to the next `f32`. Each component is quantized by a uniform
//! midrise quantizer with `2^{b/2}` cells over `[−A, A]`. Because every field
//! is self-delimiting, a decoder knows where the stream ends without any
//! external length.

mod bits;
mod container;
mod dft;

pub use bits::{gamma_length, BitReader, Bits};
pub use container::{read_container, write_container, CONTAINER_MAGIC};
pub use dft::{dft_forward, dft_inverse, spectrum};

use num_complex::Complex64;
use thiserror::Error;

use crate::statevec::{StateError, StateVector};

/// Smallest and largest bits-per-amplitude searched by [`minimal_encoding`].
pub const MIN_SEARCH_BITS: u32 = 4;
pub const MAX_SEARCH_BITS: u32 = 32;

/// Default relative L2 distortion budget.
pub const DEFAULT_EPSILON: f64 = 1e-3;

const MAX_BITS: u32 = 64;
const MAX_DIMENSION: u64 = 1 << 24;
const SCALE_BITS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("invalid codec parameters: {0}")]
    InvalidParams(String),
    #[error("retained frequency count {rate} outside 1..={dimension}")]
    RateOutOfRange { rate: usize, dimension: usize },
    #[error("stream truncated at bit offset {offset}")]
    Truncated { offset: usize },
    #[error("malformed stream at bit offset {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
    #[error(
        "no (R, b) grid point reaches distortion {epsilon:e} (best {best:e}); use a larger budget"
    )]
    BudgetUnreachable { epsilon: f64, best: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Spatial dimension `N`, retained frequencies `R` and bits per amplitude `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodecParams {
    pub dimension: usize,
    pub rate: usize,
    pub bits: u32,
}

impl CodecParams {
    pub fn new(dimension: usize, rate: usize, bits: u32) -> Result<Self, CodecError> {
        let p = CodecParams {
            dimension,
            rate,
            bits,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        if self.dimension == 0 || self.dimension as u64 > MAX_DIMENSION {
            return Err(CodecError::InvalidParams(format!(
                "dimension {} outside 1..={MAX_DIMENSION}",
                self.dimension
            )));
        }
        if self.rate == 0 || self.rate > self.dimension {
            return Err(CodecError::RateOutOfRange {
                rate: self.rate,
                dimension: self.dimension,
            });
        }
        if self.bits < 4 || self.bits > MAX_BITS || !self.bits.is_multiple_of(2) {
            return Err(CodecError::InvalidParams(format!(
                "bits per amplitude must be even and in 4..={MAX_BITS}, got {}",
                self.bits
            )));
        }
        Ok(())
    }

    /// Bits per real or imaginary component.
    pub fn component_bits(&self) -> u32 {
        self.bits / 2
    }

    pub fn header_length(&self) -> usize {
        header_length(self.dimension, self.rate, self.bits)
    }

    /// `header_length + b·R`.
    pub fn stream_length(&self) -> usize {
        self.header_length() + self.bits as usize * self.rate
    }
}

/// `|γ(N)| + |γ(R)| + |γ(b)| + 32`.
pub fn header_length(dimension: usize, rate: usize, bits: u32) -> usize {
    gamma_length(dimension as u64)
        + gamma_length(rate as u64)
        + gamma_length(bits as u64)
        + SCALE_BITS
}

/// A self-delimiting encoded state. Its bit length is the entropy it assigns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeStream {
    bits: Bits,
    params: CodecParams,
}

impl CodeStream {
    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn bit_length(&self) -> usize {
        self.bits.len()
    }

    pub fn params(&self) -> CodecParams {
        self.params
    }

    /// Quantized coefficient payload, header stripped.
    pub fn payload(&self) -> Bits {
        let mut out = Bits::new();
        for bit in self.bits.iter().skip(self.params.header_length()) {
            out.push(bit);
        }
        out
    }

    /// Parses the header of `bits` and keeps exactly one stream's worth.
    pub fn from_bits(bits: &Bits) -> Result<Self, CodecError> {
        let mut reader = BitReader::new(bits);
        let header = read_header(&mut reader)?;
        let len = header.params.stream_length();
        if bits.len() < len {
            // Surface the exact offset where the payload runs out.
            let mut reader = BitReader::new(bits);
            decode_from(&mut reader, None)?;
        }
        let mut own = Bits::new();
        for bit in bits.iter().take(len) {
            own.push(bit);
        }
        Ok(CodeStream {
            bits: own,
            params: header.params,
        })
    }
}

struct Header {
    params: CodecParams,
    scale: f32,
}

fn read_header(reader: &mut BitReader<'_>) -> Result<Header, CodecError> {
    let at = reader.position();
    let dimension = reader.read_gamma()?;
    if dimension > MAX_DIMENSION {
        return Err(CodecError::Malformed {
            offset: at,
            reason: format!("dimension {dimension} exceeds {MAX_DIMENSION}"),
        });
    }
    let at = reader.position();
    let rate = reader.read_gamma()?;
    if rate > dimension {
        return Err(CodecError::Malformed {
            offset: at,
            reason: format!("rate {rate} exceeds dimension {dimension}"),
        });
    }
    let at = reader.position();
    let bits = reader.read_gamma()?;
    if bits < 4 || bits > MAX_BITS as u64 || bits % 2 != 0 {
        return Err(CodecError::Malformed {
            offset: at,
            reason: format!("bits per amplitude {bits} not even in 4..={MAX_BITS}"),
        });
    }
    let at = reader.position();
    let scale = f32::from_bits(reader.read_bits(SCALE_BITS as u32)? as u32);
    if !scale.is_finite() || scale < 0.0 {
        return Err(CodecError::Malformed {
            offset: at,
            reason: format!("quantizer range {scale} is not a finite non-negative number"),
        });
    }
    Ok(Header {
        params: CodecParams {
            dimension: dimension as usize,
            rate: rate as usize,
            bits: bits as u32,
        },
        scale,
    })
}

/// Uniform midrise quantizer with `2^width` cells over `[−range, range]`.
#[derive(Debug, Clone, Copy)]
struct Quantizer {
    range: f64,
    levels: u64,
}

impl Quantizer {
    fn new(range: f32, width: u32) -> Self {
        Quantizer {
            range: range as f64,
            levels: 1u64 << width,
        }
    }

    fn step(&self) -> f64 {
        2.0 * self.range / self.levels as f64
    }

    fn index(&self, v: f64) -> u64 {
        if self.range == 0.0 {
            return 0;
        }
        let cell = ((v + self.range) / self.step()).floor();
        cell.clamp(0.0, (self.levels - 1) as f64) as u64
    }

    fn value(&self, index: u64) -> f64 {
        -self.range + (index as f64 + 0.5) * self.step()
    }

    fn round_trip(&self, v: f64) -> f64 {
        if self.range == 0.0 {
            return 0.0;
        }
        self.value(self.index(v))
    }
}

/// Smallest `f32` not below `a`, so the quantizer range covers every component.
fn scale_for(coeffs: &[Complex64]) -> Result<f32, CodecError> {
    let a = coeffs
        .iter()
        .flat_map(|c| [c.re.abs(), c.im.abs()])
        .fold(0.0f64, f64::max);
    if !a.is_finite() || a > f32::MAX as f64 {
        return Err(CodecError::InvalidParams(format!(
            "coefficient magnitude {a} not representable"
        )));
    }
    let mut s = a as f32;
    if (s as f64) < a {
        s = s.next_up();
    }
    Ok(s)
}

fn encode_coefficients(
    coeffs: &[Complex64],
    params: CodecParams,
) -> Result<CodeStream, CodecError> {
    let scale = scale_for(coeffs)?;
    let width = params.component_bits();
    let q = Quantizer::new(scale, width);
    let mut bits = Bits::new();
    bits.push_gamma(params.dimension as u64);
    bits.push_gamma(params.rate as u64);
    bits.push_gamma(params.bits as u64);
    bits.push_bits(scale.to_bits() as u64, SCALE_BITS as u32);
    for c in coeffs {
        bits.push_bits(q.index(c.re), width);
        bits.push_bits(q.index(c.im), width);
    }
    debug_assert_eq!(bits.len(), params.stream_length());
    Ok(CodeStream { bits, params })
}

/// Encodes the `R` lowest frequencies of `signal` at `b` bits per amplitude.
pub fn encode(signal: &StateVector, params: CodecParams) -> Result<CodeStream, CodecError> {
    params.validate()?;
    if signal.dimension() != params.dimension {
        return Err(CodecError::InvalidParams(format!(
            "signal has dimension {}, parameters say {}",
            signal.dimension(),
            params.dimension
        )));
    }
    let coeffs = dft_forward(signal, params.rate)?;
    encode_coefficients(coeffs.as_slice(), params)
}

/// Decodes a stream, optionally resampling to `target_dim` samples.
pub fn decode(stream: &CodeStream, target_dim: Option<usize>) -> Result<StateVector, CodecError> {
    decode_from(&mut BitReader::new(stream.bits()), target_dim)
}

/// Decodes one stream from `reader`, leaving it positioned just past the
/// stream's last bit.
///
/// With `target_dim = Some(M)` the zero-padded spectrum is inverted at `M`
/// points and rescaled by `√(M/N)`, so sample values interpolate the
/// original band-limited signal rather than shrinking with `M`.
pub fn decode_from(
    reader: &mut BitReader<'_>,
    target_dim: Option<usize>,
) -> Result<StateVector, CodecError> {
    let header = read_header(reader)?;
    let params = header.params;
    let width = params.component_bits();
    let q = Quantizer::new(header.scale, width);
    let mut coeffs = Vec::with_capacity(params.rate);
    for _ in 0..params.rate {
        let re = q.value(reader.read_bits(width)?);
        let im = q.value(reader.read_bits(width)?);
        coeffs.push(if header.scale == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(re, im)
        });
    }
    let target = target_dim.unwrap_or(params.dimension);
    let mut samples = dft::inverse_padded(&coeffs, target)?;
    if target != params.dimension {
        let gain = (target as f64 / params.dimension as f64).sqrt();
        samples.iter_mut().for_each(|s| *s *= gain);
    }
    Ok(StateVector::new(samples)?)
}

/// `‖decoded − signal‖ / ‖signal‖`; absolute error when `signal` is zero.
pub fn relative_distortion(signal: &StateVector, decoded: &StateVector) -> Result<f64, CodecError> {
    let err = decoded.sub(signal)?.norm();
    let norm = signal.norm();
    Ok(if norm == 0.0 { err } else { err / norm })
}

/// Result of the rate/distortion search.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalEncoding {
    pub stream: CodeStream,
    pub params: CodecParams,
    /// Relative L2 distortion of the chosen stream.
    pub distortion: f64,
}

impl MinimalEncoding {
    pub fn bit_length(&self) -> usize {
        self.stream.bit_length()
    }

    /// True when every frequency had to be kept: no shorter description
    /// exists within this codec's grid.
    pub fn is_incompressible(&self) -> bool {
        self.params.rate == self.params.dimension
    }
}

/// The shortest stream over `R ∈ 1..=N`, `b ∈ {4, 6, …, 32}` whose decode is
/// within `epsilon` relative L2 distortion; ties go to smaller `R`, then `b`.
pub fn minimal_encoding(signal: &StateVector, epsilon: f64) -> Result<CodeStream, CodecError> {
    minimal_encoding_search(signal, epsilon).map(|m| m.stream)
}

pub fn minimal_encoding_search(
    signal: &StateVector,
    epsilon: f64,
) -> Result<MinimalEncoding, CodecError> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(CodecError::InvalidParams(format!(
            "distortion budget must be positive, got {epsilon}"
        )));
    }
    let n = signal.dimension();
    let full = spectrum(signal);
    let norm = signal.norm();
    let denom = if norm == 0.0 { 1.0 } else { norm };

    // tail[r] = Σ_{k ≥ r} |X_k|², the energy dropped by keeping r frequencies.
    let mut tail = vec![0.0; n + 1];
    for k in (0..n).rev() {
        tail[k] = tail[k + 1] + full[k].norm_sqr();
    }

    let mut candidates: Vec<CodecParams> = (1..=n)
        .flat_map(|rate| {
            (MIN_SEARCH_BITS..=MAX_SEARCH_BITS)
                .step_by(2)
                .map(move |bits| CodecParams {
                    dimension: n,
                    rate,
                    bits,
                })
        })
        .collect();
    candidates.sort_by_key(|p| (p.stream_length(), p.rate, p.bits));

    // Unitarity: distortion in the frequency domain equals distortion of the
    // decoded signal, so candidates are screened without inverse transforms.
    let mut best = f64::INFINITY;
    for params in candidates {
        let kept = &full[..params.rate];
        let q = Quantizer::new(scale_for(kept)?, params.component_bits());
        let quant_err: f64 = kept
            .iter()
            .map(|c| {
                let dr = q.round_trip(c.re) - c.re;
                let di = q.round_trip(c.im) - c.im;
                dr * dr + di * di
            })
            .sum();
        let distortion = (quant_err + tail[params.rate]).max(0.0).sqrt() / denom;
        best = best.min(distortion);
        if distortion <= epsilon {
            let stream = encode_coefficients(kept, params)?;
            return Ok(MinimalEncoding {
                stream,
                params,
                distortion,
            });
        }
    }
    Err(CodecError::BudgetUnreachable { epsilon, best })
}
