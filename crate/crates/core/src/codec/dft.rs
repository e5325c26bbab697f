//! Unitary discrete Fourier transform with low-pass truncation.
//!
//! Forward: `X[k] = N^{-1/2} Σₓ e^{−2πi·kx/N} s[x]`, keeping `k = 0..R`.
//! Inverse: zero-pad to `N`, then `s[x] = N^{-1/2} Σₖ e^{2πi·kx/N} X[k]`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::CodecError;
use crate::statevec::StateVector;

/// Full unitary spectrum of `signal` (length `N`).
pub fn spectrum(signal: &StateVector) -> Vec<Complex64> {
    let n = signal.dimension();
    let mut buf = signal.as_slice().to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|c| *c *= norm);
    buf
}

/// The `rate` lowest-frequency unitary DFT coefficients of `signal`.
pub fn dft_forward(signal: &StateVector, rate: usize) -> Result<StateVector, CodecError> {
    let n = signal.dimension();
    if rate == 0 || rate > n {
        return Err(CodecError::RateOutOfRange { rate, dimension: n });
    }
    let mut coeffs = spectrum(signal);
    coeffs.truncate(rate);
    Ok(StateVector::new(coeffs)?)
}

/// Zero-pads `coeffs` to `dimension` and applies the inverse unitary DFT.
pub fn dft_inverse(coeffs: &StateVector, dimension: usize) -> Result<StateVector, CodecError> {
    Ok(StateVector::new(inverse_padded(
        coeffs.as_slice(),
        dimension,
    )?)?)
}

pub(crate) fn inverse_padded(
    coeffs: &[Complex64],
    dimension: usize,
) -> Result<Vec<Complex64>, CodecError> {
    if coeffs.is_empty() || coeffs.len() > dimension {
        return Err(CodecError::RateOutOfRange {
            rate: coeffs.len(),
            dimension,
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); dimension];
    buf[..coeffs.len()].copy_from_slice(coeffs);
    FftPlanner::new()
        .plan_fft_inverse(dimension)
        .process(&mut buf);
    let norm = 1.0 / (dimension as f64).sqrt();
    buf.iter_mut().for_each(|c| *c *= norm);
    Ok(buf)
}
