//! Competing probability measures over a set of continuers.
//!
//! Every measure assigns an unnormalized weight to each continuer and then
//! normalizes. Weights are tracked as base-2 logarithms so that weights such
//! as `2^{−H}` for H in the hundreds of bits never underflow.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::statevec::BranchDecomposition;

/// Label given to the dead branch when it is included as a continuer.
pub const DEAD_BRANCH_LABEL: &str = "dead-branch";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("continuer set is empty")]
    Empty,
    #[error("{labels} labels but {evidence} evidence entries")]
    LengthMismatch { labels: usize, evidence: usize },
    #[error("{measure} measure needs {needed} evidence, set carries {found}")]
    WrongEvidence {
        measure: Measure,
        needed: &'static str,
        found: &'static str,
    },
    #[error("continuer {index} has non-positive count {count}")]
    NonPositiveCount { index: usize, count: i64 },
    #[error("all amplitudes are zero; no continuer has support")]
    AllZeroAmplitudes,
    #[error("continuer {index} has invalid entropy {value} (must be finite and >= 0)")]
    InvalidEntropy { index: usize, value: f64 },
    #[error("probability vectors differ in length: {0} vs {1}")]
    VectorLengthMismatch(usize, usize),
}

/// Per-continuer payload; one kind per set.
#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    None,
    Counts(Vec<i64>),
    Amplitudes(Vec<Complex64>),
    /// Absolute entropies `H(mᵢ)` or alteration bits `ΔHᵢ`; either works.
    EntropyBits(Vec<f64>),
}

impl Evidence {
    fn kind(&self) -> &'static str {
        match self {
            Evidence::None => "no",
            Evidence::Counts(_) => "count",
            Evidence::Amplitudes(_) => "amplitude",
            Evidence::EntropyBits(_) => "entropy",
        }
    }

    fn len(&self) -> Option<usize> {
        match self {
            Evidence::None => None,
            Evidence::Counts(v) => Some(v.len()),
            Evidence::Amplitudes(v) => Some(v.len()),
            Evidence::EntropyBits(v) => Some(v.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuerSet {
    labels: Vec<String>,
    evidence: Evidence,
}

impl ContinuerSet {
    pub fn new(labels: Vec<String>, evidence: Evidence) -> Result<Self, MeasureError> {
        if labels.is_empty() {
            return Err(MeasureError::Empty);
        }
        if let Some(n) = evidence.len() {
            if n != labels.len() {
                return Err(MeasureError::LengthMismatch {
                    labels: labels.len(),
                    evidence: n,
                });
            }
        }
        Ok(ContinuerSet { labels, evidence })
    }

    /// Amplitude evidence from a decomposition. With `include_dead`, a
    /// present dead branch is appended as an ordinary continuer; without it
    /// the measure is conditioned on survival.
    pub fn from_decomposition(
        labels: Vec<String>,
        decomposition: &BranchDecomposition,
        include_dead: bool,
    ) -> Result<Self, MeasureError> {
        let mut labels = labels;
        let mut amps = decomposition.coefficients.clone();
        if include_dead && decomposition.has_dead_branch() {
            labels.push(DEAD_BRANCH_LABEL.to_string());
            amps.push(decomposition.dead_coefficient);
        }
        Self::new(labels, Evidence::Amplitudes(amps))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn evidence(&self) -> &Evidence {
        &self.evidence
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Flat,
    CopyCount,
    Born,
    Algorithmic,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Flat,
        Measure::CopyCount,
        Measure::Born,
        Measure::Algorithmic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Flat => "flat",
            Measure::CopyCount => "copy_count",
            Measure::Born => "born",
            Measure::Algorithmic => "algorithmic",
        }
    }

    /// Whether `set` carries the evidence this measure consumes.
    pub fn applies_to(&self, set: &ContinuerSet) -> bool {
        matches!(
            (self, &set.evidence),
            (Measure::Flat, _)
                | (Measure::CopyCount, Evidence::Counts(_))
                | (Measure::Born, Evidence::Amplitudes(_))
                | (Measure::Algorithmic, Evidence::EntropyBits(_))
        )
    }

    pub fn apply(&self, set: &ContinuerSet) -> Result<MeasureResult, MeasureError> {
        match self {
            Measure::Flat => flat_measure(set),
            Measure::CopyCount => copy_count_measure(set),
            Measure::Born => born_measure(set),
            Measure::Algorithmic => algorithmic_measure(set),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureResult {
    pub measure: Measure,
    pub probabilities: Vec<f64>,
    /// Base-2 logarithms of the unnormalized weights.
    pub log_weights: Vec<f64>,
}

impl MeasureResult {
    pub fn measure_name(&self) -> &'static str {
        self.measure.name()
    }
}

fn wrong(measure: Measure, needed: &'static str, set: &ContinuerSet) -> MeasureError {
    MeasureError::WrongEvidence {
        measure,
        needed,
        found: set.evidence.kind(),
    }
}

/// Normalizes log₂ weights by shifting the largest to zero first.
fn normalize_log2(log_weights: &[f64]) -> Vec<f64> {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_weights.iter().map(|l| (l - max).exp2()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

pub fn flat_measure(set: &ContinuerSet) -> Result<MeasureResult, MeasureError> {
    if set.is_empty() {
        return Err(MeasureError::Empty);
    }
    let n = set.len();
    Ok(MeasureResult {
        measure: Measure::Flat,
        probabilities: vec![1.0 / n as f64; n],
        log_weights: vec![0.0; n],
    })
}

pub fn copy_count_measure(set: &ContinuerSet) -> Result<MeasureResult, MeasureError> {
    let Evidence::Counts(counts) = &set.evidence else {
        return Err(wrong(Measure::CopyCount, "count", set));
    };
    if let Some((index, &count)) = counts.iter().enumerate().find(|(_, &c)| c <= 0) {
        return Err(MeasureError::NonPositiveCount { index, count });
    }
    let total: i64 = counts.iter().sum();
    Ok(MeasureResult {
        measure: Measure::CopyCount,
        probabilities: counts.iter().map(|&c| c as f64 / total as f64).collect(),
        log_weights: counts.iter().map(|&c| (c as f64).log2()).collect(),
    })
}

pub fn born_measure(set: &ContinuerSet) -> Result<MeasureResult, MeasureError> {
    let Evidence::Amplitudes(amps) = &set.evidence else {
        return Err(wrong(Measure::Born, "amplitude", set));
    };
    let weights: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(MeasureError::AllZeroAmplitudes);
    }
    Ok(MeasureResult {
        measure: Measure::Born,
        probabilities: weights.iter().map(|w| w / total).collect(),
        log_weights: weights.iter().map(|w| w.log2()).collect(),
    })
}

/// `pᵢ = 2^{−Hᵢ} / Σₖ 2^{−Hₖ}`, evaluated after shifting by `min Hₖ`.
pub fn algorithmic_measure(set: &ContinuerSet) -> Result<MeasureResult, MeasureError> {
    let Evidence::EntropyBits(h) = &set.evidence else {
        return Err(wrong(Measure::Algorithmic, "entropy", set));
    };
    if let Some((index, &value)) = h
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(MeasureError::InvalidEntropy { index, value });
    }
    let log_weights: Vec<f64> = h.iter().map(|v| -v).collect();
    Ok(MeasureResult {
        measure: Measure::Algorithmic,
        probabilities: normalize_log2(&log_weights),
        log_weights,
    })
}

/// `½ Σ|pᵢ − qᵢ|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64, MeasureError> {
    if p.len() != q.len() {
        return Err(MeasureError::VectorLengthMismatch(p.len(), q.len()));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
