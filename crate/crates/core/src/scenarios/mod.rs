//! Experiment engine: replicator rooms, quantum branchings and
//! codec-derived continuers, compared under every applicable measure.

mod config;
mod report;

pub use config::{
    CodecConfig, Component, ContinuerState, NoiseSpec, OutcomeConfig, Pair, Perturbation,
    QuantumConfig, ReplicatorConfig, Room, ScenarioConfig, ScenarioSpec, SignalSpec,
};
pub use report::{run_config, Provenance, Report, DEFAULT_SEED, DEFAULT_TRIALS};

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::codec::{minimal_encoding_search, CodecError, CodecParams};
use crate::measures::{
    algorithmic_measure, born_measure, total_variation, ContinuerSet, Evidence, Measure,
    MeasureError, MeasureResult,
};
use crate::statevec::{decompose, inner_product, StateError, StateVector};

use config::complex;

/// Generator used for every Monte Carlo draw.
pub const RNG_NAME: &str = "ChaCha8Rng";

/// Pairs with a total-variation distance above this are flagged divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("config error: {0}")]
    Config(String),
    #[error("scenario has no outcomes")]
    NoOutcomes,
    #[error("invalid signal: {0}")]
    Signal(String),
    #[error("continuers {0:?} and {1:?} produce identical signals")]
    DuplicateContinuer(String, String),
    #[error("monte carlo needs at least one trial")]
    NoTrials,
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Replicator,
    Quantum,
    Codec,
}

/// A built scenario: its continuers plus kind-specific detail.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub continuers: ContinuerSet,
    pub detail: ScenarioDetail,
}

impl Scenario {
    pub fn kind(&self) -> ScenarioKind {
        match self.detail {
            ScenarioDetail::Replicator { .. } => ScenarioKind::Replicator,
            ScenarioDetail::Quantum { .. } => ScenarioKind::Quantum,
            ScenarioDetail::Codec(_) => ScenarioKind::Codec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioDetail {
    Replicator {
        room_count: usize,
        /// Rooms after merging identical experiences.
        merged: Vec<Room>,
    },
    Quantum {
        amplitudes: Vec<Pair>,
        dead_coefficient: Option<f64>,
    },
    Codec(CodecDetail),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodecDetail {
    pub epsilon: f64,
    pub base_bits: usize,
    pub base_rate: usize,
    pub base_amplitude_bits: u32,
    pub continuers: Vec<CodecContinuer>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodecContinuer {
    pub label: String,
    /// `|F_min(mᵢ)|`.
    pub bits: usize,
    pub rate: usize,
    pub amplitude_bits: u32,
    /// `ΔHᵢ = |F_min(mᵢ)| − |F_min(m)|`; may be negative.
    pub delta_h: f64,
    /// `⟨mᵢ|m⟩ / (‖mᵢ‖‖m‖)`.
    pub overlap: Pair,
    pub distortion: f64,
}

impl CodecContinuer {
    pub fn amplitude(&self) -> f64 {
        complex(self.overlap).norm()
    }
}

/// Merges rooms whose experience labels are identical; counts add up.
pub fn build_replicator(name: &str, cfg: &ReplicatorConfig) -> Result<Scenario, ScenarioError> {
    if cfg.rooms.is_empty() {
        return Err(ScenarioError::NoOutcomes);
    }
    let mut merged: Vec<Room> = Vec::new();
    for room in &cfg.rooms {
        match merged.iter_mut().find(|m| m.label == room.label) {
            Some(m) => m.count += room.count,
            None => merged.push(room.clone()),
        }
    }
    let continuers = ContinuerSet::new(
        merged.iter().map(|r| r.label.clone()).collect(),
        Evidence::Counts(merged.iter().map(|r| r.count).collect()),
    )?;
    Ok(Scenario {
        name: name.to_string(),
        continuers,
        detail: ScenarioDetail::Replicator {
            room_count: cfg.rooms.len(),
            merged,
        },
    })
}

pub fn build_quantum(name: &str, cfg: &QuantumConfig) -> Result<Scenario, ScenarioError> {
    let (continuers, dead) = match &cfg.psi {
        Some(psi) => {
            let psi = StateVector::new(psi.iter().copied().map(complex).collect())?;
            let states = cfg
                .continuers
                .iter()
                .map(|c| StateVector::new(c.state.iter().copied().map(complex).collect()))
                .collect::<Result<Vec<_>, _>>()?;
            let decomposition = decompose(&psi, &states)?;
            let labels = cfg.continuers.iter().map(|c| c.label.clone()).collect();
            let dead = decomposition
                .has_dead_branch()
                .then_some(decomposition.dead_coefficient.re);
            if states.is_empty() && !(cfg.include_dead && dead.is_some()) {
                return Err(ScenarioError::NoOutcomes);
            }
            let set = ContinuerSet::from_decomposition(labels, &decomposition, cfg.include_dead)?;
            (set, dead)
        }
        None => {
            if cfg.outcomes.is_empty() {
                return Err(ScenarioError::NoOutcomes);
            }
            let set = ContinuerSet::new(
                cfg.outcomes.iter().map(|o| o.label.clone()).collect(),
                Evidence::Amplitudes(
                    cfg.outcomes
                        .iter()
                        .map(OutcomeConfig::total_amplitude)
                        .collect(),
                ),
            )?;
            (set, None)
        }
    };
    let amplitudes = match continuers.evidence() {
        Evidence::Amplitudes(a) => a.iter().map(|c| [c.re, c.im]).collect(),
        _ => unreachable!("quantum continuers carry amplitudes"),
    };
    Ok(Scenario {
        name: name.to_string(),
        continuers,
        detail: ScenarioDetail::Quantum {
            amplitudes,
            dead_coefficient: dead,
        },
    })
}

/// Minimal encodings of the base signal and each continuer; the set carries
/// absolute bit counts `|F_min(mᵢ)|` as entropy evidence.
pub fn build_codec_scenario(name: &str, cfg: &CodecConfig) -> Result<Scenario, ScenarioError> {
    if cfg.continuers.is_empty() {
        return Err(ScenarioError::NoOutcomes);
    }
    let base = cfg.base.build()?;
    let signals = cfg
        .continuers
        .iter()
        .map(|p| p.apply(&base))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..signals.len() {
        for j in i + 1..signals.len() {
            if signals[i] == signals[j] {
                return Err(ScenarioError::DuplicateContinuer(
                    cfg.continuers[i].label.clone(),
                    cfg.continuers[j].label.clone(),
                ));
            }
        }
    }

    let base_enc = minimal_encoding_search(&base, cfg.epsilon)?;
    let base_norm = base.norm();
    let mut details = Vec::with_capacity(signals.len());
    for (p, signal) in cfg.continuers.iter().zip(&signals) {
        let enc = minimal_encoding_search(signal, cfg.epsilon)?;
        let denom = signal.norm() * base_norm;
        let overlap = if denom == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            inner_product(signal, &base)? / denom
        };
        details.push(CodecContinuer {
            label: p.label.clone(),
            bits: enc.bit_length(),
            rate: enc.params.rate,
            amplitude_bits: enc.params.bits,
            delta_h: enc.bit_length() as f64 - base_enc.bit_length() as f64,
            overlap: [overlap.re, overlap.im],
            distortion: enc.distortion,
        });
    }

    let continuers = ContinuerSet::new(
        details.iter().map(|d| d.label.clone()).collect(),
        Evidence::EntropyBits(details.iter().map(|d| d.bits as f64).collect()),
    )?;
    let CodecParams { rate, bits, .. } = base_enc.params;
    Ok(Scenario {
        name: name.to_string(),
        continuers,
        detail: ScenarioDetail::Codec(CodecDetail {
            epsilon: cfg.epsilon,
            base_bits: base_enc.bit_length(),
            base_rate: rate,
            base_amplitude_bits: bits,
            continuers: details,
        }),
    })
}

pub fn build(cfg: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    match &cfg.spec {
        ScenarioSpec::Replicator(r) => build_replicator(&cfg.name, r),
        ScenarioSpec::Quantum(q) => build_quantum(&cfg.name, q),
        ScenarioSpec::Codec(c) => build_codec_scenario(&cfg.name, c),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub measure: Measure,
    pub trials: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    /// Distance between the empirical frequencies and the measure.
    pub total_variation: f64,
}

/// Draws `trials` i.i.d. outcomes from `result.probabilities`.
pub fn monte_carlo(
    result: &MeasureResult,
    trials: u64,
    seed: u64,
) -> Result<MonteCarlo, ScenarioError> {
    if trials == 0 {
        return Err(ScenarioError::NoTrials);
    }
    let dist = WeightedIndex::new(&result.probabilities)
        .map_err(|e| ScenarioError::Config(format!("cannot sample measure: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; result.probabilities.len()];
    for _ in 0..trials {
        counts[dist.sample(&mut rng)] += 1;
    }
    let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let tv = total_variation(&frequencies, &result.probabilities)?;
    Ok(MonteCarlo {
        measure: result.measure,
        trials,
        seed,
        rng: RNG_NAME,
        counts,
        frequencies,
        total_variation: tv,
    })
}

/// Ranks with ties sharing their average rank (1-based).
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation; `None` when either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    Some((cov / (va * vb).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseDistance {
    pub a: Measure,
    pub b: Measure,
    pub total_variation: f64,
    pub divergent: bool,
}

/// Amplitude ↔ alteration-bit comparison for codec scenarios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correspondence {
    pub amplitudes: Vec<f64>,
    pub neg_delta_h: Vec<f64>,
    /// Spearman correlation of `|aᵢ|` against `−ΔHᵢ`.
    pub spearman: Option<f64>,
    /// Normalized `2^{−ΔHᵢ}`.
    pub algorithmic: Vec<f64>,
    /// Normalized `|aᵢ|²`.
    pub born_overlap: Vec<f64>,
    /// Total variation between the two vectors above. Reported, not judged.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub kind: ScenarioKind,
    pub labels: Vec<String>,
    pub measures: Vec<MeasureResult>,
    pub distances: Vec<PairwiseDistance>,
    pub correspondence: Option<Correspondence>,
    pub monte_carlo: Vec<MonteCarlo>,
    pub detail: ScenarioDetail,
}

impl ComparisonReport {
    pub fn measure(&self, m: Measure) -> Option<&MeasureResult> {
        self.measures.iter().find(|r| r.measure == m)
    }

    pub fn distance(&self, a: Measure, b: Measure) -> Option<f64> {
        self.distances
            .iter()
            .find(|d| (d.a, d.b) == (a, b) || (d.a, d.b) == (b, a))
            .map(|d| d.total_variation)
    }
}

/// Runs every measure the scenario has evidence for, with pairwise
/// distances and a seeded Monte Carlo check per measure.
pub fn compare(
    scenario: &Scenario,
    trials: u64,
    seed: u64,
) -> Result<ComparisonReport, ScenarioError> {
    let set = &scenario.continuers;
    let measures = Measure::ALL
        .iter()
        .filter(|m| m.applies_to(set))
        .map(|m| m.apply(set))
        .collect::<Result<Vec<_>, _>>()?;

    let mut distances = Vec::new();
    for (i, a) in measures.iter().enumerate() {
        for b in &measures[i + 1..] {
            let tv = total_variation(&a.probabilities, &b.probabilities)?;
            distances.push(PairwiseDistance {
                a: a.measure,
                b: b.measure,
                total_variation: tv,
                divergent: tv > DIVERGENCE_THRESHOLD,
            });
        }
    }

    let correspondence = match &scenario.detail {
        ScenarioDetail::Codec(detail) => Some(correspondence(detail)?),
        _ => None,
    };

    let monte_carlo = measures
        .iter()
        .map(|m| monte_carlo(m, trials, seed))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ComparisonReport {
        scenario: scenario.name.clone(),
        kind: scenario.kind(),
        labels: set.labels().to_vec(),
        measures,
        distances,
        correspondence,
        monte_carlo,
        detail: scenario.detail.clone(),
    })
}

fn correspondence(detail: &CodecDetail) -> Result<Correspondence, ScenarioError> {
    let amplitudes: Vec<f64> = detail
        .continuers
        .iter()
        .map(CodecContinuer::amplitude)
        .collect();
    let neg_delta_h: Vec<f64> = detail.continuers.iter().map(|c| -c.delta_h).collect();
    let labels: Vec<String> = detail.continuers.iter().map(|c| c.label.clone()).collect();
    let min_dh = detail
        .continuers
        .iter()
        .map(|c| c.delta_h)
        .fold(f64::INFINITY, f64::min);
    let algorithmic = algorithmic_measure(&ContinuerSet::new(
        labels.clone(),
        Evidence::EntropyBits(
            detail
                .continuers
                .iter()
                .map(|c| c.delta_h - min_dh)
                .collect(),
        ),
    )?)?
    .probabilities;
    let born_overlap = born_measure(&ContinuerSet::new(
        labels,
        Evidence::Amplitudes(
            detail
                .continuers
                .iter()
                .map(|c| complex(c.overlap))
                .collect(),
        ),
    )?)?
    .probabilities;
    let gap = total_variation(&algorithmic, &born_overlap)?;
    Ok(Correspondence {
        spearman: spearman(&amplitudes, &neg_delta_h),
        amplitudes,
        neg_delta_h,
        algorithmic,
        born_overlap,
        gap,
    })
}
