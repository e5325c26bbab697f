//! TOML scenario descriptions.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::codec::DEFAULT_EPSILON;
use crate::statevec::StateVector;

/// A complex number written as `[re, im]`.
pub type Pair = [f64; 2];

pub(crate) fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub spec: ScenarioSpec,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    Replicator(ReplicatorConfig),
    Quantum(QuantumConfig),
    Codec(CodecConfig),
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct ReplicatorConfig {
    pub rooms: Vec<Room>,
}

/// A room holding `count` copies of an observer whose experience is `label`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
pub struct Room {
    pub label: String,
    #[serde(default = "one")]
    pub count: i64,
}

fn one() -> i64 {
    1
}

fn yes() -> bool {
    true
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

/// Either `outcomes` with amplitude paths, or `psi` with continuer states.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct QuantumConfig {
    #[serde(default)]
    pub outcomes: Vec<OutcomeConfig>,
    #[serde(default)]
    pub psi: Option<Vec<Pair>>,
    #[serde(default)]
    pub continuers: Vec<ContinuerState>,
    #[serde(default = "yes")]
    pub include_dead: bool,
}

/// An outcome reached along one or more paths; path amplitudes add
/// coherently before any squaring.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct OutcomeConfig {
    pub label: String,
    #[serde(default)]
    pub amplitude: Option<Pair>,
    #[serde(default)]
    pub paths: Vec<Pair>,
}

impl OutcomeConfig {
    pub fn total_amplitude(&self) -> Complex64 {
        self.amplitude
            .into_iter()
            .chain(self.paths.iter().copied())
            .map(complex)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct ContinuerState {
    pub label: String,
    pub state: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct CodecConfig {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub base: SignalSpec,
    pub continuers: Vec<Perturbation>,
}

/// One frequency component: `amp · e^{2πi·freq·x/N}` at every sample `x`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct Component {
    pub freq: usize,
    pub amp: Pair,
}

/// Complex Gaussian noise with standard deviation `scale` per component.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct NoiseSpec {
    pub seed: u64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct SignalSpec {
    pub dimension: usize,
    #[serde(default)]
    pub components: Vec<Component>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
}

impl SignalSpec {
    pub fn build(&self) -> Result<StateVector, ScenarioError> {
        let mut samples = vec![Complex64::new(0.0, 0.0); self.dimension];
        add_components(&mut samples, &self.components)?;
        if let Some(noise) = &self.noise {
            add_noise(&mut samples, noise);
        }
        Ok(StateVector::new(samples)?)
    }
}

/// A continuer derived from the base signal. With `replace`, the base is
/// discarded first, which yields maverick continuers.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct Perturbation {
    pub label: String,
    #[serde(default)]
    pub add: Vec<Component>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub replace: bool,
}

impl Perturbation {
    pub fn apply(&self, base: &StateVector) -> Result<StateVector, ScenarioError> {
        let mut samples = if self.replace {
            vec![Complex64::new(0.0, 0.0); base.dimension()]
        } else {
            base.as_slice().to_vec()
        };
        add_components(&mut samples, &self.add)?;
        if let Some(noise) = &self.noise {
            add_noise(&mut samples, noise);
        }
        Ok(StateVector::new(samples)?)
    }
}

fn add_components(
    samples: &mut [Complex64],
    components: &[Component],
) -> Result<(), ScenarioError> {
    let n = samples.len();
    for c in components {
        if c.freq >= n {
            return Err(ScenarioError::Signal(format!(
                "frequency {} outside 0..{n}",
                c.freq
            )));
        }
        let amp = complex(c.amp);
        for (x, s) in samples.iter_mut().enumerate() {
            // Reduce k·x mod N before scaling so phases stay exact for large N.
            let phase = TAU * ((c.freq * x) % n) as f64 / n as f64;
            *s += amp * Complex64::from_polar(1.0, phase);
        }
    }
    Ok(())
}

fn add_noise(samples: &mut [Complex64], noise: &NoiseSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    for s in samples {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *s += Complex64::new(re, im) * noise.scale;
    }
}
