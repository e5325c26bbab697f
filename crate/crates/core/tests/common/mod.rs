//! Oracles and corpus loaders shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;
use std::path::PathBuf;

use algoprob::codec::{
    decode, encode, relative_distortion, CodecParams, DEFAULT_EPSILON, MAX_SEARCH_BITS,
    MIN_SEARCH_BITS,
};
use algoprob::scenarios::{ScenarioConfig, ScenarioSpec};
use algoprob::statevec::StateVector;
use algoprob::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Direct O(N·R) unitary DFT, `X[k] = N^{-1/2} Σₓ s[x] e^{−2πi kx/N}`.
pub fn naive_dft(signal: &[Complex64], rate: usize) -> Vec<Complex64> {
    let n = signal.len();
    (0..rate)
        .map(|k| {
            signal
                .iter()
                .enumerate()
                .map(|(x, s)| {
                    s * Complex64::from_polar(1.0, -TAU * ((k * x) % n) as f64 / n as f64)
                })
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

pub fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    StateVector::new(
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
    .unwrap()
}

/// The four-frequency observer state used throughout the corpus.
pub fn band_limited() -> StateVector {
    let amps = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5, -0.25),
        Complex64::new(-0.3, 0.6),
        Complex64::new(0.2, 0.1),
    ];
    StateVector::new(
        (0..64)
            .map(|x| {
                amps.iter()
                    .enumerate()
                    .map(|(k, a)| a * Complex64::from_polar(1.0, TAU * (k * x) as f64 / 64.0))
                    .sum()
            })
            .collect(),
    )
    .unwrap()
}

/// Exhaustive sweep: encode and spatially decode every grid point, keep the
/// shortest stream within budget, ties to smaller R then smaller b.
pub fn sweep_oracle(signal: &StateVector, epsilon: f64) -> Option<(usize, usize, u32)> {
    let n = signal.dimension();
    let mut best: Option<(usize, usize, u32)> = None;
    for rate in 1..=n {
        for bits in (MIN_SEARCH_BITS..=MAX_SEARCH_BITS).step_by(2) {
            let params = CodecParams::new(n, rate, bits).unwrap();
            let stream = encode(signal, params).unwrap();
            let d = relative_distortion(signal, &decode(&stream, None).unwrap()).unwrap();
            if d <= epsilon {
                let cand = (stream.bit_length(), rate, bits);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
    }
    best
}

pub fn repo_path(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(sub)
}

pub fn read_signal_csv(path: &PathBuf) -> StateVector {
    let text = std::fs::read_to_string(path).unwrap();
    let samples = text
        .lines()
        .filter(|l| !l.starts_with('#') && *l != "re,im" && !l.trim().is_empty())
        .map(|l| {
            let (re, im) = l.split_once(',').unwrap();
            Complex64::new(re.trim().parse().unwrap(), im.trim().parse().unwrap())
        })
        .collect();
    StateVector::new(samples).unwrap()
}

/// Raw text of every bundled scenario config, sorted by file name.
pub fn scenario_texts() -> Vec<(String, String)> {
    let mut paths: Vec<_> = std::fs::read_dir(repo_path("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.toml")
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect()
}

pub fn scenario_config(name: &str) -> ScenarioConfig {
    let text = std::fs::read_to_string(repo_path(&format!("scenarios/{name}.toml"))).unwrap();
    ScenarioConfig::from_toml(&text).unwrap()
}

/// Every signal shipped in the repository: CSV files plus the base and
/// continuer signals of each codec scenario, with their budgets.
pub fn bundled_signals() -> Vec<(String, StateVector, f64)> {
    let mut out = Vec::new();
    let mut csvs: Vec<_> = std::fs::read_dir(repo_path("data/signals"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    csvs.sort();
    for p in csvs {
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        out.push((name, read_signal_csv(&p), DEFAULT_EPSILON));
    }
    for (_, text) in scenario_texts() {
        let cfg = ScenarioConfig::from_toml(&text).unwrap();
        if let ScenarioSpec::Codec(c) = cfg.spec {
            let base = c.base.build().unwrap();
            for pert in &c.continuers {
                out.push((
                    format!("{}:{}", cfg.name, pert.label),
                    pert.apply(&base).unwrap(),
                    c.epsilon,
                ));
            }
            out.push((format!("{}:base", cfg.name), base, c.epsilon));
        }
    }
    out
}
