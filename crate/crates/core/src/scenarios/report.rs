use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{build, compare, ComparisonReport, ScenarioConfig, ScenarioError, RNG_NAME};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// SHA-256 of the raw config text.
    pub config_hash: String,
    pub seed: u64,
    pub trials: u64,
    pub rng: &'static str,
    pub library_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub provenance: Provenance,
    pub comparison: ComparisonReport,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per (measure, continuer): plot-ready.
    pub fn to_csv(&self) -> String {
        let c = &self.comparison;
        let mut out = String::from("scenario,measure,label,probability,log_weight,mc_frequency\n");
        for (m, mc) in c.measures.iter().zip(&c.monte_carlo) {
            for (i, label) in c.labels.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    csv_field(&c.scenario),
                    m.measure,
                    csv_field(label),
                    m.probabilities[i],
                    m.log_weights[i],
                    mc.frequencies[i]
                );
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Parses, builds and compares one scenario config.
///
/// `seed_override` beats the config's seed. In deterministic mode the
/// wall-clock field is left out so identical inputs give identical bytes.
pub fn run_config(
    text: &str,
    seed_override: Option<u64>,
    deterministic: bool,
) -> Result<Report, ScenarioError> {
    let cfg = ScenarioConfig::from_toml(text)?;
    let seed = seed_override.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    let scenario = build(&cfg)?;
    let comparison = compare(&scenario, trials, seed)?;
    let generated_unix = (!deterministic).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    Ok(Report {
        provenance: Provenance {
            config_hash: hex::encode(Sha256::digest(text.as_bytes())),
            seed,
            trials,
            rng: RNG_NAME,
            library_version: env!("CARGO_PKG_VERSION"),
            generated_unix,
        },
        comparison,
    })
}
