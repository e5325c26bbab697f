//! Run manifests and report aggregation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::Format;

/// A batch of scenario configs plus run options.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    /// Resolved against the manifest's directory.
    pub scenarios: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub deterministic: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    scenarios: Vec<PathBuf>,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    deterministic: bool,
}

impl RunManifest {
    /// A file with a `scenarios` key is a manifest; anything else is taken
    /// as a single scenario config.
    pub fn load(path: &Path, text: &str) -> Result<Self, String> {
        let value: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
        let base = path.parent().unwrap_or(Path::new("."));
        if !value.contains_key("scenarios") {
            return Ok(RunManifest {
                scenarios: vec![path.to_path_buf()],
                out: None,
                seed: None,
                format: None,
                deterministic: false,
            });
        }
        let raw: RawManifest = toml::from_str(text).map_err(|e| e.to_string())?;
        let format = match raw.format.as_deref() {
            None => None,
            Some("json") => Some(Format::Json),
            Some("csv") => Some(Format::Csv),
            Some(other) => return Err(format!("unknown format {other:?}")),
        };
        for s in &raw.scenarios {
            let p = base.join(s);
            if !p.is_file() {
                return Err(format!("scenario config {} does not exist", p.display()));
            }
        }
        Ok(RunManifest {
            scenarios: raw.scenarios.iter().map(|s| base.join(s)).collect(),
            out: raw.out.map(|o| base.join(o)),
            seed: raw.seed,
            format,
            deterministic: raw.deterministic,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub scenario: String,
    pub measure: String,
    pub label: String,
    pub probability: f64,
}

/// Flattens one JSON report into (scenario, measure, label, probability) rows.
pub fn report_rows(report: &serde_json::Value) -> Result<Vec<ReportRow>, String> {
    let c = &report["comparison"];
    let scenario = c["scenario"]
        .as_str()
        .ok_or("missing comparison.scenario")?;
    let labels: Vec<&str> = c["labels"]
        .as_array()
        .ok_or("missing comparison.labels")?
        .iter()
        .map(|l| l.as_str().ok_or("non-string label"))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for m in c["measures"]
        .as_array()
        .ok_or("missing comparison.measures")?
    {
        let measure = m["measure"].as_str().ok_or("missing measure name")?;
        let probs = m["probabilities"]
            .as_array()
            .ok_or("missing probabilities")?;
        if probs.len() != labels.len() {
            return Err(format!(
                "{measure}: {} probabilities for {} labels",
                probs.len(),
                labels.len()
            ));
        }
        for (label, p) in labels.iter().zip(probs) {
            rows.push(ReportRow {
                scenario: scenario.to_string(),
                measure: measure.to_string(),
                label: label.to_string(),
                probability: p.as_f64().ok_or("non-numeric probability")?,
            });
        }
    }
    Ok(rows)
}
