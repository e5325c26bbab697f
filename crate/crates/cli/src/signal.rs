//! Signal CSV: one `re,im` row per sample. Blank lines, `#` comments and an
//! optional `re,im` header are skipped.

use std::fmt::Write as _;

use algoprob::statevec::StateVector;
use algoprob::Complex64;

pub fn parse_csv(text: &str) -> Result<StateVector, String> {
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("re,im") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [re, im] = fields[..] else {
            return Err(format!("line {}: expected `re,im`, got {line:?}", i + 1));
        };
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("line {}: {s:?} is not a finite number", i + 1))
        };
        samples.push(Complex64::new(parse(re)?, parse(im)?));
    }
    StateVector::new(samples).map_err(|e| e.to_string())
}

pub fn to_csv(signal: &StateVector) -> String {
    let mut out = String::from("re,im\n");
    for c in signal.iter() {
        let _ = writeln!(out, "{:e},{:e}", c.re, c.im);
    }
    out
}
