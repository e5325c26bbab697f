use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn repo(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(sub)
}

fn algoprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algoprob"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn parse_csv(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .filter(|l| !l.starts_with('#') && *l != "re,im")
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn encode_fixed_params_writes_123_bit_container() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.blc");
    let input = repo("data/signals/bandlimited64.csv");
    let o = algoprob(&[
        "codec",
        "encode",
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--rate",
        "4",
        "--bits",
        "16",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "N=64 R=4 b=16 bits=123");
    let bytes = fs::read(&out).unwrap();
    assert_eq!(bytes.len(), 28);
    assert_eq!(&bytes[..4], b"BLC1");
    assert_eq!(u64::from_le_bytes(bytes[4..12].try_into().unwrap()), 123);
}

#[test]
fn minimal_encode_then_decode_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let blc = dir.path().join("m.blc");
    let csv = dir.path().join("back.csv");
    let input = repo("data/signals/bandlimited64.csv");
    let o = algoprob(&[
        "codec",
        "encode",
        "--input",
        s(&input),
        "--out",
        s(&blc),
        "--epsilon",
        "1e-3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("R=4"), "{}", stdout(&o));

    let o = algoprob(&["codec", "decode", "--input", s(&blc), "--out", s(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let orig = parse_csv(&fs::read_to_string(&input).unwrap());
    let back = parse_csv(&fs::read_to_string(&csv).unwrap());
    assert_eq!(orig.len(), back.len());
    let err: f64 = orig
        .iter()
        .zip(&back)
        .map(|(a, b)| (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2))
        .sum();
    let norm: f64 = orig.iter().map(|a| a.0 * a.0 + a.1 * a.1).sum();
    assert!((err / norm).sqrt() <= 1e-3);

    let o = algoprob(&["codec", "decode", "--input", s(&blc), "--dim", "256"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(parse_csv(&stdout(&o)).len(), 256);
}

#[test]
fn truncated_container_is_malformed_with_bit_offset() {
    let dir = tempfile::tempdir().unwrap();
    let blc = dir.path().join("m.blc");
    let input = repo("data/signals/bandlimited64.csv");
    let o = algoprob(&[
        "codec",
        "encode",
        "--input",
        s(&input),
        "--out",
        s(&blc),
        "--rate",
        "4",
        "--bits",
        "16",
    ]);
    assert!(o.status.success());
    let bytes = fs::read(&blc).unwrap();
    fs::write(&blc, &bytes[..22]).unwrap();
    let o = algoprob(&["codec", "decode", "--input", s(&blc)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bit offset 80"), "{}", stderr(&o));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = dir.path().join("x.blc");
    let o = algoprob(&["codec", "encode", "--input", s(&missing), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "re,im\n1.0,2.0\nabc,1\n").unwrap();
    let o = algoprob(&["codec", "encode", "--input", s(&bad), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = algoprob(&[
        "codec",
        "encode",
        "--input",
        s(&bad),
        "--out",
        s(&out),
        "--rate",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(2));

    // A manifest naming a scenario that fails to build.
    fs::write(
        dir.path().join("broken.toml"),
        "name = \"broken\"\nkind = \"replicator\"\nrooms = []\n",
    )
    .unwrap();
    fs::copy(
        repo("scenarios/interference.toml"),
        dir.path().join("ok.toml"),
    )
    .unwrap();
    let manifest = dir.path().join("manifest.toml");
    fs::write(&manifest, "scenarios = [\"ok.toml\", \"broken.toml\"]\n").unwrap();
    let o = algoprob(&["run", "--config", s(&manifest)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("interference"));
    assert!(stderr(&o).contains("broken.toml"));
}

#[test]
fn run_bundled_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let o = algoprob(&[
        "run",
        "--config",
        s(&repo("scenarios/manifest.toml")),
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = stdout(&o);
    assert_eq!(summary.lines().count(), 10);
    assert!(summary
        .lines()
        .next()
        .unwrap()
        .starts_with("replicator-two-doors"));

    let three: Value =
        serde_json::from_str(&fs::read_to_string(out.join("replicator-three-rooms.json")).unwrap())
            .unwrap();
    let measures = three["comparison"]["measures"].as_array().unwrap();
    let copy = measures
        .iter()
        .find(|m| m["measure"] == "copy_count")
        .unwrap();
    assert_eq!(
        copy["probabilities"],
        serde_json::json!([2.0 / 3.0, 1.0 / 3.0])
    );
    assert!(three["provenance"].get("generated_unix").is_none());
    assert_eq!(three["provenance"]["rng"], "ChaCha8Rng");

    let inter: Value =
        serde_json::from_str(&fs::read_to_string(out.join("interference.json")).unwrap()).unwrap();
    let measures = inter["comparison"]["measures"].as_array().unwrap();
    let born = measures.iter().find(|m| m["measure"] == "born").unwrap();
    let flat = measures.iter().find(|m| m["measure"] == "flat").unwrap();
    assert_eq!(born["probabilities"], serde_json::json!([0.0, 1.0]));
    assert_eq!(flat["probabilities"], serde_json::json!([0.5, 0.5]));
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let manifest = repo("scenarios/manifest.toml");
    for d in [&a, &b] {
        let o = algoprob(&[
            "run",
            "--config",
            s(&manifest),
            "--out",
            s(d),
            "--deterministic",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 10);
    for n in names {
        assert_eq!(
            fs::read(a.join(&n)).unwrap(),
            fs::read(b.join(&n)).unwrap(),
            "{n:?}"
        );
    }
}

#[test]
fn single_scenario_csv_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = repo("scenarios/quantum-unequal.toml");
    let o = algoprob(&[
        "run",
        "--config",
        s(&config),
        "--out",
        s(dir.path()),
        "--format",
        "csv",
        "--seed",
        "7",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("quantum-unequal.csv")).unwrap();
    assert!(csv.starts_with("scenario,measure,label,probability,log_weight,mc_frequency\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 2);

    let o = algoprob(&[
        "run",
        "--config",
        s(&config),
        "--out",
        s(dir.path()),
        "--seed",
        "7",
    ]);
    assert!(o.status.success());
    let v: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("quantum-unequal.json")).unwrap())
            .unwrap();
    assert_eq!(v["provenance"]["seed"], 7);
    assert!(v["provenance"]["generated_unix"].is_u64());
}

#[test]
fn report_aggregates_json_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let o = algoprob(&[
        "run",
        "--config",
        s(&repo("scenarios/manifest.toml")),
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let o = algoprob(&["report", "--config", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    assert!(table.starts_with("scenario,measure,label,probability\n"));
    assert!(table.contains("interference,born,cancelled,0\n"));
    assert!(table.contains("replicator-three-rooms,flat,live,0.5\n"));

    let o = algoprob(&["report", "--config", s(&out), "--format", "json"]);
    let rows: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rows.as_array().unwrap().len() > 40);
}

#[test]
fn entropy_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.bin");
    let y = dir.path().join("y.bin");
    fs::write(&x, b"ab".repeat(32)).unwrap();
    fs::write(&y, b"ab".repeat(16)).unwrap();
    let o = algoprob(&["entropy", "--input", s(&x), "--given", s(&y)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["h_x", "h_y", "h_x_given_y", "mutual", "compressor"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["h_x"], 46.0);
    assert_eq!(v["compressor"], "lz77");
    let (hx, given, mutual) = (
        v["h_x"].as_f64().unwrap(),
        v["h_x_given_y"].as_f64().unwrap(),
        v["mutual"].as_f64().unwrap(),
    );
    assert_eq!(mutual, hx - given);

    let o = algoprob(&["entropy", "--input", s(&x), "--compressor", "zip"]);
    assert_eq!(o.status.code(), Some(2));
    let o = algoprob(&["entropy", "--input", s(&x), "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
}
