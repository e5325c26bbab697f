//! `algoprob` command-line interface.
//!
//! Exit codes: 0 success, 1 one or more scenarios failed, 2 malformed input
//! (bad arguments, configs, signals or streams), 3 I/O failure.

mod manifest;
mod signal;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use algoprob::codec::{self, CodecParams};
use algoprob::entropy::{compressor_by_name, entropy_report, ConditionalMode};
use algoprob::scenarios::{run_config, Report};

use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(
    name = "algoprob",
    version,
    about = "Algorithmic-probability branch measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a signal CSV to a stream container, or decode one back.
    #[command(subcommand)]
    Codec(CodecCommand),
    /// Print an entropy report for a file (optionally given another) as JSON.
    Entropy(EntropyArgs),
    /// Run a scenario config or a manifest of them and write reports.
    Run(RunArgs),
    /// Combine existing JSON reports into one table.
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
enum CodecCommand {
    Encode(EncodeArgs),
    Decode(DecodeArgs),
}

#[derive(Debug, Args)]
struct EncodeArgs {
    /// Signal CSV, one `re,im` row per sample.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Retained frequencies R; requires --bits. Omit both for the minimal encoding.
    #[arg(long, requires = "bits")]
    rate: Option<usize>,
    /// Bits per complex amplitude b (even, >= 4).
    #[arg(long, requires = "rate")]
    bits: Option<u32>,
    /// Distortion budget for the minimal encoding.
    #[arg(long, default_value_t = codec::DEFAULT_EPSILON, conflicts_with = "rate")]
    epsilon: f64,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    /// Stream container written by `codec encode`.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Resample to this many points instead of the stream's own N.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args)]
struct EntropyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Conditioning file y for H(x|y) and mutual information.
    #[arg(long)]
    given: Option<PathBuf>,
    #[arg(long, default_value = "lz77")]
    compressor: String,
    /// Distortion budget for the dft compressor.
    #[arg(long, default_value_t = codec::DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value = "concat")]
    mode: ConditionalMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Manifest (has a `scenarios` list) or a single scenario config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the manifest's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed applied to every scenario.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Omit wall-clock fields so reports are byte-stable.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory of JSON reports written by `run`.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Malformed(String),
    Io(String),
    ScenarioFailures(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ScenarioFailures(_) => 1,
            CliError::Malformed(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Malformed(m) => write!(f, "malformed input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::ScenarioFailures(n) => write!(f, "{n} scenario(s) failed"),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    String::from_utf8(read(path)?)
        .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn malformed(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Malformed(format!("{}: {e}", path.display()))
}

fn cmd_encode(args: &EncodeArgs) -> Result<(), CliError> {
    let signal =
        signal::parse_csv(&read_text(&args.input)?).map_err(|e| malformed(&args.input, e))?;
    let stream = match (args.rate, args.bits) {
        (Some(rate), Some(bits)) => {
            let params = CodecParams::new(signal.dimension(), rate, bits)
                .map_err(|e| CliError::Malformed(e.to_string()))?;
            codec::encode(&signal, params)
        }
        _ => codec::minimal_encoding(&signal, args.epsilon),
    }
    .map_err(|e| CliError::Malformed(e.to_string()))?;
    write(&args.out, &codec::write_container(&stream))?;
    let p = stream.params();
    println!(
        "N={} R={} b={} bits={}",
        p.dimension,
        p.rate,
        p.bits,
        stream.bit_length()
    );
    Ok(())
}

fn cmd_decode(args: &DecodeArgs) -> Result<(), CliError> {
    let bytes = read(&args.input)?;
    let stream = codec::read_container(&bytes).map_err(|e| malformed(&args.input, e))?;
    let signal = codec::decode(&stream, args.dim).map_err(|e| malformed(&args.input, e))?;
    let csv = signal::to_csv(&signal);
    match &args.out {
        Some(path) => write(path, csv.as_bytes()),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_entropy(args: &EntropyArgs) -> Result<(), CliError> {
    let c = compressor_by_name(&args.compressor, args.epsilon)
        .map_err(|e| CliError::Malformed(e.to_string()))?;
    let x = read(&args.input)?;
    let y = args.given.as_deref().map(read).transpose()?;
    let report = entropy_report(&x, y.as_deref(), c.as_ref(), args.mode);
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

fn summary_line(report: &Report) -> String {
    let c = &report.comparison;
    let measures: Vec<String> = c
        .measures
        .iter()
        .map(|m| {
            let probs: Vec<String> = m.probabilities.iter().map(|p| format!("{p:.4}")).collect();
            format!("{}=({})", m.measure, probs.join(","))
        })
        .collect();
    let mut line = format!(
        "{:<30} {:<10} {}",
        c.scenario,
        format!("{:?}", c.kind).to_lowercase(),
        measures.join(" ")
    );
    if let Some(rho) = c.correspondence.as_ref().and_then(|k| k.spearman) {
        line.push_str(&format!(" spearman={rho:.3}"));
    }
    line
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let text = read_text(&args.config)?;
    let manifest =
        RunManifest::load(&args.config, &text).map_err(|e| malformed(&args.config, e))?;
    let out_dir = args.out.clone().or(manifest.out.clone());
    let format = args.format.or(manifest.format).unwrap_or(Format::Json);
    let deterministic = args.deterministic || manifest.deterministic;
    let seed = args.seed.or(manifest.seed);

    if let Some(dir) = &out_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }

    // Scenarios run in parallel; results are reported in manifest order.
    let results: Vec<(PathBuf, Result<Report, String>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = manifest
            .scenarios
            .iter()
            .map(|path| {
                scope.spawn(move || {
                    let result = fs::read_to_string(path)
                        .map_err(|e| format!("i/o error: {e}"))
                        .and_then(|t| {
                            run_config(&t, seed, deterministic).map_err(|e| e.to_string())
                        });
                    (path.clone(), result)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario worker panicked"))
            .collect()
    });

    let mut failures = 0;
    for (path, result) in results {
        match result {
            Ok(report) => {
                println!("{}", summary_line(&report));
                if let Some(dir) = &out_dir {
                    let ext = match format {
                        Format::Json => "json",
                        Format::Csv => "csv",
                    };
                    let file = dir.join(format!("{}.{ext}", report.comparison.scenario));
                    write(&file, render(&report, format).as_bytes())?;
                }
            }
            Err(e) => {
                failures += 1;
                eprintln!("FAILED {}: {e}", path.display());
            }
        }
    }
    if failures > 0 {
        return Err(CliError::ScenarioFailures(failures));
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let dir = &args.config;
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();

    let mut rows = Vec::new();
    for path in &paths {
        let value: serde_json::Value =
            serde_json::from_str(&read_text(path)?).map_err(|e| malformed(path, e))?;
        rows.extend(manifest::report_rows(&value).map_err(|e| malformed(path, e))?);
    }

    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("scenario,measure,label,probability\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    r.scenario, r.measure, r.label, r.probability
                ));
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
            s.push('\n');
            s
        }
    };
    match &args.out {
        Some(path) => write(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Codec(CodecCommand::Encode(a)) => cmd_encode(a),
        Command::Codec(CodecCommand::Decode(a)) => cmd_decode(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Run(a) => cmd_run(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
