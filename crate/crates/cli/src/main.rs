use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use huygens::experiments::{self, Check, CompressionRow, ExperimentConfig};

#[derive(Parser, Debug)]
#[command(name = "huygens", version, about = "Pulsed-beam Huygens representation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON file with experiment parameters; missing fields use defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write `<experiment>.<format>` into this directory instead of stdout.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Relative tolerance for the reproduction checks.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Frequency-domain reproduction of e^{iωr}/r with adaptive refinement.
    VerifyFreq,
    /// Time-domain reproduction of g_d(t - r)/r over the pulse window.
    VerifyTime,
    /// Spacetime relation with midpoint and endpoint contours.
    VerifySpacetime,
    /// Cap-angle compression sweep.
    Compress,
    /// Integrand magnitude on a latitude-longitude grid at the peak time.
    IntegrandMap,
    /// Peak-time radiation patterns.
    Patterns,
    /// Contour choice s = η_e + λ(η_r - η_e) against error and growth.
    Stability,
    /// Frontal-zone and node-count asymptotics for large a.
    LargeA,
    /// Fast consistency checks.
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyFreq => "verify-freq",
            Command::VerifyTime => "verify-time",
            Command::VerifySpacetime => "verify-spacetime",
            Command::Compress => "compress",
            Command::IntegrandMap => "integrand-map",
            Command::Patterns => "patterns",
            Command::Stability => "stability",
            Command::LargeA => "large-a",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<huygens::Error> for Failure {
    fn from(e: huygens::Error) -> Self {
        match e {
            huygens::Error::Config(msg) => Failure::Usage(format!("invalid config: {msg}")),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

#[derive(Serialize)]
struct CurvePoint {
    a: f64,
    cap_angle_deg: f64,
    max_relative_error: f64,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
        }
        cfg.tol = tol;
    }
    Ok(cfg)
}

/// Writes rows as CSV, or rows plus config echo and checks as JSON.
fn emit<T: Serialize>(
    cli: &Cli,
    cfg: &ExperimentConfig,
    rows: &[T],
    extra: Value,
    checks: &[Check],
) -> Result<(), Failure> {
    let name = cli.command.name();
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let ext = match cli.format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            Box::new(io::BufWriter::new(fs::File::create(dir.join(format!("{name}.{ext}")))?))
        }
        None => Box::new(io::stdout().lock()),
    };
    match cli.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut doc = json!({
                "experiment": name,
                "config": cfg,
                "rows": rows,
                "checks": checks,
            });
            if let (Value::Object(map), Value::Object(more)) = (&mut doc, extra) {
                map.extend(more);
            }
            serde_json::to_writer_pretty(&mut sink, &doc)?;
            writeln!(sink)?;
            sink.flush()?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let cfg = load_config(cli)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let checks = match cli.command {
        Command::VerifyFreq => {
            let r = experiments::verify_freq(&cfg)?;
            emit(cli, &cfg, &r.rows, Value::Null, &r.checks)?;
            r.checks
        }
        Command::VerifyTime => {
            let r = experiments::verify_time(&cfg)?;
            emit(cli, &cfg, &r.rows, Value::Null, &r.checks)?;
            r.checks
        }
        Command::VerifySpacetime => {
            let r = experiments::verify_spacetime(&cfg)?;
            emit(cli, &cfg, &r.rows, Value::Null, &r.checks)?;
            r.checks
        }
        Command::Compress => {
            let r = experiments::compression_sweep(&cfg)?;
            let points: Vec<CurvePoint> = r
                .curves
                .iter()
                .flat_map(|c| {
                    c.points.iter().map(|&(b, e)| CurvePoint {
                        a: c.a,
                        cap_angle_deg: b,
                        max_relative_error: e,
                    })
                })
                .collect();
            let crossings: Vec<Value> = r
                .curves
                .iter()
                .map(|c| json!({"a": c.a, "cap_angle_deg": c.crossing(cfg.threshold)}))
                .collect();
            let table: &[CompressionRow] = &r.rows;
            emit(cli, &cfg, &points, json!({"table": table, "crossings": crossings}), &r.checks)?;
            r.checks
        }
        Command::IntegrandMap => {
            let r = experiments::integrand_map(&cfg)?;
            emit(cli, &cfg, &r.rows, Value::Null, &r.checks)?;
            r.checks
        }
        Command::Patterns => {
            let r = experiments::pattern_sweep(&cfg)?;
            emit(cli, &cfg, &r.rows, Value::Null, &r.checks)?;
            r.checks
        }
        Command::Stability => {
            let r = experiments::stability_sweep(&cfg)?;
            emit(cli, &cfg, &r.rows, Value::Null, &r.checks)?;
            r.checks
        }
        Command::LargeA => {
            let r = experiments::large_a_report(&cfg)?;
            emit(cli, &cfg, &r.rows, Value::Null, &r.checks)?;
            r.checks
        }
        Command::Selftest => {
            let checks = experiments::selftest()?;
            emit(cli, &cfg, &checks, Value::Null, &checks)?;
            checks
        }
    };
    for c in &checks {
        eprintln!("{c}");
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
