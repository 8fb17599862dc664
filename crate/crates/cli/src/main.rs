//! `ils` — encrypt/decrypt color images with the 3D-ILS chaotic cipher,
//! analyze the map's dynamics, and produce statistical security reports.

mod imgio;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ils_core::chaos::DEFAULT_TRANSIENT;
use ils_core::dynamics::{self, JacobianSource, SpectrumReport, SweptParameter};
use ils_core::metrics::{self, MetricsReport, DEFAULT_CORRELATION_SAMPLES};
use ils_core::{
    bifurcation_scan, decrypt, encrypt, lyapunov_qr, phase_samples, sensitivity_pair, Guards,
    KeyMaterial, SystemParams, SystemState,
};

use imgio::{load_rgb, save_rgb, ImageFormat};

/// Exit codes: 0 success, 2 usage (from argument parsing), 3 I/O failure,
/// 4 key failure, 5 validation failure.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Key(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 3,
            CliError::Key(_) => 4,
            CliError::Validation(_) => 5,
        }
    }
}

impl From<ils_core::ChaosError> for CliError {
    fn from(e: ils_core::ChaosError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ils_core::DynamicsError> for CliError {
    fn from(e: ils_core::DynamicsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ils_core::MetricsError> for CliError {
    fn from(e: ils_core::MetricsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ils_core::CipherError> for CliError {
    fn from(e: ils_core::CipherError) -> Self {
        match e {
            ils_core::CipherError::MalformedKey { .. } => CliError::Key(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ils",
    version,
    about = "3D-ILS hyperchaotic map: image cipher, dynamics analysis, security evaluation",
    after_help = "Exit codes: 0 success, 2 usage error, 3 I/O failure, 4 key failure, 5 validation failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt an RGB image (keys derived from the plaintext unless a raw
    /// key is supplied)
    Encrypt(EncryptArgs),
    /// Decrypt a cipher image with the key file or raw key
    Decrypt(DecryptArgs),
    /// Run a dynamics analysis and emit CSV/JSON
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Encrypt a plaintext and produce the full statistical security
    /// report
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct EncryptArgs {
    /// Input image (png or ppm)
    #[arg(long = "in")]
    input: PathBuf,
    /// Output cipher image (lossless; png or ppm)
    #[arg(long = "out")]
    output: PathBuf,
    /// Where to write the derived 64-hex key (default: <out>.key)
    #[arg(long)]
    key_file: Option<PathBuf>,
    /// Encrypt under this raw 256-bit key instead of deriving from the
    /// plaintext
    #[arg(long)]
    raw_key: Option<String>,
    /// Force the output format instead of inferring from the extension
    #[arg(long, value_enum)]
    format: Option<ImageFormat>,
}

#[derive(Args)]
struct DecryptArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    /// File holding the 64-hex key written at encryption time
    #[arg(long)]
    key_file: Option<PathBuf>,
    /// Raw 64-hex key
    #[arg(long)]
    raw_key: Option<String>,
    #[arg(long, value_enum)]
    format: Option<ImageFormat>,
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// ICMIC frequency
    #[arg(long)]
    alpha: Option<f64>,
    /// Logistic rate
    #[arg(long)]
    r: Option<f64>,
    /// Sine frequency
    #[arg(long)]
    mu: Option<f64>,
    /// Coupling coefficient (fixed 0.077 unless overridden for research
    /// scans)
    #[arg(long)]
    c: Option<f64>,
    /// Saturation margin
    #[arg(long)]
    eps: Option<f64>,
    /// Denominator floor
    #[arg(long)]
    eps_d: Option<f64>,
    /// Initial state as x,y,z
    #[arg(long, value_parser = parse_seed)]
    seed: Option<[f64; 3]>,
    /// Override the x seed coordinate
    #[arg(long)]
    x0: Option<f64>,
    /// Override the y seed coordinate
    #[arg(long)]
    y0: Option<f64>,
    /// Override the z seed coordinate
    #[arg(long)]
    z0: Option<f64>,
}

impl ParamArgs {
    fn params(&self, defaults: (f64, f64, f64)) -> Result<SystemParams, CliError> {
        let mut p = SystemParams::new(
            self.alpha.unwrap_or(defaults.0),
            self.r.unwrap_or(defaults.1),
            self.mu.unwrap_or(defaults.2),
        )?;
        if let Some(c) = self.c {
            p = p.with_coupling(c);
        }
        if self.eps.is_some() || self.eps_d.is_some() {
            let g = Guards::new(
                self.eps.unwrap_or(Guards::DEFAULT_EPS),
                self.eps_d.unwrap_or(Guards::DEFAULT_EPS_D),
            )?;
            p = p.with_guards(g);
        }
        Ok(p)
    }

    fn seed(&self, default: [f64; 3]) -> SystemState {
        let base = self.seed.unwrap_or(default);
        SystemState::new(
            self.x0.unwrap_or(base[0]),
            self.y0.unwrap_or(base[1]),
            self.z0.unwrap_or(base[2]),
        )
    }
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// QR Lyapunov spectrum (JSON report)
    Lyapunov(LyapunovArgs),
    /// Bifurcation scan over one control parameter (CSV)
    Bifurcation(BifurcationArgs),
    /// Neighboring-initial-state divergence trace (CSV)
    Sensitivity(SensitivityArgs),
    /// Orbit samples for 3-D phase scatter (CSV)
    Phase(PhaseArgs),
}

#[derive(Args)]
struct LyapunovArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of accumulation steps
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Transient iterations discarded before accumulating
    #[arg(long, default_value_t = DEFAULT_TRANSIENT)]
    transient: usize,
    /// Jacobian source for the tangent propagation
    #[arg(long, value_enum, default_value_t = JacobianArg::Fd)]
    jacobian: JacobianArg,
    /// Step for the finite-difference Jacobian source
    #[arg(long, default_value_t = JacobianSource::DEFAULT_FD_STEP)]
    fd_step: f64,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum JacobianArg {
    Analytic,
    Fd,
}

#[derive(Args)]
struct BifurcationArgs {
    /// Which parameter to sweep
    #[arg(long, value_enum)]
    sweep: SweepArg,
    /// Sweep grid as start:stop:count
    #[arg(long, value_parser = parse_grid)]
    grid: (f64, f64, usize),
    #[command(flatten)]
    params: ParamArgs,
    /// Iterations per grid point
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Trailing iterates kept per grid point
    #[arg(long, default_value_t = 200)]
    keep: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    Alpha,
    R,
    Mu,
}

impl From<SweepArg> for SweptParameter {
    fn from(s: SweepArg) -> Self {
        match s {
            SweepArg::Alpha => SweptParameter::Alpha,
            SweepArg::R => SweptParameter::R,
            SweepArg::Mu => SweptParameter::Mu,
        }
    }
}

#[derive(Args)]
struct SensitivityArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Seed perturbation added to every coordinate
    #[arg(long, default_value_t = dynamics::DEFAULT_SENSITIVITY_DELTA)]
    delta: f64,
    /// Steps to iterate both orbits
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Recorded samples after the transient
    #[arg(long, default_value_t = 5000)]
    steps: usize,
    /// Transient iterations discarded first
    #[arg(long, default_value_t = DEFAULT_TRANSIENT)]
    transient: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Plaintext image to evaluate
    #[arg(long = "in")]
    input: PathBuf,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write the cipher histogram as CSV (channel,bin,count)
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Pixel modified by the differential test, as row,col
    #[arg(long, value_parser = parse_pixel, default_value = "0,0")]
    pixel: (usize, usize),
    /// Replacement value for the modified pixel, as r,g,b (default: the
    /// original value with every channel's lowest bit flipped)
    #[arg(long, value_parser = parse_rgb)]
    value: Option<[u8; 3]>,
    /// Correlation samples per direction and channel
    #[arg(long, default_value_t = DEFAULT_CORRELATION_SAMPLES)]
    samples: usize,
    /// Base seed for the correlation sampler
    #[arg(long, default_value_t = 1)]
    corr_seed: u64,
}

fn parse_seed(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err("expected x,y,z".into());
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| format!("bad number {part:?}"))?;
    }
    Ok(out)
}

fn parse_grid(text: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err("expected start:stop:count".into());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| "bad start".to_string())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| "bad stop".to_string())?;
    let count: usize = parts[2].trim().parse().map_err(|_| "bad count".to_string())?;
    if count == 0 {
        return Err("count must be at least 1".into());
    }
    Ok((start, stop, count))
}

fn parse_pixel(text: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected row,col".into());
    }
    let row = parts[0].trim().parse().map_err(|_| "bad row".to_string())?;
    let col = parts[1].trim().parse().map_err(|_| "bad col".to_string())?;
    Ok((row, col))
}

fn parse_rgb(text: &str) -> Result<[u8; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err("expected r,g,b".into());
    }
    let mut out = [0u8; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| format!("bad byte {part:?}"))?;
    }
    Ok(out)
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    (0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect()
}

fn load_keys(raw_key: &Option<String>, key_file: &Option<PathBuf>) -> Result<KeyMaterial, CliError> {
    if let Some(hex) = raw_key {
        return Ok(KeyMaterial::from_hex(hex)?);
    }
    if let Some(path) = key_file {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Key(format!("cannot read key file {}: {e}", path.display())))?;
        return Ok(KeyMaterial::from_hex(&text)?);
    }
    Err(CliError::Key(
        "decryption requires --key-file or --raw-key".into(),
    ))
}

fn write_output(report: Option<&Path>, contents: &[u8]) -> Result<(), CliError> {
    match report {
        Some(path) => fs::write(path, contents)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(contents)
            .map_err(|e| CliError::Io(format!("cannot write stdout: {e}"))),
    }
}

fn cmd_encrypt(args: &EncryptArgs) -> Result<(), CliError> {
    let plain = load_rgb(&args.input)?;
    let (keys, derived) = match &args.raw_key {
        Some(hex) => (KeyMaterial::from_hex(hex)?, false),
        None => (KeyMaterial::derive(&plain), true),
    };
    let cipher = encrypt(&plain, &keys);
    save_rgb(&args.output, &cipher, args.format)?;
    if derived {
        let key_path = args.key_file.clone().unwrap_or_else(|| {
            let mut os = args.output.clone().into_os_string();
            os.push(".key");
            PathBuf::from(os)
        });
        fs::write(&key_path, format!("{}\n", keys.hash_hex()))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", key_path.display())))?;
        println!(
            "encrypted {} -> {} (derived key in {})",
            args.input.display(),
            args.output.display(),
            key_path.display()
        );
    } else {
        println!(
            "encrypted {} -> {} (raw key)",
            args.input.display(),
            args.output.display()
        );
    }
    Ok(())
}

fn cmd_decrypt(args: &DecryptArgs) -> Result<(), CliError> {
    let cipher = load_rgb(&args.input)?;
    let keys = load_keys(&args.raw_key, &args.key_file)?;
    let plain = decrypt(&cipher, &keys);
    save_rgb(&args.output, &plain, args.format)?;
    println!(
        "decrypted {} -> {}",
        args.input.display(),
        args.output.display()
    );
    Ok(())
}

fn cmd_lyapunov(args: &LyapunovArgs) -> Result<(), CliError> {
    // defaults: the explicit three-positive-exponents parameter set
    let params = args.params.params((109.1686, 3.9570, 14.4175))?;
    let seed = args.params.seed([0.31, 0.37, 0.41]);
    let source = match args.jacobian {
        JacobianArg::Analytic => JacobianSource::Analytic,
        JacobianArg::Fd => JacobianSource::FiniteDifference { step: args.fd_step },
    };
    let spectrum = lyapunov_qr(&seed, &params, args.transient, args.steps, source)?;
    let report = SpectrumReport::new(&params, &seed, &spectrum);
    let json = report
        .to_json()
        .map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))?;
    write_output(args.report.as_deref(), json.as_bytes())?;
    if let Some(path) = &args.report {
        println!(
            "lambda = [{:.6}, {:.6}, {:.6}], guard hits {}, report {}",
            spectrum.lambdas[0],
            spectrum.lambdas[1],
            spectrum.lambdas[2],
            spectrum.guard_hits,
            path.display()
        );
    } else {
        println!();
    }
    Ok(())
}

fn cmd_bifurcation(args: &BifurcationArgs) -> Result<(), CliError> {
    let base = args.params.params((10.0, 4.0, 5.0))?;
    let seed = args.params.seed([0.3, 0.3, 0.3]);
    let grid = linspace(args.grid.0, args.grid.1, args.grid.2);
    let scan = bifurcation_scan(args.sweep.into(), &grid, &base, &seed, args.steps, args.keep)?;
    let mut csv = Vec::new();
    scan.write_csv(&mut csv)
        .map_err(|e| CliError::Io(format!("cannot serialize scan: {e}")))?;
    write_output(args.report.as_deref(), &csv)?;
    if let Some(path) = &args.report {
        println!(
            "bifurcation sweep of {} over {} points, {} rows -> {}",
            scan.swept.name(),
            grid.len(),
            grid.len() * 3 * args.keep,
            path.display()
        );
    }
    Ok(())
}

fn cmd_sensitivity(args: &SensitivityArgs) -> Result<(), CliError> {
    let params = args.params.params((10.0, 4.0, 5.0))?;
    let seed = args.params.seed([0.3, 0.3, 0.3]);
    let trace = sensitivity_pair(&seed, args.delta, &params, args.steps)?;
    let mut csv = Vec::new();
    trace
        .write_csv(&mut csv)
        .map_err(|e| CliError::Io(format!("cannot serialize trace: {e}")))?;
    write_output(args.report.as_deref(), &csv)?;
    if let Some(path) = &args.report {
        println!(
            "sensitivity delta {:e}: max coordinate difference {:.6} over {} steps -> {}",
            trace.delta,
            trace.max_diff(),
            args.steps,
            path.display()
        );
    }
    Ok(())
}

fn cmd_phase(args: &PhaseArgs) -> Result<(), CliError> {
    // defaults: a densely ergodic parameter set for scatter plots
    let params = args.params.params((5.2, 3.7, 8.3))?;
    let seed = args.params.seed([0.3, 0.3, 0.3]);
    let orbit = if args.transient == DEFAULT_TRANSIENT {
        phase_samples(&seed, &params, args.steps)?
    } else {
        ils_core::generate_orbit(&seed, &params, args.transient, args.steps)?
    };
    let mut csv = Vec::new();
    dynamics::write_orbit_csv(&orbit, &mut csv)
        .map_err(|e| CliError::Io(format!("cannot serialize orbit: {e}")))?;
    write_output(args.report.as_deref(), &csv)?;
    if let Some(path) = &args.report {
        println!("{} phase samples -> {}", orbit.len(), path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct KeySpaceReport {
    nominal_bits: u32,
    derived_bits: u32,
}

#[derive(Serialize)]
struct EvaluateReport {
    #[serde(flatten)]
    metrics: MetricsReport,
    key_space: KeySpaceReport,
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let plain = load_rgb(&args.input)?;
    let (row, col) = args.pixel;
    if row >= plain.height() || col >= plain.width() {
        return Err(CliError::Validation(format!(
            "pixel ({row}, {col}) out of bounds for {}x{}",
            plain.height(),
            plain.width()
        )));
    }
    let original = plain.pixel(row, col);
    let new_value = args.value.unwrap_or([
        original[0] ^ 1,
        original[1] ^ 1,
        original[2] ^ 1,
    ]);
    let differential = metrics::differential_test(&plain, row, col, new_value)?;
    let cipher = encrypt(&plain, &KeyMaterial::derive(&plain));
    let metrics_report =
        MetricsReport::from_cipher(&cipher, differential, args.samples, args.corr_seed)?;
    if let Some(path) = &args.histogram {
        let mut csv = Vec::new();
        metrics_report
            .write_histogram_csv(&mut csv)
            .map_err(|e| CliError::Io(format!("cannot serialize histogram: {e}")))?;
        fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    let report = EvaluateReport {
        metrics: metrics_report,
        key_space: KeySpaceReport {
            nominal_bits: metrics::KEY_SPACE_NOMINAL_BITS,
            derived_bits: metrics::KEY_SPACE_DERIVED_BITS,
        },
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))?;
    write_output(args.report.as_deref(), json.as_bytes())?;
    if args.report.is_none() {
        println!();
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Encrypt(args) => cmd_encrypt(args),
        Command::Decrypt(args) => cmd_decrypt(args),
        Command::Analyze(AnalyzeCommand::Lyapunov(args)) => cmd_lyapunov(args),
        Command::Analyze(AnalyzeCommand::Bifurcation(args)) => cmd_bifurcation(args),
        Command::Analyze(AnalyzeCommand::Sensitivity(args)) => cmd_sensitivity(args),
        Command::Analyze(AnalyzeCommand::Phase(args)) => cmd_phase(args),
        Command::Evaluate(args) => cmd_evaluate(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
