//! Command-line front end: argument definitions and subcommand drivers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::basis::{self, BasisKind};
use crate::codec::{self, CodecConfig, CompressedBlob, Encoder, RateDistortionReport, Weighting};
use crate::error::{Error, Result};
use crate::grid;
use crate::lifting::TransformPlan;
use crate::selftest;
use crate::tensor::{Ordering, TensorArray};
use crate::update::ProjectorKind;

#[derive(Debug, Parser)]
#[command(name = "polylift", version, about = "Lifting wavelet transforms and threshold compression of float64 arrays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transform and threshold a raw little-endian float64 array.
    Compress(CompressArgs),
    /// Reconstruct a raw float64 array from a blob.
    Decompress(DecompressArgs),
    /// Sorted coefficient magnitudes and per-level energy.
    Analyze(AnalyzeArgs),
    /// Sample a primal or dual basis function by the cascade algorithm.
    Basis(BasisArgs),
    /// Run the built-in acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Raw,
    L2,
    S,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Polynomial order q.
    #[arg(long, default_value_t = 1)]
    pub order: usize,
    /// Projector: interp, cg or dg.
    #[arg(long, default_value = "cg")]
    pub kind: ProjectorKind,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Raw little-endian float64 file.
    #[arg(long)]
    pub input: PathBuf,
    /// Array shape, e.g. 257x257 or 257,257 (row-major, last axis fastest).
    #[arg(long)]
    pub shape: String,
    #[command(flatten)]
    pub transform: TransformArgs,
    /// Tensor coefficient ordering: mallat or separable.
    #[arg(long, default_value = "mallat")]
    pub ordering: Ordering,
    /// Magnitude weighting applied before thresholding.
    #[arg(long, value_enum, default_value_t = WeightingArg::L2)]
    pub weighting: WeightingArg,
    /// Smoothness s of the s-weighting.
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Absolute threshold on weighted magnitudes.
    #[arg(long, conflicts_with = "target_l2")]
    pub threshold: Option<f64>,
    /// Target L2 error; the threshold is found by bisection.
    #[arg(long)]
    pub target_l2: Option<f64>,
    /// Output blob.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON report path (stdout when absent).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecompressArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Raw little-endian float64 output.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Decay CSV path (stdout when absent).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[command(flatten)]
    pub transform: TransformArgs,
    /// Level j of the basis function.
    #[arg(long)]
    pub level: usize,
    /// Sampling level J > j.
    #[arg(long)]
    pub depth: usize,
    /// phi, psi, dual-phi or dual-psi.
    #[arg(long)]
    pub which: BasisKind,
    /// Index k within the level.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// CSV path (stdout when absent).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Run only the check with this number.
    #[arg(long)]
    pub only: Option<usize>,
}

/// JSON report of `compress`.
#[derive(Debug, Serialize)]
pub struct CompressReport {
    #[serde(flatten)]
    pub report: RateDistortionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSummary>,
}

#[derive(Debug, Serialize)]
pub struct TargetSummary {
    pub target_l2: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Smallest tried threshold whose error exceeds the target, when the
    /// search did not converge.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<RateDistortionReport>,
}

/// Parses `257x257`, `257,257` or `257`.
pub fn parse_shape(s: &str) -> Result<Vec<usize>> {
    let dims = s
        .split(['x', 'X', ','])
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad shape '{s}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if dims.is_empty() || dims.len() > crate::tensor::MAX_DIMS || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("shape '{s}' must have 1 to 3 positive sizes")));
    }
    Ok(dims)
}

pub fn read_raw(path: &Path, shape: Vec<usize>) -> Result<TensorArray> {
    let bytes = fs::read(path)?;
    let n = shape
        .iter()
        .try_fold(8usize, |acc, &s| acc.checked_mul(s))
        .ok_or_else(|| Error::InvalidArgument(format!("shape {shape:?} is too large")))?;
    if bytes.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} holds {} bytes, shape {:?} needs {}",
            path.display(),
            bytes.len(),
            shape,
            n
        )));
    }
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    TensorArray::new(shape, data)
}

pub fn write_raw(path: &Path, values: &[f64]) -> Result<()> {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(path, bytes)?;
    Ok(())
}

/// Reads the input after checking that every axis size is admissible.
fn load(args: &InputArgs) -> Result<TensorArray> {
    let shape = parse_shape(&args.shape)?;
    for &n in &shape {
        if grid::levels_for_length(n, args.transform.order).is_none() {
            return Err(grid::validate_input_length(n, args.transform.order, 0).unwrap_err());
        }
    }
    read_raw(&args.input, shape)
}

fn config(args: &InputArgs) -> CodecConfig {
    let weighting = match args.weighting {
        WeightingArg::Raw => Weighting::Raw,
        WeightingArg::L2 => Weighting::L2,
        WeightingArg::S => Weighting::Smooth(args.s),
    };
    CodecConfig::new(args.transform.kind, args.transform.order)
        .with_ordering(args.ordering)
        .with_weighting(weighting)
}

fn warn_smoothness(cfg: &CodecConfig, err: &mut dyn Write) -> Result<()> {
    if cfg.smoothness_out_of_range() {
        writeln!(
            err,
            "warning: s = {} is not below q + 1/2 = {}; weighted thresholding loses its norm equivalence",
            cfg.weighting.smoothness(),
            cfg.order as f64 + 0.5
        )?;
    }
    Ok(())
}

/// Writes to `path`, or to `out` when no path is given.
fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Compress(a) => compress(a, out, err),
        Command::Decompress(a) => decompress(a),
        Command::Analyze(a) => analyze(a, out, err),
        Command::Basis(a) => basis_cmd(a, out),
        Command::Selftest(a) => selftest_cmd(a, out),
    }
}

fn compress(a: CompressArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let data = load(&a.input)?;
    let cfg = config(&a.input);
    warn_smoothness(&cfg, err)?;
    let encoder = Encoder::new(&data, cfg)?;
    let (blob, report) = match a.target_l2 {
        Some(target) => {
            let t = encoder.target_l2(target)?;
            if !t.converged {
                writeln!(err, "warning: target L2 error {target} not reached within tolerance; see report")?;
            }
            let summary = TargetSummary { target_l2: target, converged: t.converged, iterations: t.iterations, upper: t.upper };
            (t.blob, CompressReport { report: t.report, target: Some(summary) })
        }
        None => {
            let (blob, report) = encoder.encode(a.threshold.unwrap_or(0.0))?;
            (blob, CompressReport { report, target: None })
        }
    };
    fs::write(&a.output, blob.to_bytes())?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    emit(a.report.as_deref(), &json, out)
}

fn decompress(a: DecompressArgs) -> Result<()> {
    let blob = CompressedBlob::from_bytes(&fs::read(&a.input)?)?;
    let data = codec::decompress(&blob)?;
    write_raw(&a.output, data.data())
}

fn analyze(a: AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let data = load(&a.input)?;
    let cfg = config(&a.input);
    warn_smoothness(&cfg, err)?;
    let encoder = Encoder::new(&data, cfg)?;
    let mut csv = String::from("rank,magnitude,level\n");
    for e in encoder.decay() {
        csv.push_str(&format!("{},{:e},{}\n", e.rank, e.magnitude, e.level));
    }
    let energy = encoder.level_energy();
    let total: f64 = energy.iter().sum();
    let mut table = String::from("level  count  energy  fraction\n");
    for (l, e) in energy.iter().enumerate() {
        let count = encoder.labels().iter().filter(|&&x| x == l).count();
        let frac = if total > 0.0 { e / total } else { 0.0 };
        table.push_str(&format!("{l:>5}  {count:>5}  {e:.6e}  {frac:.6}\n"));
    }
    match &a.csv {
        Some(p) => {
            fs::write(p, csv)?;
            out.write_all(table.as_bytes())?;
        }
        None => {
            out.write_all(csv.as_bytes())?;
            err.write_all(table.as_bytes())?;
        }
    }
    Ok(())
}

fn basis_cmd(a: BasisArgs, out: &mut dyn Write) -> Result<()> {
    let plan = TransformPlan::new(a.transform.kind, a.transform.order, a.depth)?;
    let sample = basis::sample(&plan, a.which, a.level, a.index, a.depth)?;
    let mut csv = String::from("x,value\n");
    for (x, v) in sample.points(a.transform.order) {
        csv.push_str(&format!("{x},{v}\n"));
    }
    emit(a.csv.as_deref(), &csv, out)
}

fn selftest_cmd(a: SelftestArgs, out: &mut dyn Write) -> Result<()> {
    let results = match a.only {
        Some(id) => vec![selftest::run(id).ok_or_else(|| Error::InvalidArgument(format!("no check numbered {id}")))?],
        None => selftest::run_all(),
    };
    for r in &results {
        writeln!(out, "{}", r.line())?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} of {} checks passed", results.len() - failed, results.len())?;
    if failed > 0 {
        return Err(Error::CheckFailed(format!("{failed} check(s) failed")));
    }
    Ok(())
}

/// Exit status for an error: 1 for usage problems, 2 for data problems.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => 1,
        _ => 2,
    }
}
