//! qfid command line: parse matrix and channel files, dispatch to the
//! library, print one JSON report per run on stdout.
//!
//! Report keys are emitted in sorted order and doubles use the shortest
//! round-trip encoding, so a report parsed and re-serialized by any JSON
//! tool that sorts keys reproduces the original bytes.

use clap::{ArgGroup, Parser, Subcommand};
use qfid::{
    avg_kraus, avg_subspace, avg_unitary, composite_bruteforce_check, composite_fidelity,
    conditional_fidelity, mc_channel_fidelity, mc_quadratic_form_average, optimize,
    sample_haar_unitary, Complex64, ComplexMatrix, Error, ErrorGrid, KrausChannel, McEstimate,
    OptOptions, Pulse, PulseSequence, SplitMix64, SubspaceSelector,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "qfid", version, about = "Average fidelities of quantum operations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Average fidelity of one unitary against another
    Unitary {
        /// Ideal unitary (matrix file)
        target: PathBuf,
        /// Implemented unitary (matrix file)
        actual: PathBuf,
        /// Comma-separated basis indices of the relevant subspace
        #[arg(long, value_delimiter = ',', value_name = "I,J,...")]
        subspace: Option<Vec<usize>>,
        /// Also report the worst-case fidelity over input states
        #[arg(long = "worst-case")]
        worst_case: bool,
        /// Also report the acceptance probability and conditional fidelity
        #[arg(long, requires = "subspace")]
        conditional: bool,
        /// Cross-check the mean with N Monte Carlo samples
        #[arg(long, value_name = "N")]
        mc: Option<u64>,
        /// Seed for every randomized step
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Average fidelity of a Kraus channel against a unitary target
    Kraus {
        /// Ideal unitary (matrix file)
        target: PathBuf,
        /// Channel file with dim and Kraus operators
        channel: PathBuf,
        /// Cross-check the mean with N Monte Carlo samples
        #[arg(long, value_name = "N")]
        mc: Option<u64>,
        /// Seed for every randomized step
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Remix the Kraus operators with a seeded random unitary and
        /// report the fidelity difference
        #[arg(long = "remix-check")]
        remix_check: bool,
    },
    /// Fidelity of K identical copies of a register from the scaling law
    #[command(group(ArgGroup::new("source").required(true).args(["f1", "channel"])))]
    Scale {
        /// Single-register dimension (goes with --f1)
        #[arg(long, requires = "f1", conflicts_with = "channel")]
        n: Option<usize>,
        /// Number of register copies
        #[arg(long = "K", value_name = "K")]
        copies: u32,
        /// Single-register average fidelity
        #[arg(long, requires = "n")]
        f1: Option<f64>,
        /// Derive the single-register fidelity from a channel file
        #[arg(long)]
        channel: Option<PathBuf>,
        /// Also evaluate the K-fold tensor channel brute force
        #[arg(long, requires = "channel")]
        check: bool,
        /// Print a CSV table K,fidelity,asymptotic for K = 1..K instead of a report
        #[arg(long)]
        sweep: bool,
    },
    /// Search for a pulse sequence robust to amplitude and detuning errors
    Optimize {
        /// Target unitary on a qubit (matrix file)
        target: PathBuf,
        /// Number of pulses in the sequence
        #[arg(long)]
        pulses: usize,
        /// Error grid "s1,s2,...:d1,d2,..." (amplitude scales : detunings)
        #[arg(long, default_value = "1:0")]
        grid: String,
        /// Seed for the optimizer restart
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Invalid(String),
    Degenerate(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateAcceptance { .. } => Failure::Degenerate(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    dim: usize,
    kraus: Vec<MatrixFile>,
}

#[derive(Serialize)]
struct ReportDocument {
    command: Vec<String>,
    inputs: BTreeMap<String, String>,
    report: ReportBody,
}

#[derive(Serialize, Default)]
struct ReportBody {
    #[serde(skip_serializing_if = "Option::is_none")]
    acceptance_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditional: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_single: Option<f64>,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    law: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc: Option<McBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pulses: Option<Vec<PulseOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    remix_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subspace_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_case: Option<f64>,
}

#[derive(Serialize)]
struct McBlock {
    mean: f64,
    samples: u64,
    seed: u64,
    stderr: f64,
}

impl From<McEstimate> for McBlock {
    fn from(est: McEstimate) -> Self {
        Self {
            mean: est.mean,
            samples: est.samples,
            seed: est.seed,
            stderr: est.stderr,
        }
    }
}

#[derive(Serialize)]
struct PulseOut {
    phi: f64,
    theta: f64,
}

fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn read_file(path: &Path) -> Result<(Vec<u8>, String), Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let digest = digest_hex(&bytes);
    Ok((bytes, digest))
}

fn matrix_from_file(path: &Path, file: MatrixFile) -> Result<ComplexMatrix, Failure> {
    let entries: Vec<Complex64> = file
        .data
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    ComplexMatrix::new(file.rows, file.cols, entries)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<(ComplexMatrix, String), Failure> {
    let (bytes, digest) = read_file(path)?;
    let file: MatrixFile = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::Invalid(format!("{}: not a matrix file: {e}", path.display())))?;
    Ok((matrix_from_file(path, file)?, digest))
}

fn load_channel(path: &Path) -> Result<(KrausChannel, String), Failure> {
    let (bytes, digest) = read_file(path)?;
    let file: ChannelFile = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::Invalid(format!("{}: not a channel file: {e}", path.display())))?;
    let mut kraus = Vec::with_capacity(file.kraus.len());
    for (k, mf) in file.kraus.into_iter().enumerate() {
        if mf.rows != file.dim || mf.cols != file.dim {
            return Err(Failure::Invalid(format!(
                "{}: Kraus operator {k} is {}x{}, expected {}x{}",
                path.display(),
                mf.rows,
                mf.cols,
                file.dim,
                file.dim
            )));
        }
        kraus.push(matrix_from_file(path, mf)?);
    }
    let channel =
        KrausChannel::new(kraus).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    Ok((channel, digest))
}

fn parse_grid(spec: &str) -> Result<ErrorGrid, Failure> {
    let (scales, detunings) = spec.split_once(':').ok_or_else(|| {
        Failure::Invalid(format!(
            "grid spec {spec:?} must look like \"s1,s2,...:d1,d2,...\""
        ))
    })?;
    let parse_list = |part: &str, what: &str| -> Result<Vec<f64>, Failure> {
        part.split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| {
                    Failure::Invalid(format!("grid spec: {what} entry {tok:?} is not a number"))
                })
            })
            .collect()
    };
    let grid = ErrorGrid::new(
        parse_list(scales, "amplitude scale")?,
        parse_list(detunings, "detuning")?,
    )?;
    Ok(grid)
}

fn emit(inputs: BTreeMap<String, String>, report: ReportBody) {
    let doc = ReportDocument {
        command: std::env::args().skip(1).collect(),
        inputs,
        report,
    };
    println!("{}", serde_json::to_string(&doc).expect("report serializes"));
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Unitary {
            target,
            actual,
            subspace,
            worst_case,
            conditional,
            mc,
            seed,
        } => {
            let (target_m, target_digest) = load_matrix(&target)?;
            let (actual_m, actual_digest) = load_matrix(&actual)?;
            let mut inputs = BTreeMap::new();
            inputs.insert("actual".into(), actual_digest);
            inputs.insert("target".into(), target_digest);
            let full = avg_unitary(&target_m, &actual_m)?;
            let mut body = ReportBody {
                kind: "unitary".into(),
                mean_fidelity: Some(full.mean_fidelity),
                ..ReportBody::default()
            };
            if worst_case {
                body.worst_case = full.worst_case;
            }
            if let Some(indices) = subspace {
                let sel = SubspaceSelector::new(target_m.rows(), indices)?;
                if conditional {
                    let report = conditional_fidelity(&target_m, &actual_m, &sel)?;
                    body.subspace_fidelity = Some(report.mean_fidelity);
                    body.acceptance_q = report.acceptance_q;
                    body.conditional = report.conditional;
                } else {
                    body.subspace_fidelity =
                        Some(avg_subspace(&target_m, &actual_m, &sel)?.mean_fidelity);
                }
            }
            if let Some(samples) = mc {
                let m = target_m.adjoint().multiply(&actual_m)?;
                body.mc = Some(mc_quadratic_form_average(&m, samples, seed)?.into());
            }
            emit(inputs, body);
        }
        Command::Kraus {
            target,
            channel,
            mc,
            seed,
            remix_check,
        } => {
            let (target_m, target_digest) = load_matrix(&target)?;
            let (channel_v, channel_digest) = load_channel(&channel)?;
            let mut inputs = BTreeMap::new();
            inputs.insert("channel".into(), channel_digest);
            inputs.insert("target".into(), target_digest);
            let report = avg_kraus(&target_m, &channel_v)?;
            let mut body = ReportBody {
                kind: "kraus".into(),
                mean_fidelity: Some(report.mean_fidelity),
                ..ReportBody::default()
            };
            if let Some(samples) = mc {
                body.mc = Some(mc_channel_fidelity(&target_m, &channel_v, samples, seed)?.into());
            }
            if remix_check {
                let mut rng = SplitMix64::new(seed);
                let v = sample_haar_unitary(channel_v.operators().len(), &mut rng);
                let remixed = avg_kraus(&target_m, &channel_v.remix(&v)?)?;
                body.remix_difference = Some((remixed.mean_fidelity - report.mean_fidelity).abs());
            }
            emit(inputs, body);
        }
        Command::Scale {
            n,
            copies,
            f1,
            channel,
            check,
            sweep,
        } => {
            let mut inputs = BTreeMap::new();
            let mut from_channel = None;
            let (dim, f_single) = match (&channel, f1) {
                (Some(path), None) => {
                    let (channel_v, digest) = load_channel(path)?;
                    inputs.insert("channel".into(), digest);
                    let identity = ComplexMatrix::identity(channel_v.dim());
                    let f = avg_kraus(&identity, &channel_v)?.mean_fidelity;
                    let dim = channel_v.dim();
                    from_channel = Some(channel_v);
                    (dim, f)
                }
                (None, Some(f)) => (n.expect("clap enforces --n with --f1"), f),
                _ => unreachable!("clap enforces exactly one fidelity source"),
            };
            if copies == 0 {
                return Err(Error::ZeroPower.into());
            }
            if sweep {
                print!("K,fidelity,asymptotic\n");
                let exponent = (dim as f64 + 1.0) / dim as f64;
                for k in 1..=copies {
                    let fk = composite_fidelity(dim, k, f_single)?;
                    let asymptotic = f_single.powf(k as f64 * exponent);
                    print!("{k},{fk},{asymptotic}\n");
                }
                return Ok(());
            }
            let mut body = ReportBody {
                kind: "composite".into(),
                mean_fidelity: Some(composite_fidelity(dim, copies, f_single)?),
                ..ReportBody::default()
            };
            if let Some(channel_v) = &from_channel {
                body.f_single = Some(f_single);
                if check {
                    let (brute, law) = composite_bruteforce_check(channel_v, copies)?;
                    body.brute_force = Some(brute);
                    body.law = Some(law);
                }
            }
            emit(inputs, body);
        }
        Command::Optimize {
            target,
            pulses,
            grid,
            seed,
        } => {
            let (target_m, target_digest) = load_matrix(&target)?;
            let mut inputs = BTreeMap::new();
            inputs.insert("target".into(), target_digest);
            let grid_v = parse_grid(&grid)?;
            let seq0 = PulseSequence::new(vec![
                Pulse {
                    theta: FRAC_PI_2,
                    phi: 0.0
                };
                pulses
            ])?;
            let options = OptOptions {
                seed,
                ..OptOptions::default()
            };
            let result = optimize(&seq0, &target_m, &grid_v, options)?;
            let body = ReportBody {
                kind: "optimize".into(),
                best_objective: Some(result.best_objective),
                converged: Some(result.converged),
                evaluations: Some(result.evaluations),
                pulses: Some(
                    result
                        .best
                        .pulses()
                        .iter()
                        .map(|p| PulseOut {
                            phi: p.phi,
                            theta: p.theta,
                        })
                        .collect(),
                ),
                ..ReportBody::default()
            };
            emit(inputs, body);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = run(cli.command);
    eprintln!(
        "wall time: {:.3} ms",
        started.elapsed().as_secs_f64() * 1e3
    );
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Degenerate(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
