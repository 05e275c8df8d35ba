//! The `cohwit` command line and its JSON/CSV documents.
//!
//! ```text
//! cohwit gen --kind {lemma2|qubit|eta|family} --d D [--m R --M R] [--K R --a R --b R --c R]
//!            [--eta CSV] [--s CSV] [--out FILE]
//! cohwit detect --witness FILE --state FILE [--eps R]
//! cohwit oracle --state FILE
//! cohwit verify --d D --samples N --seed U64 [--K R] [--threshold R] [--family FILE]
//! cohwit bloch --K R --a R --b R --c R --grid N [--out FILE]
//! ```
//!
//! Exit codes: 0 on success or PASS, 2 on malformed input, 3 on a failed
//! verification. Structured output goes to stdout, diagnostics to stderr.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{hermiticity_deviation, ComplexMatrix, Tolerance, C64};
use crate::states::{l1_coherence, qubit_state, DensityMatrix, Seed};
use crate::verify::{bloch_ball_grid, verify_coverage, COHERENCE_THRESHOLD};
use crate::witness::{
    evaluate, finite_family, lemma2_witness, qubit_witness, w_eta, Origin, Verdict, Witness,
    WitnessFamily,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FAIL: i32 = 3;

/// Square matrix as `dim` plus row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.dim(),
            entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, DocumentError> {
        if self.entries.len() != self.dim * self.dim {
            return Err(DocumentError::field(
                "entries",
                format!(
                    "expected {} complex pairs for dim {}, found {}",
                    self.dim * self.dim,
                    self.dim,
                    self.entries.len()
                ),
            ));
        }
        let data = self
            .entries
            .iter()
            .map(|[re, im]| C64::new(*re, *im))
            .collect();
        ComplexMatrix::from_row_major(self.dim, data).map_err(|e| match e {
            Error::InvalidDimension(_) => DocumentError::field("dim", e.to_string()),
            other => DocumentError::field("entries", other.to_string()),
        })
    }
}

/// A witness matrix with its interval, tolerance and constructor tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    pub interval: [f64; 2],
    pub detect_eps: f64,
    pub constructor: Origin,
}

impl WitnessDocument {
    pub fn from_witness(w: &Witness) -> Self {
        let m = MatrixDocument::from_matrix(w.matrix());
        let (lo, hi) = w.interval();
        Self {
            dim: m.dim,
            entries: m.entries,
            interval: [lo, hi],
            detect_eps: w.detect_eps(),
            constructor: w.origin().clone(),
        }
    }

    /// Rebuilds the witness, rechecking Hermiticity and that the stored
    /// interval matches the diagonal.
    pub fn to_witness(&self) -> Result<Witness, DocumentError> {
        let matrix = MatrixDocument {
            dim: self.dim,
            entries: self.entries.clone(),
        }
        .to_matrix()?;
        let deviation = hermiticity_deviation(&matrix);
        if deviation > Tolerance::default().hermiticity {
            return Err(DocumentError::field(
                "entries",
                format!("matrix is not Hermitian (max deviation {deviation:e})"),
            ));
        }
        if !(self.detect_eps.is_finite() && self.detect_eps >= 0.0) {
            return Err(DocumentError::field(
                "detect_eps",
                format!("must be finite and nonnegative, got {}", self.detect_eps),
            ));
        }
        let w = Witness::build(matrix, self.detect_eps, self.constructor.clone())
            .map_err(|e| DocumentError::field("entries", e.to_string()))?;
        let (lo, hi) = w.interval();
        let [slo, shi] = self.interval;
        if (slo - lo).abs() > 1e-12 || (shi - hi).abs() > 1e-12 {
            return Err(DocumentError::field(
                "interval",
                format!("stored [{slo}, {shi}] disagrees with diagonal range [{lo}, {hi}]"),
            ));
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub label: String,
    pub members: Vec<WitnessDocument>,
}

impl FamilyDocument {
    pub fn from_family(f: &WitnessFamily) -> Self {
        Self {
            label: f.label().to_string(),
            members: f
                .members()
                .iter()
                .map(WitnessDocument::from_witness)
                .collect(),
        }
    }

    pub fn to_family(&self) -> Result<WitnessFamily, DocumentError> {
        let members = self
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                m.to_witness().map_err(|e| DocumentError {
                    message: format!("members[{i}].{}", e.message),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        WitnessFamily::new(self.label.clone(), members)
            .map_err(|e| DocumentError::field("members", e.to_string()))
    }
}

/// Input document problem, reported with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentError {
    pub message: String,
}

impl DocumentError {
    fn field(name: &str, msg: impl std::fmt::Display) -> Self {
        Self {
            message: format!("{name}: {msg}"),
        }
    }
}

impl std::fmt::Display for DocumentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for DocumentError {}

pub fn read_witness(path: &Path) -> Result<Witness, DocumentError> {
    let doc: WitnessDocument = read_json(path)?;
    doc.to_witness()
}

pub fn read_family(path: &Path) -> Result<WitnessFamily, DocumentError> {
    let doc: FamilyDocument = read_json(path)?;
    doc.to_family()
}

pub fn read_state(path: &Path) -> Result<DensityMatrix, DocumentError> {
    let doc: MatrixDocument = read_json(path)?;
    DensityMatrix::new(doc.to_matrix()?).map_err(|e| DocumentError::field("entries", e.to_string()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|e| DocumentError {
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| DocumentError {
        message: format!("{}: {e}", path.display()),
    })
}

/// One lattice point of the Bloch-ball cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub value: f64,
    pub verdict: Verdict,
}

/// `W^{[K,a,b,c]}` evaluated over [`bloch_ball_grid`].
pub fn bloch_cloud(k: f64, a: f64, b: f64, c: f64, grid_n: usize) -> crate::Result<Vec<CloudRow>> {
    let w = qubit_witness(k, a, b, c)?;
    bloch_ball_grid(grid_n)
        .into_iter()
        .map(|[x, y, z]| {
            let rep = evaluate(&w, &qubit_state(x, y, z)?)?;
            Ok(CloudRow {
                x,
                y,
                z,
                value: rep.value,
                verdict: rep.verdict,
            })
        })
        .collect()
}

/// Header `x,y,z,value,verdict`, comma separated, LF endings, shortest
/// round-trip decimals.
pub fn render_csv(rows: &[CloudRow]) -> String {
    let mut out = String::from("x,y,z,value,verdict\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.x,
            r.y,
            r.z,
            r.value,
            r.verdict.as_str()
        );
    }
    out
}

#[derive(Debug, Parser)]
#[command(name = "cohwit", version, about = "Interval coherence witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct a witness or witness family document.
    Gen(GenArgs),
    /// Evaluate a witness on a state.
    Detect(DetectArgs),
    /// Print the l1-norm coherence of a state.
    Oracle(OracleArgs),
    /// Coverage sweep of a witness family over a seeded ensemble.
    Verify(VerifyArgs),
    /// CSV point cloud of a qubit witness over the Bloch ball.
    Bloch(BlochArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Lemma2,
    Qubit,
    Eta,
    Family,
}

#[derive(Debug, clap::Args)]
#[command(allow_negative_numbers = true)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long = "m")]
    lo: Option<f64>,
    #[arg(long = "M")]
    hi: Option<f64>,
    #[arg(long = "K", default_value_t = 0.0)]
    k: f64,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
#[command(allow_negative_numbers = true)]
struct DetectArgs {
    #[arg(long)]
    witness: PathBuf,
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Debug, clap::Args)]
struct OracleArgs {
    #[arg(long)]
    state: PathBuf,
}

#[derive(Debug, clap::Args)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long = "K", default_value_t = 0.0)]
    k: f64,
    #[arg(long, default_value_t = COHERENCE_THRESHOLD)]
    threshold: f64,
    /// Family document to check instead of the d(d-1) single-generator family.
    #[arg(long)]
    family: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
#[command(allow_negative_numbers = true)]
struct BlochArgs {
    #[arg(long = "K")]
    k: f64,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    c: f64,
    #[arg(long)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INPUT,
            message: msg.to_string(),
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::input(e)
    }
}

/// Parses `argv` (program name first) and runs one subcommand.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args, stdout),
        Command::Detect(args) => cmd_detect(args, stdout),
        Command::Oracle(args) => cmd_oracle(args, stdout),
        Command::Verify(args) => cmd_verify(args, stdout),
        Command::Bloch(args) => cmd_bloch(args, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn parse_csv(flag: &str, text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Failure::input(format!("--{flag}: cannot parse {t:?}: {e}")))
        })
        .collect()
}

fn require<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::input(format!("--kind {kind} requires --{flag}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}

fn cmd_gen(args: GenArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let text = match args.kind {
        Kind::Lemma2 => {
            let d = require(args.d, "d", "lemma2")?;
            let lo = require(args.lo, "m", "lemma2")?;
            let hi = require(args.hi, "M", "lemma2")?;
            to_json(&WitnessDocument::from_witness(&lemma2_witness(d, lo, hi)?))
        }
        Kind::Qubit => {
            if let Some(d) = args.d.filter(|&d| d != 2) {
                return Err(Failure::input(format!(
                    "--kind qubit requires --d 2, got {d}"
                )));
            }
            let w = qubit_witness(args.k, args.a, args.b, args.c)?;
            to_json(&WitnessDocument::from_witness(&w))
        }
        Kind::Eta => {
            let d = require(args.d, "d", "eta")?;
            let eta = parse_csv("eta", &require(args.eta, "eta", "eta")?)?;
            to_json(&WitnessDocument::from_witness(&w_eta(d, args.k, &eta)?))
        }
        Kind::Family => {
            let d = require(args.d, "d", "family")?;
            let s = args.s.as_deref().map(|t| parse_csv("s", t)).transpose()?;
            let fam = finite_family(d, args.k, s.as_deref())?;
            to_json(&FamilyDocument::from_family(&fam))
        }
    };
    emit(&text, args.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_detect(args: DetectArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let mut w = read_witness(&args.witness)?;
    if let Some(eps) = args.eps {
        w = w
            .with_detect_eps(eps)
            .map_err(|e| Failure::input(format!("--eps: {e}")))?;
    }
    let rho = read_state(&args.state)?;
    let report = evaluate(&w, &rho)?;
    emit(&to_json(&report), None, stdout)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OracleReport {
    dim: usize,
    l1_coherence: f64,
}

fn cmd_oracle(args: OracleArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let rho = read_state(&args.state)?;
    let report = OracleReport {
        dim: rho.dim(),
        l1_coherence: l1_coherence(&rho),
    };
    emit(&to_json(&report), None, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if !(args.threshold.is_finite() && args.threshold >= 0.0) {
        return Err(Failure::input(format!(
            "--threshold: must be finite and nonnegative, got {}",
            args.threshold
        )));
    }
    let family = match &args.family {
        Some(path) => read_family(path)?,
        None => finite_family(args.d, args.k, None)?,
    };
    let report = verify_coverage(
        &family,
        args.d,
        args.samples,
        Seed(args.seed),
        args.threshold,
    )?;
    emit(&to_json(&report), None, stdout)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_bloch(args: BlochArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if args.grid < 2 {
        return Err(Failure::input(format!(
            "--grid: must be at least 2, got {}",
            args.grid
        )));
    }
    let rows = bloch_cloud(args.k, args.a, args.b, args.c, args.grid)?;
    emit(&render_csv(&rows), args.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}
