//! `qcompat` command-line front end.
//!
//! Exit codes: 0 success / compatible, 2 incompatible, 1 any other error.

pub mod statefile;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::compatibility::{check_first_bfm, common_pure_decomposition, PureDecomposition};
use crate::error::Error;
use crate::linalg::{eigh, ComplexMatrix, ToleranceConfig, C64};
use crate::operators::{support, DensityOperator};
use crate::pooling::{improve, luders_with_probability, pool, EQUAL_TRUST_WEIGHT};
use statefile::{read_projector, read_state, write_matrix, FileError, StateFile};

/// Environment variable naming a JSON tolerance profile.
pub const TOL_PROFILE_ENV: &str = "QCOMPAT_TOL_PROFILE";

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INCOMPATIBLE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qcompat",
    version,
    about = "Check, improve and pool quantum state assignments"
)]
pub struct Cli {
    #[command(flatten)]
    pub tol: TolArgs,

    /// Emit machine-readable JSON instead of the text report.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// JSON file with any subset of the tolerance fields.
    #[arg(long, global = true, env = TOL_PROFILE_ENV)]
    pub tol_profile: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tol_eig_zero: Option<f64>,
    #[arg(long, global = true)]
    pub tol_idempotency: Option<f64>,
    #[arg(long, global = true)]
    pub tol_hermiticity: Option<f64>,
    #[arg(long, global = true)]
    pub tol_trace_one: Option<f64>,
    #[arg(long, global = true)]
    pub tol_membership: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether two state assignments are compatible.
    Check { a: PathBuf, b: PathBuf },
    /// Lüders-update both assignments onto the meet of their supports.
    Improve {
        a: PathBuf,
        b: PathBuf,
        /// Directory for improved_a.json and improved_b.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Pool two or more assignments. With more than two files the result is
    /// built left to right: pool(pool(f1, f2), f3), ...
    Pool {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = EQUAL_TRUST_WEIGHT)]
        weight: f64,
        /// Output file; the pooled state goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lüders update of a state on a projector.
    Luders {
        file: PathBuf,
        #[arg(long)]
        projector: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pure-state expansions of both assignments sharing a common state.
    Decompose { a: PathBuf, b: PathBuf },
    /// Spectrum, support rank and purity of a state.
    Info { file: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("tolerance profile {path}: {message}")]
    Profile { path: PathBuf, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(Error::Incompatible) => EXIT_INCOMPATIBLE,
            _ => EXIT_ERROR,
        }
    }
}

impl TolArgs {
    /// Defaults, then the profile file, then individual flags.
    pub fn resolve(&self) -> Result<ToleranceConfig, CliError> {
        let mut tol = match &self.tol_profile {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Profile {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                serde_json::from_str(&text).map_err(|e| CliError::Profile {
                    path: path.clone(),
                    message: e.to_string(),
                })?
            }
            None => ToleranceConfig::default(),
        };
        let overrides = [
            (self.tol_eig_zero, &mut tol.eig_zero),
            (self.tol_idempotency, &mut tol.idempotency),
            (self.tol_hermiticity, &mut tol.hermiticity),
            (self.tol_trace_one, &mut tol.trace_one),
            (self.tol_membership, &mut tol.membership),
        ];
        for (flag, field) in overrides {
            if let Some(v) = flag {
                *field = v;
            }
        }
        tol.validate()?;
        Ok(tol)
    }
}

type Entries = Vec<Vec<[f64; 2]>>;

fn entries(m: &ComplexMatrix) -> Entries {
    StateFile::from_matrix(m, None).matrix
}

fn vector_entries(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn fmt_real(x: f64) -> String {
    if x.abs() < 1e-14 {
        return "0".into();
    }
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn fmt_complex(z: C64) -> String {
    if z.im.abs() < 1e-14 {
        fmt_real(z.re)
    } else if z.re.abs() < 1e-14 {
        format!("{}i", fmt_real(z.im))
    } else {
        format!(
            "{}{}{}i",
            fmt_real(z.re),
            if z.im < 0.0 { "-" } else { "+" },
            fmt_real(z.im.abs())
        )
    }
}

fn fmt_vector(v: &[C64]) -> String {
    let parts: Vec<String> = v.iter().map(|&z| fmt_complex(z)).collect();
    format!("[{}]", parts.join(", "))
}

/// `diag(...)` for diagonal matrices, otherwise one bracketed row per line.
fn fmt_matrix(m: &ComplexMatrix, indent: &str) -> String {
    let n = m.rows();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() < 1e-12));
    if diagonal {
        let d: Vec<String> = (0..n).map(|i| fmt_complex(m[(i, i)])).collect();
        return format!("diag({})", d.join(", "));
    }
    let mut out = String::new();
    for i in 0..n {
        let _ = write!(out, "\n{indent}{}", fmt_vector(m.row(i)));
    }
    out
}

fn label_for(path: &Path, label: Option<String>) -> String {
    label.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "state".into())
    })
}

#[derive(Serialize)]
struct CheckOutput {
    compatible: bool,
    first_bfm: bool,
    second_bfm: bool,
    intersection_dim: usize,
    glb: Entries,
    witness: Option<Vec<[f64; 2]>>,
    residuals: std::collections::BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct ImproveOutput {
    prob_a: f64,
    prob_b: f64,
    supports_equal: bool,
    support_gaps: [f64; 3],
    glb_rank: usize,
    glb: Entries,
    improved_a: PathBuf,
    improved_b: PathBuf,
}

#[derive(Serialize)]
struct WrittenState {
    path: PathBuf,
    state: Entries,
    #[serde(skip_serializing_if = "Option::is_none")]
    probability: Option<f64>,
}

#[derive(Serialize)]
struct DecompositionOutput {
    weights: Vec<f64>,
    states: Vec<Vec<[f64; 2]>>,
    common_index: usize,
}

impl From<&PureDecomposition> for DecompositionOutput {
    fn from(d: &PureDecomposition) -> Self {
        Self {
            weights: d.weights.clone(),
            states: d.states.iter().map(|v| vector_entries(v)).collect(),
            common_index: d.common_index,
        }
    }
}

#[derive(Serialize)]
struct DecomposeOutput {
    common_state: Vec<[f64; 2]>,
    a: DecompositionOutput,
    b: DecompositionOutput,
}

#[derive(Serialize)]
struct InfoOutput {
    dim: usize,
    spectrum: Vec<f64>,
    rank: usize,
    purity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serialises");
    writeln!(out, "{text}")?;
    Ok(())
}

fn write_state_output(
    out: &mut dyn Write,
    json: bool,
    dest: Option<&Path>,
    rho: &DensityOperator,
    label: String,
    probability: Option<f64>,
) -> Result<(), CliError> {
    match dest {
        Some(path) => {
            write_matrix(path, rho.matrix(), Some(label))?;
            if json {
                emit_json(
                    out,
                    &WrittenState {
                        path: path.to_path_buf(),
                        state: entries(rho.matrix()),
                        probability,
                    },
                )?;
            } else {
                if let Some(p) = probability {
                    writeln!(out, "probability: {}", fmt_real(p))?;
                }
                writeln!(out, "state: {}", fmt_matrix(rho.matrix(), "  "))?;
                writeln!(out, "written to {}", path.display())?;
            }
        }
        None => {
            writeln!(out, "{}", StateFile::from_matrix(rho.matrix(), Some(label)).to_json())?;
        }
    }
    Ok(())
}

/// Execute a parsed command, writing reports to `out`. Returns the exit code
/// for non-error outcomes (0, or 2 when `check` finds the pair incompatible).
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let tol = cli.tol.resolve()?;
    let json = cli.json;
    match &cli.command {
        Command::Check { a, b } => {
            let (ra, _) = read_state(a, &tol)?;
            let (rb, _) = read_state(b, &tol)?;
            let report = check_first_bfm(&ra, &rb, &tol)?;
            if json {
                emit_json(
                    out,
                    &CheckOutput {
                        compatible: report.compatible(),
                        first_bfm: report.first_bfm,
                        second_bfm: report.second_bfm,
                        intersection_dim: report.intersection_dim,
                        glb: entries(report.glb_projector.matrix()),
                        witness: report.witness.as_deref().map(vector_entries),
                        residuals: report.residuals.clone(),
                    },
                )?;
            } else {
                let verdict = |ok: bool| if ok { "satisfied" } else { "violated" };
                writeln!(
                    out,
                    "verdict:              {}",
                    if report.compatible() { "compatible" } else { "incompatible" }
                )?;
                writeln!(out, "first BFM condition:  {}", verdict(report.first_bfm))?;
                writeln!(out, "second BFM condition: {}", verdict(report.second_bfm))?;
                writeln!(out, "intersection dim:     {}", report.intersection_dim)?;
                writeln!(
                    out,
                    "glb projector:        {}",
                    fmt_matrix(report.glb_projector.matrix(), "  ")
                )?;
                match &report.witness {
                    Some(w) => writeln!(out, "witness:              {}", fmt_vector(w))?,
                    None => writeln!(out, "witness:              none")?,
                }
            }
            Ok(if report.compatible() {
                EXIT_OK
            } else {
                EXIT_INCOMPATIBLE
            })
        }
        Command::Improve { a, b, out: dir } => {
            let (ra, la) = read_state(a, &tol)?;
            let (rb, lb) = read_state(b, &tol)?;
            let imp = improve(&ra, &rb, &tol)?;
            let pa = dir.join("improved_a.json");
            let pb = dir.join("improved_b.json");
            write_matrix(
                &pa,
                imp.improved_a.matrix(),
                Some(format!("improved({})", label_for(a, la))),
            )?;
            write_matrix(
                &pb,
                imp.improved_b.matrix(),
                Some(format!("improved({})", label_for(b, lb))),
            )?;
            if json {
                emit_json(
                    out,
                    &ImproveOutput {
                        prob_a: imp.prob_a,
                        prob_b: imp.prob_b,
                        supports_equal: imp.supports_equal,
                        support_gaps: imp.support_gaps,
                        glb_rank: imp.glb.rank(),
                        glb: entries(imp.glb.matrix()),
                        improved_a: pa,
                        improved_b: pb,
                    },
                )?;
            } else {
                writeln!(out, "glb projector:  {}", fmt_matrix(imp.glb.matrix(), "  "))?;
                writeln!(out, "p_glb(A):       {}", fmt_real(imp.prob_a))?;
                writeln!(out, "p_glb(B):       {}", fmt_real(imp.prob_b))?;
                writeln!(out, "supports equal: {}", imp.supports_equal)?;
                writeln!(out, "improved A:     {}", fmt_matrix(imp.improved_a.matrix(), "  "))?;
                writeln!(out, "improved B:     {}", fmt_matrix(imp.improved_b.matrix(), "  "))?;
                writeln!(out, "written to {} and {}", pa.display(), pb.display())?;
            }
            Ok(EXIT_OK)
        }
        Command::Pool {
            files,
            weight,
            out: dest,
        } => {
            if !(*weight > 0.0 && *weight < 1.0) {
                return Err(Error::WeightOutOfRange(*weight).into());
            }
            let (mut acc, _) = read_state(&files[0], &tol)?;
            for f in &files[1..] {
                let (next, _) = read_state(f, &tol)?;
                acc = pool(&acc, &next, *weight, &tol)?;
            }
            write_state_output(
                out,
                json,
                dest.as_deref(),
                &acc,
                format!("pooled(w={weight})"),
                None,
            )?;
            Ok(EXIT_OK)
        }
        Command::Luders {
            file,
            projector,
            out: dest,
        } => {
            let (rho, label) = read_state(file, &tol)?;
            let p = read_projector(projector, &tol)?;
            let (updated, prob) = luders_with_probability(&rho, &p, &tol)?;
            write_state_output(
                out,
                json,
                dest.as_deref(),
                &updated,
                format!("luders({})", label_for(file, label)),
                Some(prob),
            )?;
            Ok(EXIT_OK)
        }
        Command::Decompose { a, b } => {
            let (ra, _) = read_state(a, &tol)?;
            let (rb, _) = read_state(b, &tol)?;
            let d = common_pure_decomposition(&ra, &rb, &tol)?;
            if json {
                emit_json(
                    out,
                    &DecomposeOutput {
                        common_state: vector_entries(&d.common_state),
                        a: (&d.a).into(),
                        b: (&d.b).into(),
                    },
                )?;
            } else {
                writeln!(out, "common state: {}", fmt_vector(&d.common_state))?;
                for (name, dec) in [("A", &d.a), ("B", &d.b)] {
                    writeln!(out, "{name}:")?;
                    for (i, (w, v)) in dec.weights.iter().zip(&dec.states).enumerate() {
                        let flag = if i == dec.common_index { "  (common)" } else { "" };
                        writeln!(out, "  {}  {}{flag}", fmt_real(*w), fmt_vector(v))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Info { file } => {
            let (rho, label) = read_state(file, &tol)?;
            let spectrum = eigh(rho.matrix(), &tol)?.eigenvalues;
            let (q, _) = support(&rho, &tol)?;
            let info = InfoOutput {
                dim: rho.dim(),
                spectrum,
                rank: q.rank(),
                purity: rho.purity(),
                label,
            };
            if json {
                emit_json(out, &info)?;
            } else {
                if let Some(l) = &info.label {
                    writeln!(out, "label:    {l}")?;
                }
                writeln!(out, "dim:      {}", info.dim)?;
                let s: Vec<String> = info.spectrum.iter().map(|&x| fmt_real(x)).collect();
                writeln!(out, "spectrum: [{}]", s.join(", "))?;
                writeln!(out, "rank:     {}", info.rank)?;
                writeln!(out, "purity:   {}", fmt_real(info.purity))?;
            }
            Ok(EXIT_OK)
        }
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
