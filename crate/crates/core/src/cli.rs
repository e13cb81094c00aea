//! Command-line front end.
//!
//! Exit codes: 0 success / predicate true, 1 predicate false or conversion
//! impossible, 2 usage or file errors, 3 invalid state or unitary, 4 Choi
//! matrix not CPTP. Verdicts go to stdout; stderr carries diagnostics only.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::channels::{
    self, apply, is_completely_rng, is_rng, is_transposition_covariant, rng_oracle, Channel,
};
use crate::error::Error;
use crate::io::{FileError, MatrixFile, MatrixKind};
use crate::linalg::{self, ComplexMatrix, Tolerance};
use crate::measures::{measure_m, robustness};
use crate::states::{canonical_pure_form, DensityMatrix, PureState};
use crate::transforms::synthesize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID_STATE: i32 = 3;
pub const EXIT_NOT_CPTP: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "imaginarity",
    version,
    about = "Resource theory of imaginarity toolkit"
)]
pub struct Cli {
    /// Absolute tolerance for every predicate.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Imaginarity of a state (trace-distance measure or robustness).
    Measure {
        state: PathBuf,
        #[arg(long)]
        robustness: bool,
    },
    /// Test a free-operation predicate.
    Check {
        #[arg(long, conflicts_with = "unitary", required_unless_present = "unitary")]
        choi: Option<PathBuf>,
        #[arg(long)]
        unitary: Option<PathBuf>,
        #[arg(long, value_enum)]
        predicate: Predicate,
    },
    /// Bring a pure state to the canonical form |θ⟩ with a free unitary.
    Canonicalize {
        pure: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Build a free channel converting one pure state into another.
    Synth {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Apply a channel to a state.
    Apply {
        #[arg(long)]
        choi: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Draw a random channel.
    Sample {
        #[arg(long, value_enum, default_value_t = SampleKind::Real)]
        kind: SampleKind,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Predicate {
    Rng,
    Real,
    Covariant,
    FreeUnitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    /// Real Choi matrix (free).
    Real,
    /// Complex Ginibre Choi matrix.
    General,
    /// Resource non-generating with a non-real Choi matrix.
    Rng,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Self::new(EXIT_PARSE, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::new(EXIT_PARSE, e.to_string())
    }
}

/// Format with 12 significant digits; exact zero prints as `0`.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if !(-5..=11).contains(&exp) {
        return sci;
    }
    let decimals = (11 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

fn read_kind(path: &Path, allowed: &[MatrixKind]) -> Result<MatrixFile, Failure> {
    let f = MatrixFile::read(path)?;
    if !allowed.contains(&f.kind) {
        return Err(Failure::new(
            EXIT_PARSE,
            format!(
                "{}: expected kind {:?}, found {}",
                path.display(),
                allowed,
                f.kind
            ),
        ));
    }
    Ok(f)
}

fn read_state(path: &Path, tol: Tolerance) -> Result<DensityMatrix, Failure> {
    let f = read_kind(path, &[MatrixKind::State, MatrixKind::Pure])?;
    match f.kind {
        MatrixKind::Pure => Ok(pure_from_file(&f, tol)?.density()),
        _ => DensityMatrix::new(f.to_matrix(), tol)
            .map_err(|e| Failure::new(EXIT_INVALID_STATE, e.to_string())),
    }
}

fn pure_from_file(f: &MatrixFile, tol: Tolerance) -> Result<PureState, Failure> {
    let m = f.to_matrix();
    PureState::from_slice(m.as_slice(), tol)
        .map_err(|e| Failure::new(EXIT_INVALID_STATE, e.to_string()))
}

fn read_pure(path: &Path, tol: Tolerance) -> Result<PureState, Failure> {
    let f = read_kind(path, &[MatrixKind::Pure])?;
    pure_from_file(&f, tol)
}

fn read_channel(path: &Path, tol: Tolerance) -> Result<Channel, Failure> {
    let f = read_kind(path, &[MatrixKind::Choi])?;
    Channel::new(f.to_matrix(), f.dims[0], f.dims[1], tol)
        .map_err(|e| Failure::new(EXIT_NOT_CPTP, e.to_string()))
}

fn read_unitary(path: &Path, tol: Tolerance) -> Result<ComplexMatrix, Failure> {
    let f = read_kind(path, &[MatrixKind::Unitary])?;
    let u = f.to_matrix();
    match linalg::is_unitary(&u, tol) {
        Ok(true) => Ok(u),
        _ => Err(Failure::new(
            EXIT_INVALID_STATE,
            format!("{}: matrix is not unitary", path.display()),
        )),
    }
}

fn emit(file: &MatrixFile, output: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => file.write(p)?,
        None => writeln!(out, "{}", file.to_json())?,
    }
    Ok(())
}

fn verdict(flag: bool) -> (i32, &'static str) {
    if flag {
        (EXIT_OK, "true")
    } else {
        (EXIT_FALSE, "false")
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let tol = Tolerance::uniform(cli.tol).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    match &cli.command {
        Command::Measure {
            state,
            robustness: robust,
        } => {
            let rho = read_state(state, tol)?;
            if *robust {
                writeln!(out, "R = {:.6}", robustness(&rho, tol).value)?;
            } else {
                writeln!(out, "M = {}", format_sig(measure_m(&rho).value))?;
            }
            Ok(EXIT_OK)
        }
        Command::Check {
            choi,
            unitary,
            predicate,
        } => {
            if *predicate == Predicate::FreeUnitary {
                let path = unitary
                    .as_ref()
                    .ok_or_else(|| Failure::new(EXIT_PARSE, "free-unitary needs --unitary"))?;
                let u = read_unitary(path, tol)?;
                let fact = channels::is_free_unitary(&u, tol)
                    .map_err(|e| Failure::new(EXIT_INVALID_STATE, e.to_string()))?;
                let (code, word) = verdict(fact.is_some());
                writeln!(out, "{word}")?;
                match fact {
                    Some(f) => {
                        writeln!(out, "theta = {}", format_sig(f.theta))?;
                        writeln!(out, "q_extracted = true")?;
                    }
                    None => writeln!(out, "q_extracted = false")?,
                }
                return Ok(code);
            }
            let ch = match (choi, unitary) {
                (Some(p), _) => read_channel(p, tol)?,
                (None, Some(p)) => Channel::unitary(&read_unitary(p, tol)?, tol)
                    .map_err(|e| Failure::new(EXIT_INVALID_STATE, e.to_string()))?,
                (None, None) => return Err(Failure::new(EXIT_PARSE, "need --choi or --unitary")),
            };
            let flag = match predicate {
                Predicate::Rng => is_rng(&ch, tol),
                Predicate::Real => is_completely_rng(&ch, tol),
                Predicate::Covariant => is_transposition_covariant(&ch, tol),
                Predicate::FreeUnitary => unreachable!(),
            };
            let (code, word) = verdict(flag);
            writeln!(out, "{word}")?;
            match predicate {
                Predicate::Rng => writeln!(out, "oracle = {}", rng_oracle(&ch, tol))?,
                _ => writeln!(out, "max_imag = {:.3e}", linalg::max_abs_imag(ch.choi()))?,
            }
            Ok(code)
        }
        Command::Canonicalize { pure, output } => {
            let psi = read_pure(pure, tol)?;
            let cf = canonical_pure_form(&psi);
            writeln!(out, "theta = {}", format_sig(cf.theta))?;
            writeln!(out, "phase = {}", format_sig(cf.phase))?;
            if let Some(p) = output {
                MatrixFile::from_unitary(&cf.u_free(), Some(cf.phase)).write(p)?;
            }
            Ok(EXIT_OK)
        }
        Command::Synth { from, to, output } => {
            let psi = read_pure(from, tol)?;
            let phi = read_pure(to, tol)?;
            let plan = match synthesize(&psi, &phi, tol) {
                Ok(plan) => plan,
                Err(Error::NotConvertible { .. }) => {
                    writeln!(out, "not convertible: M(source) < M(target)")?;
                    return Ok(EXIT_FALSE);
                }
                Err(e) => return Err(Failure::new(EXIT_INVALID_STATE, e.to_string())),
            };
            let fid = plan
                .fidelity(&psi, &phi)
                .map_err(|e| Failure::new(EXIT_INVALID_STATE, e.to_string()))?;
            writeln!(out, "theta = {}", format_sig(plan.theta))?;
            writeln!(out, "theta' = {}", format_sig(plan.theta_prime))?;
            writeln!(out, "fidelity = {}", format_sig(fid))?;
            if let Some(p) = output {
                MatrixFile::from_channel(&plan.total).write(p)?;
            }
            Ok(EXIT_OK)
        }
        Command::Apply {
            choi,
            state,
            output,
        } => {
            let ch = read_channel(choi, tol)?;
            let rho = read_state(state, tol)?;
            let res =
                apply(&ch, &rho).map_err(|e| Failure::new(EXIT_INVALID_STATE, e.to_string()))?;
            emit(&MatrixFile::from_state(&res), output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Sample {
            kind,
            dim,
            seed,
            output,
        } => {
            let ch = match kind {
                SampleKind::Real => channels::sample_real_choi_channel(*dim, *seed),
                SampleKind::General => channels::sample_channel(*dim, *seed),
                SampleKind::Rng => channels::sample_rng_channel(*dim, *seed),
            }
            .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
            emit(&MatrixFile::from_channel(&ch), output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
    }
}

/// Run a parsed command, returning the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
