//! File formats, exports and error mapping for the `psiperm` command-line
//! tool. The arithmetic lives in `psiperm-core`; this crate only parses
//! number-spec and state files, renders CSV/JSON artifacts, and maps core
//! errors onto documented exit codes.

use std::fmt;
use std::io::Write;
use std::path::Path;

use psiperm_core::cf::CfError;
use psiperm_core::dynamics::DynError;
use psiperm_core::forge::ForgeError;
use psiperm_core::lemmas::LemmaError;
use psiperm_core::psi::PsiError;

pub mod export;
pub mod spec;
pub mod state;

/// CLI failure with its documented exit code: 1 internal, 2 config,
/// 3 tie/undecidable, 4 violation/mismatch.
#[derive(Debug)]
pub enum CliError {
    Internal(String),
    Config(String),
    Tie(String),
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Config(_) => 2,
            CliError::Tie(_) => 3,
            CliError::Violation(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Internal(m) => write!(f, "{m}"),
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Tie(m) => write!(f, "{m}"),
            CliError::Violation(m) => write!(f, "{m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}

impl From<CfError> for CliError {
    fn from(e: CfError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<PsiError> for CliError {
    fn from(e: PsiError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DynError> for CliError {
    fn from(e: DynError) -> Self {
        match e {
            DynError::TieDetected { .. } => CliError::Tie(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<LemmaError> for CliError {
    fn from(e: LemmaError) -> Self {
        match e {
            LemmaError::CannotDecide { .. } => CliError::Tie(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ForgeError> for CliError {
    fn from(e: ForgeError) -> Self {
        match e {
            ForgeError::OrderingMismatch { .. }
            | ForgeError::MissingPhase { .. }
            | ForgeError::ChainViolated { .. } => CliError::Violation(e.to_string()),
            ForgeError::ModuliNotCoprime { .. }
            | ForgeError::NonIntegerQuotient { .. }
            | ForgeError::GrowthScheduleUnsatisfiable { .. }
            | ForgeError::CoprimalityViolated { .. }
            | ForgeError::DenominatorMismatch { .. } => CliError::Internal(e.to_string()),
            ForgeError::Dyn(inner) => CliError::from(inner),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Write a file atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .map_err(|e| CliError::Internal(format!("persist: {e}")))?;
    Ok(())
}

/// Parse a burn-in fraction: decimal like `0.5` or a ratio like `1/2`.
pub fn parse_fraction(s: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Config(format!("invalid fraction '{s}'"));
    let (num, den) = if let Some((a, b)) = s.split_once('/') {
        (
            a.parse::<u64>().map_err(|_| bad())?,
            b.parse::<u64>().map_err(|_| bad())?,
        )
    } else if let Some((int, frac)) = s.split_once('.') {
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.len() > 18 || frac.chars().any(|c| !c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        (int * scale + frac, scale)
    } else {
        (s.parse::<u64>().map_err(|_| bad())?, 1)
    };
    if den == 0 || num >= den {
        return Err(CliError::Config(format!(
            "burn-in must satisfy 0 <= b < 1, got '{s}'"
        )));
    }
    Ok((num, den))
}
