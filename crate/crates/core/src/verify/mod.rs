//! Manufactured solutions, scenario presets and run reports.

mod manufactured;
mod report;
mod scenario;

pub use manufactured::{Expression, ManufacturedSolution, PressureJet, SolutionFamily};
pub use report::{emit_report, DiagnosticRow, FieldId, RunReport, StepRecord};
pub use scenario::{preset, Scenario, PRESET_NAMES};

use thiserror::Error;

use crate::constitutive::ConstitutiveError;
use crate::ldd::LddError;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown scenario preset `{0}`")]
    UnknownPreset(String),
    #[error("scenario lists {found} {what} for {expected} subdomains")]
    Incomplete {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("resolution must be at least 1")]
    InvalidResolution,
    #[error("subdomain {}: {source}", subdomain + 1)]
    Material {
        subdomain: usize,
        source: ConstitutiveError,
    },
    #[error(transparent)]
    Solver(#[from] LddError),
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
