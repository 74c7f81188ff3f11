//! The LDD iteration engine, its parameters and the condition checker.

mod conditions;
mod engine;
mod exec;
mod params;

pub use conditions::{
    check_conditions, check_scenario, ConditionInput, ConditionReport, SubdomainCondition,
};
pub use engine::{
    Engine, Fields, IterationRecord, IterationState, RunOutcome, StepOutcome, StepStatus,
};
pub use exec::ExecutionMode;
pub use params::{GravityCoupling, LambdaOverride, SolverParams, StoppingNorm};

use thiserror::Error;

use crate::constitutive::{ConstitutiveError, Phase};
use crate::fem::FemError;
use crate::geometry::GeometryError;
use crate::linalg::LinalgError;
use crate::verify::VerifyError;

#[derive(Debug, Error)]
pub enum LddError {
    #[error("invalid solver parameter `{field}` = {value}")]
    InvalidParameter { field: String, value: f64 },
    #[error("linear solve for phase {} on subdomain {} failed: {source}", phase.tag(), subdomain + 1)]
    LinearSolve {
        phase: Phase,
        subdomain: usize,
        source: LinalgError,
    },
    #[error("assembly for phase {} on subdomain {} failed: {source}", phase.tag(), subdomain + 1)]
    Assembly {
        phase: Phase,
        subdomain: usize,
        source: FemError,
    },
    #[error("missing {} pressure on subdomain {}", phase.tag(), subdomain + 1)]
    MissingField { phase: Phase, subdomain: usize },
    #[error("solve order must be a permutation of 0..{0}")]
    InvalidSolveOrder(usize),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Scenario(Box<VerifyError>),
}

impl From<VerifyError> for LddError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Solver(inner) => inner,
            other => LddError::Scenario(Box::new(other)),
        }
    }
}
