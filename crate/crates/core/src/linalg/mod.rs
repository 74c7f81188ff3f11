//! Sparse linear algebra: CSR matrices, ILU(0), restarted GMRES and CG.

mod ilu;
mod krylov;
mod sparse;

pub use ilu::IluPreconditioner;
pub use krylov::{conjugate_gradient, gmres, KrylovOptions, KrylovOutcome};
pub use sparse::{dot, norm2, SparseMatrix};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) out of bounds")]
    IndexOutOfBounds { row: usize, col: usize },
    #[error("entry ({row}, {col}) is not in the sparsity pattern")]
    NotInPattern { row: usize, col: usize },
    #[error("row {row} has no diagonal entry")]
    MissingDiagonal { row: usize },
    #[error("zero pivot in row {row}")]
    ZeroPivot { row: usize },
    #[error("Krylov breakdown after {iteration} iterations")]
    Breakdown { iteration: usize },
    #[error("invalid solver options")]
    InvalidOptions,
}

/// Which Krylov method solves the subdomain systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KrylovMethod {
    #[default]
    Gmres,
    Cg,
}

/// Solver stack settings for one linear system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearSolverSettings {
    pub method: KrylovMethod,
    pub use_ilu: bool,
    pub rel_tol: f64,
    pub restart: usize,
    pub max_iters: usize,
}

impl Default for LinearSolverSettings {
    fn default() -> Self {
        let k = KrylovOptions::default();
        Self {
            method: KrylovMethod::Gmres,
            use_ilu: true,
            rel_tol: k.rel_tol,
            restart: k.restart,
            max_iters: k.max_iters,
        }
    }
}

impl LinearSolverSettings {
    pub fn options(&self) -> KrylovOptions {
        KrylovOptions {
            rel_tol: self.rel_tol,
            restart: self.restart,
            max_iters: self.max_iters,
        }
    }

    /// Builds the preconditioner (if requested) and runs the Krylov method.
    /// A zero pivot in ILU(0) falls back to the unpreconditioned method.
    pub fn solve(
        &self,
        a: &SparseMatrix,
        b: &[f64],
        x0: Option<&[f64]>,
    ) -> Result<KrylovOutcome, LinalgError> {
        let ilu = if self.use_ilu {
            match IluPreconditioner::new(a) {
                Ok(p) => Some(p),
                Err(e) => {
                    log::warn!("ILU(0) failed ({e}); solving without preconditioner");
                    None
                }
            }
        } else {
            None
        };
        match self.method {
            KrylovMethod::Gmres => gmres(a, b, ilu.as_ref(), &self.options(), x0),
            KrylovMethod::Cg => conjugate_gradient(a, b, ilu.as_ref(), &self.options(), x0),
        }
    }
}
