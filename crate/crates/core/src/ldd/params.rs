//! Solver parameters of the LDD iteration.

use serde::{Deserialize, Serialize};

use crate::constitutive::{PerPhase, Phase};
use crate::linalg::LinearSolverSettings;

use super::LddError;

/// How the nonwetting flux on the Richards side of a Richards/two-phase
/// interface is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GravityCoupling {
    /// `F_nw = k_nw ∇z_nw` on the Richards side.
    #[default]
    Include,
    /// `F_nw = 0` on the Richards side.
    Exclude,
}

/// Norm used for the subsequent error `‖p^i - p^{i-1}‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoppingNorm {
    #[default]
    L2,
    /// Euclidean norm of the dof vector.
    Euclidean,
}

/// Robin weight for one interface and phase; subdomains are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaOverride {
    pub between: [usize; 2],
    pub phase: Phase,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    pub tau: f64,
    pub steps: usize,
    /// L-scheme weights per subdomain; the nonwetting entry of a Richards
    /// subdomain is unused.
    #[serde(rename = "L")]
    pub l_weights: Vec<PerPhase<f64>>,
    /// Robin weights used on every interface unless overridden.
    pub lambda: PerPhase<f64>,
    #[serde(default)]
    pub lambda_overrides: Vec<LambdaOverride>,
    pub epsilon: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub gravity_on: bool,
    #[serde(default)]
    pub gravity_coupling: GravityCoupling,
    /// User bound for `sup ‖∇(p + z)‖_∞` used by the condition checker.
    #[serde(default = "default_m_estimate")]
    pub m_estimate: f64,
    #[serde(default)]
    pub linear: LinearSolverSettings,
    #[serde(default)]
    pub stopping_norm: StoppingNorm,
}

fn default_max_iterations() -> usize {
    1000
}

fn default_m_estimate() -> f64 {
    10.0
}

impl SolverParams {
    /// Uniform parameters for `subdomains` subdomains.
    pub fn uniform(
        subdomains: usize,
        tau: f64,
        steps: usize,
        l: PerPhase<f64>,
        lambda: PerPhase<f64>,
        epsilon: f64,
    ) -> Self {
        Self {
            tau,
            steps,
            l_weights: vec![l; subdomains],
            lambda,
            lambda_overrides: Vec::new(),
            epsilon,
            max_iterations: default_max_iterations(),
            gravity_on: false,
            gravity_coupling: GravityCoupling::Include,
            m_estimate: default_m_estimate(),
            linear: LinearSolverSettings::default(),
            stopping_norm: StoppingNorm::L2,
        }
    }

    pub fn l_weight(&self, phase: Phase, l: usize) -> f64 {
        self.l_weights[l].get(phase)
    }

    /// `λ_α^{lk}`, symmetric in `l` and `k` (zero-based).
    pub fn lambda(&self, phase: Phase, l: usize, k: usize) -> f64 {
        let key = [l.min(k) + 1, l.max(k) + 1];
        self.lambda_overrides
            .iter()
            .rev()
            .find(|o| {
                o.phase == phase
                    && [
                        o.between[0].min(o.between[1]),
                        o.between[0].max(o.between[1]),
                    ] == key
            })
            .map_or(self.lambda.get(phase), |o| o.value)
    }

    pub fn validate(&self, subdomains: usize) -> Result<(), LddError> {
        let bad = |field: String, value: f64| Err(LddError::InvalidParameter { field, value });
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad("tau".into(), self.tau);
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon".into(), self.epsilon);
        }
        if self.max_iterations == 0 {
            return bad("max_iterations".into(), 0.0);
        }
        if self.l_weights.len() != subdomains {
            return bad("L".into(), self.l_weights.len() as f64);
        }
        for (l, w) in self.l_weights.iter().enumerate() {
            for ph in Phase::ALL {
                let v = w.get(ph);
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("L.{}.{}", ph.tag(), l + 1), v);
                }
            }
        }
        for ph in Phase::ALL {
            let v = self.lambda.get(ph);
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("lambda.{}", ph.tag()), v);
            }
        }
        for o in &self.lambda_overrides {
            let [a, b] = o.between;
            if a == 0 || b == 0 || a > subdomains || b > subdomains || a == b {
                return bad(format!("lambda.{}.{}.{}", o.phase.tag(), a, b), o.value);
            }
            if !(o.value > 0.0 && o.value.is_finite()) {
                return bad(format!("lambda.{}.{}.{}", o.phase.tag(), a, b), o.value);
            }
        }
        if !(self.m_estimate > 0.0 && self.m_estimate.is_finite()) {
            return bad("m_estimate".into(), self.m_estimate);
        }
        let lin = &self.linear;
        if !(lin.rel_tol > 0.0 && lin.rel_tol < 1.0) {
            return bad("linear.rel_tol".into(), lin.rel_tol);
        }
        if lin.restart == 0 || lin.max_iters == 0 {
            return bad("linear.restart".into(), lin.restart as f64);
        }
        Ok(())
    }
}
