//! Advisory checks of the parameter and time-step conditions that
//! guarantee contraction of the iteration.

use serde::Serialize;

use crate::constitutive::{constants_report, ConstantsReport, Phase, DEFAULT_FLOOR_RANGE};
use crate::geometry::Model;
use crate::verify::Scenario;

use super::{LddError, SolverParams};

/// Per-subdomain data the checker needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionInput {
    pub model: Model,
    pub porosity: f64,
    pub constants: ConstantsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdomainCondition {
    pub subdomain: usize,
    pub model: Model,
    /// `1/(L_S Φ) - Σ_α 1/(2 L_α)` over the phases with an equation.
    pub margin: f64,
    /// `margin - τ Σ_α L_kα² M² / (2 m Φ²)`.
    pub c: f64,
    /// Mobility floor used for `c`; only the wetting floor on Richards
    /// subdomains.
    pub m_floor: f64,
    /// Largest admissible `τ`; `None` when `m_floor <= 0` or `margin <= 0`.
    pub tau_max: Option<f64>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub tau: f64,
    pub m_estimate: f64,
    pub subdomains: Vec<SubdomainCondition>,
    /// Minimum over the subdomains where it is available.
    pub tau_max: Option<f64>,
    pub satisfied: bool,
}

pub fn check_conditions(params: &SolverParams, inputs: &[ConditionInput]) -> ConditionReport {
    let m_est = params.m_estimate;
    let subdomains: Vec<SubdomainCondition> = inputs
        .iter()
        .enumerate()
        .map(|(l, input)| {
            let k = &input.constants;
            let phi = input.porosity;
            let (phases, m_floor, lk2): (&[Phase], f64, f64) = match input.model {
                Model::Richards => (&[Phase::Wetting], k.m_floor_w, k.l_kw * k.l_kw),
                Model::TwoPhase => (&Phase::ALL, k.m_floor, k.l_kw * k.l_kw + k.l_knw * k.l_knw),
            };
            let margin = 1.0 / (k.l_s * phi)
                - phases
                    .iter()
                    .map(|&ph| 0.5 / params.l_weight(ph, l))
                    .sum::<f64>();
            let rate = lk2 * m_est * m_est / (2.0 * m_floor * phi * phi);
            let c = if m_floor > 0.0 {
                margin - params.tau * rate
            } else {
                f64::NEG_INFINITY
            };
            let tau_max = (m_floor > 0.0 && margin > 0.0).then(|| {
                if lk2 == 0.0 {
                    f64::INFINITY
                } else {
                    margin * 2.0 * m_floor * phi * phi / (lk2 * m_est * m_est)
                }
            });
            SubdomainCondition {
                subdomain: l,
                model: input.model,
                margin,
                c,
                m_floor,
                tau_max,
                satisfied: margin > 0.0 && c > 0.0,
            }
        })
        .collect();
    let tau_max = subdomains.iter().filter_map(|s| s.tau_max).reduce(f64::min);
    let satisfied = subdomains.iter().all(|s| s.satisfied);
    ConditionReport {
        tau: params.tau,
        m_estimate: m_est,
        subdomains,
        tau_max,
        satisfied,
    }
}

/// Sampled constants over the default saturation range, then
/// [`check_conditions`].
pub fn check_scenario(scenario: &Scenario) -> Result<ConditionReport, LddError> {
    let inputs = (0..scenario.num_subdomains())
        .map(|l| {
            Ok(ConditionInput {
                model: scenario.model(l),
                porosity: scenario.materials[l].porosity,
                constants: constants_report(
                    &scenario.materials[l],
                    &scenario.curves[l],
                    DEFAULT_FLOOR_RANGE,
                )?,
            })
        })
        .collect::<Result<Vec<_>, LddError>>()?;
    Ok(check_conditions(&scenario.solver, &inputs))
}
