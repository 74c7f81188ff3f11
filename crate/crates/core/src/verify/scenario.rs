//! Scenario descriptions and the built-in presets.

use serde::{Deserialize, Serialize};

use crate::constitutive::{ConstitutiveCurves, MaterialParams, PerPhase, Phase};
use crate::geometry::{Model, PartitionSpec};
use crate::ldd::{GravityCoupling, SolverParams};

use super::manufactured::{ManufacturedSolution, SolutionFamily};
use super::VerifyError;

/// Everything needed to run one verification simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub geometry: PartitionSpec,
    pub materials: Vec<MaterialParams>,
    pub curves: Vec<ConstitutiveCurves>,
    pub solution: SolutionFamily,
    pub solver: SolverParams,
    pub resolution: usize,
}

impl Scenario {
    pub fn num_subdomains(&self) -> usize {
        self.geometry.subdomains.len()
    }

    pub fn model(&self, l: usize) -> Model {
        self.geometry.subdomains[l].model
    }

    pub fn manufactured(&self) -> ManufacturedSolution {
        ManufacturedSolution::new(self.solution, &self.geometry)
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let w = self.num_subdomains();
        if self.materials.len() != w {
            return Err(VerifyError::Incomplete {
                what: "materials",
                expected: w,
                found: self.materials.len(),
            });
        }
        if self.curves.len() != w {
            return Err(VerifyError::Incomplete {
                what: "curves",
                expected: w,
                found: self.curves.len(),
            });
        }
        if self.resolution == 0 {
            return Err(VerifyError::InvalidResolution);
        }
        for (l, m) in self.materials.iter().enumerate() {
            m.validate().map_err(|source| VerifyError::Material {
                subdomain: l,
                source,
            })?;
        }
        for (l, c) in self.curves.iter().enumerate() {
            c.validate().map_err(|source| VerifyError::Material {
                subdomain: l,
                source,
            })?;
        }
        self.solver.validate(w)?;
        Ok(())
    }

    /// Closed-form source `f_{α,l}` for this scenario's parameters.
    pub fn source_term(&self, phase: Phase, l: usize, x: f64, y: f64, t: f64) -> f64 {
        self.manufactured().source_term(
            phase,
            l,
            &self.materials[l],
            &self.curves[l],
            self.solver.gravity_on,
            x,
            y,
            t,
        )
    }
}

pub const PRESET_NAMES: [&str; 7] = [
    "fig3-homogeneous",
    "fig3-tptp",
    "fig4-heterogeneous",
    "fig5-coarse-tau",
    "fig6-bad-params",
    "fig8-fivedomain",
    "fig9-gravity",
];

fn two_domain(
    name: &str,
    geometry: PartitionSpec,
    lower: MaterialParams,
    l1: f64,
    l2: PerPhase<f64>,
    lambda: f64,
) -> Scenario {
    let mut solver = SolverParams::uniform(2, 1e-3, 1500, l2, PerPhase::both(lambda), 2e-6);
    solver.l_weights[0] = PerPhase::both(l1);
    Scenario {
        name: name.to_string(),
        geometry,
        materials: vec![MaterialParams::water_air(0.22, 0.01), lower],
        curves: vec![
            ConstitutiveCurves::power(2.0),
            ConstitutiveCurves::power(3.0),
        ],
        solution: SolutionFamily::TwoDomain,
        solver,
        resolution: 20,
    }
}

fn five_domain(name: &str) -> Scenario {
    let mut solver = SolverParams::uniform(
        5,
        1e-3,
        1000,
        PerPhase { w: 0.01, nw: 0.004 },
        PerPhase { w: 1.0, nw: 0.25 },
        1e-6,
    );
    solver.gravity_on = false;
    Scenario {
        name: name.to_string(),
        geometry: PartitionSpec::five_domain(),
        materials: vec![MaterialParams::water_air(0.2, 0.01); 5],
        curves: [2.0, 3.0, 3.0, 3.0, 2.0]
            .map(ConstitutiveCurves::power)
            .to_vec(),
        solution: SolutionFamily::FiveDomain,
        solver,
        resolution: 20,
    }
}

/// Built-in scenario by name.
pub fn preset(name: &str) -> Result<Scenario, VerifyError> {
    let homogeneous = MaterialParams::water_air(0.22, 0.01);
    let heterogeneous = MaterialParams::water_air(0.022, 1e-4);
    let s = match name {
        "fig3-homogeneous" => two_domain(
            name,
            PartitionSpec::two_domain(),
            homogeneous,
            0.007,
            PerPhase::both(0.005),
            0.75,
        ),
        "fig3-tptp" => two_domain(
            name,
            PartitionSpec::two_domain_with(Model::TwoPhase, Model::TwoPhase),
            homogeneous,
            0.007,
            PerPhase::both(0.005),
            0.75,
        ),
        "fig4-heterogeneous" => two_domain(
            name,
            PartitionSpec::two_domain(),
            heterogeneous,
            0.007,
            PerPhase::both(0.0005),
            0.5,
        ),
        "fig5-coarse-tau" => {
            let mut s = two_domain(
                name,
                PartitionSpec::two_domain(),
                heterogeneous,
                0.007,
                PerPhase::both(0.0005),
                0.5,
            );
            s.solver.tau = 1e-2;
            s
        }
        "fig6-bad-params" => {
            let mut s = two_domain(
                name,
                PartitionSpec::two_domain(),
                heterogeneous,
                0.025,
                PerPhase { w: 0.05, nw: 0.025 },
                4.0,
            );
            s.solver.epsilon = 3e-6;
            s.solver.steps = 800;
            s
        }
        "fig8-fivedomain" => five_domain(name),
        "fig9-gravity" => {
            let mut s = five_domain(name);
            s.solver.l_weights = vec![PerPhase::both(0.5); 5];
            s.solver.lambda = PerPhase::both(4.0);
            s.solver.epsilon = 5e-6;
            s.solver.gravity_on = true;
            s.solver.gravity_coupling = GravityCoupling::Include;
            s
        }
        _ => return Err(VerifyError::UnknownPreset(name.to_string())),
    };
    Ok(s)
}
