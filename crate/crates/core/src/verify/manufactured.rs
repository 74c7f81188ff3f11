//! Closed-form manufactured pressures and the matching source terms.

use serde::{Deserialize, Serialize};

use crate::constitutive::{d_mobility, mobility, ConstitutiveCurves, MaterialParams, Phase};
use crate::geometry::{Model, PartitionSpec};

/// Which family of exact solutions a scenario uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionFamily {
    /// Two-domain solutions.
    TwoDomain,
    /// Five-domain solutions.
    FiveDomain,
}

/// Value, gradient, Laplacian and time derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureJet {
    pub value: f64,
    pub grad: [f64; 2],
    pub laplacian: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expression {
    Zero,
    /// `-7 - (1+t²)(1+x²+y²)`
    WettingUpper,
    /// `-7 - (1+t²)(1+x²)`
    WettingLower,
    /// `(-2 - t(1.1+y+x²)) y²`
    NonwettingTwoDomain,
    /// `(-3 - t(1+y+x²) - t²) y²`
    NonwettingFiveDomain,
}

impl Expression {
    pub fn value(self, x: f64, y: f64, t: f64) -> f64 {
        self.jet(x, y, t).value
    }

    pub fn jet(self, x: f64, y: f64, t: f64) -> PressureJet {
        let a = 1.0 + t * t;
        match self {
            Expression::Zero => PressureJet {
                value: 0.0,
                grad: [0.0; 2],
                laplacian: 0.0,
                dt: 0.0,
            },
            Expression::WettingUpper => {
                let r = 1.0 + x * x + y * y;
                PressureJet {
                    value: -7.0 - a * r,
                    grad: [-2.0 * a * x, -2.0 * a * y],
                    laplacian: -4.0 * a,
                    dt: -2.0 * t * r,
                }
            }
            Expression::WettingLower => {
                let r = 1.0 + x * x;
                PressureJet {
                    value: -7.0 - a * r,
                    grad: [-2.0 * a * x, 0.0],
                    laplacian: -2.0 * a,
                    dt: -2.0 * t * r,
                }
            }
            Expression::NonwettingTwoDomain | Expression::NonwettingFiveDomain => {
                // q(x,y,t) y² with q linear in y and x²
                let (c0, c1, q_dt) = if self == Expression::NonwettingTwoDomain {
                    (-2.0, 1.1, -(1.1 + y + x * x))
                } else {
                    (-3.0 - t * t, 1.0, -(1.0 + y + x * x) - 2.0 * t)
                };
                let q = c0 - t * (c1 + y + x * x);
                let y2 = y * y;
                PressureJet {
                    value: q * y2,
                    grad: [-2.0 * t * x * y2, -t * y2 + 2.0 * q * y],
                    laplacian: -2.0 * t * y2 + 2.0 * q - 4.0 * t * y,
                    dt: q_dt * y2,
                }
            }
        }
    }
}

/// Assignment of closed forms to every (phase, subdomain).
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedSolution {
    family: SolutionFamily,
    models: Vec<Model>,
    upper: Vec<bool>,
}

fn vertex_mean_y(poly: &[[f64; 2]]) -> f64 {
    poly.iter().map(|p| p[1]).sum::<f64>() / poly.len() as f64
}

impl ManufacturedSolution {
    /// Subdomains above `y = 0` get the upper-region expressions; a
    /// two-phase subdomain there carries a zero nonwetting pressure.
    pub fn new(family: SolutionFamily, geometry: &PartitionSpec) -> Self {
        Self {
            family,
            models: geometry.subdomains.iter().map(|s| s.model).collect(),
            upper: geometry
                .subdomains
                .iter()
                .map(|s| vertex_mean_y(&s.polygon) > 0.0)
                .collect(),
        }
    }

    pub fn family(&self) -> SolutionFamily {
        self.family
    }

    pub fn expression(&self, phase: Phase, l: usize) -> Expression {
        match (phase, self.upper[l]) {
            (Phase::Wetting, true) => Expression::WettingUpper,
            (Phase::Wetting, false) => Expression::WettingLower,
            (Phase::Nonwetting, true) => Expression::Zero,
            (Phase::Nonwetting, false) => match (self.models[l], self.family) {
                (Model::Richards, _) => Expression::Zero,
                (Model::TwoPhase, SolutionFamily::TwoDomain) => Expression::NonwettingTwoDomain,
                (Model::TwoPhase, SolutionFamily::FiveDomain) => Expression::NonwettingFiveDomain,
            },
        }
    }

    /// `p^e_{α,l}(x, y, t)`; zero for the nonwetting phase on Richards
    /// subdomains.
    pub fn exact_pressure(&self, phase: Phase, l: usize, x: f64, y: f64, t: f64) -> f64 {
        self.expression(phase, l).value(x, y, t)
    }

    /// `±Φ ∂_t S - ∇·(k_mob(S) ∇(p + z))` evaluated in closed form.
    #[allow(clippy::too_many_arguments)]
    pub fn source_term(
        &self,
        phase: Phase,
        l: usize,
        params: &MaterialParams,
        curves: &ConstitutiveCurves,
        gravity_on: bool,
        x: f64,
        y: f64,
        t: f64,
    ) -> f64 {
        if phase == Phase::Nonwetting && self.models[l] == Model::Richards {
            return 0.0;
        }
        let w = self.expression(Phase::Wetting, l).jet(x, y, t);
        let nw = self.expression(Phase::Nonwetting, l).jet(x, y, t);
        let p = if phase == Phase::Wetting { w } else { nw };
        let pc = nw.value - w.value;
        let s = curves.saturation(pc);
        let ds = curves.d_saturation(pc);
        let s_t = ds * (nw.dt - w.dt);
        let s_grad = [ds * (nw.grad[0] - w.grad[0]), ds * (nw.grad[1] - w.grad[1])];
        let k = mobility(params, curves, phase, s);
        let dk = d_mobility(params, curves, phase, s);
        let gz = params.gravity_gradient(phase, gravity_on);
        let drive = [p.grad[0] + gz[0], p.grad[1] + gz[1]];
        let div = k * p.laplacian + dk * (s_grad[0] * drive[0] + s_grad[1] * drive[1]);
        let time = params.porosity * s_t;
        match phase {
            Phase::Wetting => time - div,
            Phase::Nonwetting => -time - div,
        }
    }
}
