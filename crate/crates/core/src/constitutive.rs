//! Material parameters, relative permeabilities, the saturation law and
//! the derived Lipschitz/positivity constants.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fluid phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "w")]
    Wetting,
    #[serde(rename = "nw")]
    Nonwetting,
}

impl Phase {
    pub const ALL: [Phase; 2] = [Phase::Wetting, Phase::Nonwetting];

    pub fn tag(self) -> &'static str {
        match self {
            Phase::Wetting => "w",
            Phase::Nonwetting => "nw",
        }
    }
}

/// One value per phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerPhase<T> {
    pub w: T,
    pub nw: T,
}

impl<T: Copy> PerPhase<T> {
    pub fn both(v: T) -> Self {
        Self { w: v, nw: v }
    }

    pub fn get(&self, phase: Phase) -> T {
        match phase {
            Phase::Wetting => self.w,
            Phase::Nonwetting => self.nw,
        }
    }

    pub fn get_mut(&mut self, phase: Phase) -> &mut T {
        match phase {
            Phase::Wetting => &mut self.w,
            Phase::Nonwetting => &mut self.nw,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstitutiveError {
    #[error("{field} must be {requirement}, got {value}")]
    OutOfRange {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("invalid saturation range [{0}, {1}]")]
    InvalidRange(f64, f64),
}

/// Soil and fluid parameters of one subdomain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    pub porosity: f64,
    pub intrinsic_permeability: f64,
    pub viscosity: PerPhase<f64>,
    pub density: PerPhase<f64>,
    /// Gravitational acceleration; only used when gravity is switched on.
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_gravity() -> f64 {
    9.81
}

impl MaterialParams {
    /// Water/air values used throughout the verification presets.
    pub fn water_air(porosity: f64, intrinsic_permeability: f64) -> Self {
        Self {
            porosity,
            intrinsic_permeability,
            viscosity: PerPhase {
                w: 1.0,
                nw: 1.0 / 50.0,
            },
            density: PerPhase {
                w: 997.0,
                nw: 1.225,
            },
            gravity: default_gravity(),
        }
    }

    pub fn validate(&self) -> Result<(), ConstitutiveError> {
        let check = |ok: bool, field, requirement, value| {
            if ok {
                Ok(())
            } else {
                Err(ConstitutiveError::OutOfRange {
                    field,
                    requirement,
                    value,
                })
            }
        };
        check(
            self.porosity > 0.0 && self.porosity < 1.0,
            "porosity",
            "in (0,1)",
            self.porosity,
        )?;
        check(
            self.intrinsic_permeability > 0.0,
            "intrinsic_permeability",
            "positive",
            self.intrinsic_permeability,
        )?;
        check(
            self.viscosity.w > 0.0,
            "viscosity.w",
            "positive",
            self.viscosity.w,
        )?;
        check(
            self.viscosity.nw > 0.0,
            "viscosity.nw",
            "positive",
            self.viscosity.nw,
        )?;
        check(
            self.density.w > 0.0,
            "density.w",
            "positive",
            self.density.w,
        )?;
        check(
            self.density.nw > 0.0,
            "density.nw",
            "positive",
            self.density.nw,
        )?;
        check(
            self.gravity >= 0.0 && self.gravity.is_finite(),
            "gravity",
            "nonnegative",
            self.gravity,
        )
    }

    /// `∇z_α = (0, ρ_α g)`, zero when gravity is off.
    pub fn gravity_gradient(&self, phase: Phase, gravity_on: bool) -> [f64; 2] {
        if gravity_on {
            [0.0, self.density.get(phase) * self.gravity]
        } else {
            [0.0, 0.0]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveFamily {
    /// `k_w = s^e`, `k_nw = (1-s)^e`, `S = (1+p_c)^(-1/e)` for `p_c >= 0`.
    Power,
}

/// Relative permeabilities and saturation law of one subdomain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstitutiveCurves {
    pub family: CurveFamily,
    pub exponent: f64,
}

static CLAMP_COUNT: AtomicU64 = AtomicU64::new(0);

/// Number of saturation inputs clamped to `[0, 1]` since start-up.
pub fn clamp_count() -> u64 {
    CLAMP_COUNT.load(Ordering::Relaxed)
}

fn clamp_saturation(s: f64) -> f64 {
    if (0.0..=1.0).contains(&s) {
        s
    } else {
        CLAMP_COUNT.fetch_add(1, Ordering::Relaxed);
        if s.is_nan() {
            0.0
        } else {
            s.clamp(0.0, 1.0)
        }
    }
}

impl ConstitutiveCurves {
    pub fn power(exponent: f64) -> Self {
        Self {
            family: CurveFamily::Power,
            exponent,
        }
    }

    pub fn validate(&self) -> Result<(), ConstitutiveError> {
        if self.exponent >= 1.0 && self.exponent.is_finite() {
            Ok(())
        } else {
            Err(ConstitutiveError::OutOfRange {
                field: "exponent",
                requirement: "at least 1",
                value: self.exponent,
            })
        }
    }

    pub fn rel_perm_w(&self, s: f64) -> f64 {
        clamp_saturation(s).powf(self.exponent)
    }

    pub fn rel_perm_nw(&self, s: f64) -> f64 {
        (1.0 - clamp_saturation(s)).powf(self.exponent)
    }

    pub fn d_rel_perm_w(&self, s: f64) -> f64 {
        let e = self.exponent;
        e * clamp_saturation(s).powf(e - 1.0)
    }

    pub fn d_rel_perm_nw(&self, s: f64) -> f64 {
        let e = self.exponent;
        -e * (1.0 - clamp_saturation(s)).powf(e - 1.0)
    }

    pub fn saturation(&self, pc: f64) -> f64 {
        if pc < 0.0 {
            1.0
        } else {
            (1.0 + pc).powf(-1.0 / self.exponent)
        }
    }

    /// `dS/dp_c`; the one-sided derivative from the right at `p_c = 0`.
    pub fn d_saturation(&self, pc: f64) -> f64 {
        if pc < 0.0 {
            0.0
        } else {
            let e = self.exponent;
            -(1.0 / e) * (1.0 + pc).powf(-1.0 / e - 1.0)
        }
    }

    /// Inverse of the saturation law on `(0, 1]`.
    pub fn capillary_pressure(&self, s: f64) -> f64 {
        s.powf(-self.exponent) - 1.0
    }

    /// Analytic Lipschitz constants of the raw curves on `[0, 1]`:
    /// `(L_S, L_kw, L_knw)`.
    pub fn declared_constants(&self) -> (f64, f64, f64) {
        (1.0 / self.exponent, self.exponent, self.exponent)
    }
}

/// `k_i k_α(s) / μ_α` with `s` the wetting saturation.
pub fn mobility(params: &MaterialParams, curves: &ConstitutiveCurves, phase: Phase, s: f64) -> f64 {
    let k = match phase {
        Phase::Wetting => curves.rel_perm_w(s),
        Phase::Nonwetting => curves.rel_perm_nw(s),
    };
    params.intrinsic_permeability * k / params.viscosity.get(phase)
}

pub fn d_mobility(
    params: &MaterialParams,
    curves: &ConstitutiveCurves,
    phase: Phase,
    s: f64,
) -> f64 {
    let dk = match phase {
        Phase::Wetting => curves.d_rel_perm_w(s),
        Phase::Nonwetting => curves.d_rel_perm_nw(s),
    };
    params.intrinsic_permeability * dk / params.viscosity.get(phase)
}

/// Sampled constants of one subdomain over a saturation range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub l_s: f64,
    pub l_kw: f64,
    pub l_knw: f64,
    /// Minimum over both phases.
    pub m_floor: f64,
    pub m_floor_w: f64,
    pub m_floor_nw: f64,
}

pub const CONSTANT_SAMPLES: usize = 10_000;

/// Default saturation range for positivity floors; the built-in curves
/// vanish at the end points of `[0, 1]`.
pub const DEFAULT_FLOOR_RANGE: [f64; 2] = [0.05, 1.0];

/// Dense-grid estimates of `L_S`, `L_kw`, `L_knw` (of the mobilities) and
/// the mobility floor over `[s_min, s_max]`.
pub fn constants_report(
    params: &MaterialParams,
    curves: &ConstitutiveCurves,
    s_range: [f64; 2],
) -> Result<ConstantsReport, ConstitutiveError> {
    let [lo, hi] = s_range;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(ConstitutiveError::InvalidRange(lo, hi));
    }
    let n = CONSTANT_SAMPLES;
    let s: Vec<f64> = (0..=n)
        .map(|j| lo + (hi - lo) * j as f64 / n as f64)
        .collect();
    let slope_max = |f: &dyn Fn(f64) -> f64| {
        s.windows(2)
            .map(|w| ((f(w[1]) - f(w[0])) / (w[1] - w[0])).abs())
            .fold(0.0, f64::max)
    };
    let l_kw = slope_max(&|x| mobility(params, curves, Phase::Wetting, x));
    let l_knw = slope_max(&|x| mobility(params, curves, Phase::Nonwetting, x));
    let mut l_s: f64 = 0.0;
    for w in s.windows(2) {
        let (p0, p1) = (
            curves.capillary_pressure(w[0]),
            curves.capillary_pressure(w[1]),
        );
        if p0.is_finite() && p1.is_finite() && p0 != p1 {
            l_s = l_s.max(((w[1] - w[0]) / (p1 - p0)).abs());
        }
    }
    let floor = |ph| {
        s.iter()
            .map(|&x| mobility(params, curves, ph, x))
            .fold(f64::INFINITY, f64::min)
    };
    let (m_floor_w, m_floor_nw) = (floor(Phase::Wetting), floor(Phase::Nonwetting));
    Ok(ConstantsReport {
        l_s,
        l_kw,
        l_knw,
        m_floor: m_floor_w.min(m_floor_nw),
        m_floor_w,
        m_floor_nw,
    })
}
