//! Interface flux reconstruction and the DG1 to P1 trace projection.

use crate::constitutive::{mobility, ConstitutiveCurves, MaterialParams, Phase};

use super::field::TraceFieldDG1;
use super::space::{InterfaceTrace, SubdomainSpace};
use super::FemError;

/// Nodal average of the facet-endpoint values at every interface vertex;
/// indexed like `trace.vertices`.
pub fn project_trace(trace: &InterfaceTrace, g: &TraceFieldDG1) -> Vec<f64> {
    let mut sum = vec![0.0; trace.vertices.len()];
    let mut count = vec![0usize; trace.vertices.len()];
    for (e, v) in trace.endpoints.iter().zip(&g.values) {
        for j in 0..2 {
            sum[e[j]] += v[j];
            count[e[j]] += 1;
        }
    }
    sum.iter()
        .zip(&count)
        .map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
        .collect()
}

/// Phase pressures of one subdomain; `p_nw = None` stands for `p_nw = 0`.
#[derive(Debug, Clone, Copy)]
pub struct Pressures<'a> {
    pub w: &'a [f64],
    pub nw: Option<&'a [f64]>,
}

impl<'a> Pressures<'a> {
    pub fn phase(&self, phase: Phase) -> Option<&'a [f64]> {
        match phase {
            Phase::Wetting => Some(self.w),
            Phase::Nonwetting => self.nw,
        }
    }

    pub fn capillary(&self, v: usize) -> f64 {
        self.nw.map_or(0.0, |nw| nw[v]) - self.w[v]
    }
}

/// `F_α·n_lk` at both endpoints of every facet of the interface with `k`:
/// `-k_mob(S(endpoint)) (∇p|cell + ∇z_α)·n_lk` with the gradient of the
/// adjacent cell of subdomain `l`.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_interface_flux(
    space: &SubdomainSpace,
    k: usize,
    pressures: Pressures<'_>,
    phase: Phase,
    params: &MaterialParams,
    curves: &ConstitutiveCurves,
    gravity_on: bool,
) -> Result<TraceFieldDG1, FemError> {
    let trace = space.trace(k).ok_or(FemError::NotNeighbor {
        subdomain: space.index(),
        neighbor: k,
    })?;
    let p = pressures.phase(phase).ok_or(FemError::PhaseModelMismatch {
        subdomain: space.index(),
    })?;
    let gz = params.gravity_gradient(phase, gravity_on);
    let mut values = Vec::with_capacity(trace.num_facets());
    for r in &trace.records {
        let cell = space
            .cells()
            .get(r.local_cell)
            .ok_or(FemError::MalformedTrace {
                subdomain: space.index(),
                neighbor: k,
            })?;
        let g = space.cell_gradients(r.local_cell);
        let mut grad = gz;
        for a in 0..3 {
            grad[0] += p[cell[a]] * g[a][0];
            grad[1] += p[cell[a]] * g[a][1];
        }
        let dn = grad[0] * r.normal[0] + grad[1] * r.normal[1];
        let at = |v: usize| {
            -mobility(
                params,
                curves,
                phase,
                curves.saturation(pressures.capillary(v)),
            ) * dn
        };
        values.push([at(r.local_dofs[0]), at(r.local_dofs[1])]);
    }
    Ok(TraceFieldDG1 {
        owner: space.index(),
        neighbor: k,
        values,
    })
}
