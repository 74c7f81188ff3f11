//! Assembly of the linear system solved per phase and subdomain in one
//! LDD iteration.

use crate::constitutive::{mobility, ConstitutiveCurves, MaterialParams, Phase};
use crate::geometry::Model;
use crate::linalg::SparseMatrix;

use super::field::TraceFieldDG1;
use super::interface::{project_trace, Pressures};
use super::space::SubdomainSpace;
use super::FemError;

/// Robin data of one neighbour: weight `λ` and the incoming g-term.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceTerm<'a> {
    pub neighbor: usize,
    pub lambda: f64,
    pub g: &'a TraceFieldDG1,
}

#[derive(Debug, Clone, Copy)]
pub struct SystemInputs<'a> {
    pub phase: Phase,
    pub params: &'a MaterialParams,
    pub curves: &'a ConstitutiveCurves,
    /// L-scheme weight `L_{α,l}`.
    pub l_weight: f64,
    pub tau: f64,
    pub gravity_on: bool,
    /// Iterate `i-1` of both phases.
    pub prev_iterate: Pressures<'a>,
    /// `S^{n-1}` at the quadrature points.
    pub prev_time_saturation: &'a [f64],
    /// `f_α(t_n)` at the quadrature points.
    pub source: &'a [f64],
    pub interfaces: &'a [InterfaceTerm<'a>],
    pub dirichlet: &'a [(usize, f64)],
}

#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub constraints: Vec<(usize, f64)>,
}

/// Mobility integrated over each cell, with saturation from the
/// interpolated pressures at the quadrature points.
pub fn cell_mobility(
    space: &SubdomainSpace,
    params: &MaterialParams,
    curves: &ConstitutiveCurves,
    phase: Phase,
    saturation_qp: &[f64],
) -> Vec<f64> {
    let k: Vec<f64> = saturation_qp
        .iter()
        .map(|&s| mobility(params, curves, phase, s))
        .collect();
    space.cell_integrals(&k)
}

/// Builds `L M + τ K(k^{i-1}) + τ Σ λ M_Γ` and the matching right-hand side,
/// leaving the Dirichlet constraints unapplied.
pub fn assemble_unconstrained(
    space: &SubdomainSpace,
    input: &SystemInputs<'_>,
) -> Result<AssembledSystem, FemError> {
    let l = space.index();
    if input.phase == Phase::Nonwetting && space.model() == Model::Richards {
        return Err(FemError::PhaseModelMismatch { subdomain: l });
    }
    let p_prev = input
        .prev_iterate
        .phase(input.phase)
        .ok_or(FemError::PhaseModelMismatch { subdomain: l })?;
    let n = space.num_dofs();
    for (len, what) in [(p_prev.len(), n), (input.prev_iterate.w.len(), n)] {
        if len != what {
            return Err(FemError::DofMismatch {
                expected: what,
                found: len,
            });
        }
    }
    let nqp = space.quadrature_points().len();
    for len in [input.prev_time_saturation.len(), input.source.len()] {
        if len != nqp {
            return Err(FemError::DofMismatch {
                expected: nqp,
                found: len,
            });
        }
    }
    for k in space.neighbors() {
        if !input.interfaces.iter().any(|t| t.neighbor == k) {
            return Err(FemError::MissingGTerm {
                subdomain: l,
                neighbor: k,
            });
        }
    }

    let s_qp = space.saturation_at_qp(input.curves, input.prev_iterate.w, input.prev_iterate.nw);
    let k_cell = cell_mobility(space, input.params, input.curves, input.phase, &s_qp);
    let tau = input.tau;

    let mut matrix = space.pattern().clone();
    {
        let vals = matrix.values_mut();
        for (v, m) in vals.iter_mut().zip(space.mass().values()) {
            *v = input.l_weight * m;
        }
        for (c, &k) in k_cell.iter().enumerate() {
            let g = space.cell_gradients(c);
            let s = space.cell_slots(c);
            let kc = tau * k;
            for a in 0..3 {
                for b in 0..3 {
                    vals[s[3 * a + b]] += kc * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                }
            }
        }
    }

    let mut rhs = space.mass().mul_vec(p_prev);
    rhs.iter_mut().for_each(|v| *v *= input.l_weight);

    let sign = match input.phase {
        Phase::Wetting => -1.0,
        Phase::Nonwetting => 1.0,
    };
    let phi = input.params.porosity;
    let dsat: Vec<f64> = s_qp
        .iter()
        .zip(input.prev_time_saturation)
        .zip(input.source)
        .map(|((s, s0), f)| sign * phi * (s - s0) + tau * f)
        .collect();
    for (r, v) in rhs.iter_mut().zip(space.load_vector(&dsat)) {
        *r += v;
    }

    let gz = input.params.gravity_gradient(input.phase, input.gravity_on);
    if gz != [0.0, 0.0] {
        for (c, tri) in space.cells().iter().enumerate() {
            let g = space.cell_gradients(c);
            for a in 0..3 {
                rhs[tri[a]] -= tau * k_cell[c] * (gz[0] * g[a][0] + gz[1] * g[a][1]);
            }
        }
    }

    for term in input.interfaces {
        let trace = space.trace(term.neighbor).ok_or(FemError::NotNeighbor {
            subdomain: l,
            neighbor: term.neighbor,
        })?;
        if term.g.values.len() != trace.num_facets() {
            return Err(FemError::DofMismatch {
                expected: trace.num_facets(),
                found: term.g.values.len(),
            });
        }
        let slots = space.facet_slots(term.neighbor);
        let vals = matrix.values_mut();
        for (r, s) in trace.records.iter().zip(slots) {
            let m = tau * term.lambda * r.length / 6.0;
            vals[s[0]] += 2.0 * m;
            vals[s[1]] += m;
            vals[s[2]] += m;
            vals[s[3]] += 2.0 * m;
        }
        let pg = project_trace(trace, term.g);
        for (&v, mg) in trace.vertices.iter().zip(trace.mass_apply(&pg)) {
            rhs[v] -= tau * mg;
        }
    }

    Ok(AssembledSystem {
        matrix,
        rhs,
        constraints: input.dirichlet.to_vec(),
    })
}

/// Assembled system with Dirichlet rows eliminated.
pub fn assemble_subdomain_system(
    space: &SubdomainSpace,
    input: &SystemInputs<'_>,
) -> Result<AssembledSystem, FemError> {
    let mut sys = assemble_unconstrained(space, input)?;
    for &(dof, _) in &sys.constraints {
        if dof >= space.num_dofs() {
            return Err(FemError::DofMismatch {
                expected: space.num_dofs(),
                found: dof,
            });
        }
    }
    sys.matrix
        .constrain_symmetric(&mut sys.rhs, &sys.constraints);
    Ok(sys)
}
