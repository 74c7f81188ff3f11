//! Precomputed P1 data of one subdomain: geometry factors, quadrature
//! points, sparsity pattern, mass matrix and interface traces.

use std::collections::BTreeMap;

use crate::constitutive::ConstitutiveCurves;
use crate::geometry::{Model, MultiDomainMesh, Point, TraceRecord};
use crate::linalg::SparseMatrix;

use super::{FemError, QuadratureRule};

/// Trace of subdomain `l` on its interface with one neighbour.
#[derive(Debug, Clone)]
pub struct InterfaceTrace {
    pub neighbor: usize,
    pub records: Vec<TraceRecord>,
    /// Distinct local dofs on the interface, sorted.
    pub vertices: Vec<usize>,
    /// Per record, positions of its two endpoints in `vertices`.
    pub endpoints: Vec<[usize; 2]>,
    /// Storage positions of the facet mass entries `[aa, ab, ba, bb]`.
    slots: Vec<[usize; 4]>,
}

impl InterfaceTrace {
    pub fn num_facets(&self) -> usize {
        self.records.len()
    }

    /// `M_Γ v` for a vector of trace values indexed like `vertices`;
    /// result indexed like `vertices`.
    pub fn mass_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.vertices.len()];
        for (r, e) in self.records.iter().zip(&self.endpoints) {
            let m = r.length / 6.0;
            out[e[0]] += m * (2.0 * v[e[0]] + v[e[1]]);
            out[e[1]] += m * (v[e[0]] + 2.0 * v[e[1]]);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SubdomainSpace {
    index: usize,
    model: Model,
    points: Vec<Point>,
    cells: Vec<[usize; 3]>,
    area: Vec<f64>,
    grads: Vec<[[f64; 2]; 3]>,
    rule: QuadratureRule,
    qp_coords: Vec<Point>,
    pattern: SparseMatrix,
    cell_slots: Vec<[usize; 9]>,
    mass: SparseMatrix,
    boundary_dofs: Vec<usize>,
    traces: BTreeMap<usize, InterfaceTrace>,
    h: f64,
}

fn cell_geometry(p: [Point; 3]) -> (f64, [[f64; 2]; 3]) {
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let g = [
        [(p[1][1] - p[2][1]) / det, (p[2][0] - p[1][0]) / det],
        [(p[2][1] - p[0][1]) / det, (p[0][0] - p[2][0]) / det],
        [(p[0][1] - p[1][1]) / det, (p[1][0] - p[0][0]) / det],
    ];
    (0.5 * det.abs(), g)
}

impl SubdomainSpace {
    pub fn new(mesh: &MultiDomainMesh, l: usize, rule: QuadratureRule) -> Result<Self, FemError> {
        let sub = mesh.submesh(l);
        let n = sub.num_dofs();
        let points: Vec<Point> = (0..n).map(|v| mesh.local_point(l, v)).collect();
        let mut area = Vec::with_capacity(sub.cells.len());
        let mut grads = Vec::with_capacity(sub.cells.len());
        let mut qp_coords = Vec::with_capacity(sub.cells.len() * rule.len());
        let mut rows = vec![Vec::new(); n];
        for tri in &sub.cells {
            let p = [points[tri[0]], points[tri[1]], points[tri[2]]];
            let (a, g) = cell_geometry(p);
            area.push(a);
            grads.push(g);
            for b in rule.points() {
                qp_coords.push([
                    b[0] * p[0][0] + b[1] * p[1][0] + b[2] * p[2][0],
                    b[0] * p[0][1] + b[1] * p[1][1] + b[2] * p[2][1],
                ]);
            }
            for &i in tri {
                rows[i].extend_from_slice(tri);
            }
        }
        let pattern = SparseMatrix::from_pattern(n, n, &rows)?;
        let mut cell_slots = Vec::with_capacity(sub.cells.len());
        for tri in &sub.cells {
            let mut s = [0; 9];
            for a in 0..3 {
                for b in 0..3 {
                    s[3 * a + b] = pattern
                        .position(tri[a], tri[b])
                        .expect("cell entry in pattern");
                }
            }
            cell_slots.push(s);
        }
        let mut mass = pattern.clone();
        for (c, s) in cell_slots.iter().enumerate() {
            let m = area[c] / 12.0;
            for a in 0..3 {
                for b in 0..3 {
                    mass.values_mut()[s[3 * a + b]] += if a == b { 2.0 * m } else { m };
                }
            }
        }

        let mut traces = BTreeMap::new();
        for &k in mesh.neighbors(l) {
            let records = mesh.interface_trace_map(l, k)?;
            let mut vertices: Vec<usize> = records.iter().flat_map(|r| r.local_dofs).collect();
            vertices.sort_unstable();
            vertices.dedup();
            let pos = |v: usize| vertices.binary_search(&v).expect("trace vertex");
            let endpoints = records
                .iter()
                .map(|r| [pos(r.local_dofs[0]), pos(r.local_dofs[1])])
                .collect();
            let slots = records
                .iter()
                .map(|r| {
                    let [a, b] = r.local_dofs;
                    let at = |i, j| {
                        pattern.position(i, j).ok_or(FemError::MalformedTrace {
                            subdomain: l,
                            neighbor: k,
                        })
                    };
                    Ok([at(a, a)?, at(a, b)?, at(b, a)?, at(b, b)?])
                })
                .collect::<Result<_, FemError>>()?;
            traces.insert(
                k,
                InterfaceTrace {
                    neighbor: k,
                    records,
                    vertices,
                    endpoints,
                    slots,
                },
            );
        }

        Ok(Self {
            index: l,
            model: mesh.model(l),
            points,
            cells: sub.cells.clone(),
            area,
            grads,
            rule,
            qp_coords,
            pattern,
            cell_slots,
            mass,
            boundary_dofs: sub.boundary_dofs.clone(),
            traces,
            h: sub.h,
        })
    }

    /// Spaces for every subdomain of the mesh.
    pub fn build_all(mesh: &MultiDomainMesh, rule: &QuadratureRule) -> Result<Vec<Self>, FemError> {
        (0..mesh.num_subdomains())
            .map(|l| Self::new(mesh, l, rule.clone()))
            .collect()
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn num_dofs(&self) -> usize {
        self.points.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        self.area[c]
    }

    pub fn area(&self) -> f64 {
        self.area.iter().sum()
    }

    /// Gradients of the three barycentric basis functions of cell `c`.
    pub fn cell_gradients(&self, c: usize) -> &[[f64; 2]; 3] {
        &self.grads[c]
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Physical quadrature points, cell-major.
    pub fn quadrature_points(&self) -> &[Point] {
        &self.qp_coords
    }

    pub fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    pub fn pattern(&self) -> &SparseMatrix {
        &self.pattern
    }

    pub(crate) fn cell_slots(&self, c: usize) -> &[usize; 9] {
        &self.cell_slots[c]
    }

    pub(crate) fn facet_slots(&self, k: usize) -> &[[usize; 4]] {
        &self.traces[&k].slots
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn neighbors(&self) -> impl Iterator<Item = usize> + '_ {
        self.traces.keys().copied()
    }

    pub fn trace(&self, k: usize) -> Option<&InterfaceTrace> {
        self.traces.get(&k)
    }

    pub fn traces(&self) -> impl Iterator<Item = &InterfaceTrace> {
        self.traces.values()
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.points.iter().map(|p| f(p[0], p[1])).collect()
    }

    /// Values of a P1 field at the quadrature points.
    pub fn values_at_qp(&self, u: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.qp_coords.len());
        for tri in &self.cells {
            let (a, b, c) = (u[tri[0]], u[tri[1]], u[tri[2]]);
            for p in self.rule.points() {
                out.push(p[0] * a + p[1] * b + p[2] * c);
            }
        }
        out
    }

    /// Wetting saturation at the quadrature points from interpolated phase
    /// pressures; a missing nonwetting field means `p_nw = 0`.
    pub fn saturation_at_qp(
        &self,
        curves: &ConstitutiveCurves,
        p_w: &[f64],
        p_nw: Option<&[f64]>,
    ) -> Vec<f64> {
        let w = self.values_at_qp(p_w);
        match p_nw {
            Some(p_nw) => {
                let nw = self.values_at_qp(p_nw);
                w.iter()
                    .zip(&nw)
                    .map(|(pw, pn)| curves.saturation(pn - pw))
                    .collect()
            }
            None => w.iter().map(|pw| curves.saturation(-pw)).collect(),
        }
    }

    /// `∫ u φ_a` for a function sampled at the quadrature points.
    pub fn load_vector(&self, f_qp: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_dofs()];
        let nq = self.rule.len();
        for (c, tri) in self.cells.iter().enumerate() {
            let mut acc = [0.0; 3];
            for (q, (p, w)) in self
                .rule
                .points()
                .iter()
                .zip(self.rule.weights())
                .enumerate()
            {
                let v = w * f_qp[c * nq + q];
                for a in 0..3 {
                    acc[a] += v * p[a];
                }
            }
            for a in 0..3 {
                out[tri[a]] += self.area[c] * acc[a];
            }
        }
        out
    }

    /// `∫_cell u` per cell for a function sampled at the quadrature points.
    pub fn cell_integrals(&self, f_qp: &[f64]) -> Vec<f64> {
        let nq = self.rule.len();
        (0..self.cells.len())
            .map(|c| {
                let s: f64 = self
                    .rule
                    .weights()
                    .iter()
                    .enumerate()
                    .map(|(q, w)| w * f_qp[c * nq + q])
                    .sum();
                self.area[c] * s
            })
            .collect()
    }

    pub fn l2_norm(&self, u: &[f64]) -> f64 {
        let uq = self.values_at_qp(u);
        self.cell_integrals(&uq.iter().map(|v| v * v).collect::<Vec<_>>())
            .iter()
            .sum::<f64>()
            .sqrt()
    }

    /// `‖u - exact‖_{L²}` with the space's quadrature.
    pub fn l2_error(&self, u: &[f64], exact: impl Fn(f64, f64) -> f64) -> f64 {
        let uq = self.values_at_qp(u);
        let d: Vec<f64> = uq
            .iter()
            .zip(&self.qp_coords)
            .map(|(v, p)| {
                let e = v - exact(p[0], p[1]);
                e * e
            })
            .collect();
        self.cell_integrals(&d).iter().sum::<f64>().sqrt()
    }

    /// `‖exact‖_{L²}`.
    pub fn l2_norm_of(&self, exact: impl Fn(f64, f64) -> f64) -> f64 {
        let d: Vec<f64> = self
            .qp_coords
            .iter()
            .map(|p| exact(p[0], p[1]).powi(2))
            .collect();
        self.cell_integrals(&d).iter().sum::<f64>().sqrt()
    }

    /// `‖a - b‖_{L²}` for two P1 fields, via the mass matrix.
    pub fn l2_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let md = self.mass.mul_vec(&d);
        crate::linalg::dot(&d, &md).max(0.0).sqrt()
    }
}
