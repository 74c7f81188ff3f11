//! Time stepping and the LDD iteration with double-buffered g-terms.

use std::collections::BTreeMap;

use crate::constitutive::Phase;
use crate::fem::{
    assemble_subdomain_system, reconstruct_interface_flux, FemError, InterfaceTerm, Pressures,
    QuadratureRule, SubdomainSpace, SystemInputs, TraceFieldDG1,
};
use crate::geometry::{build_partition, triangulate, Model, MultiDomainMesh};
use crate::linalg::norm2;
use crate::verify::{
    DiagnosticRow, FieldId, ManufacturedSolution, RunReport, Scenario, StepRecord,
};

use super::exec::{ExecutionMode, Executor};
use super::{GravityCoupling, LddError, StoppingNorm};

/// Pressure dofs of every subdomain; `nw[l]` is `None` on Richards
/// subdomains.
#[derive(Debug, Clone, PartialEq)]
pub struct Fields {
    pub w: Vec<Vec<f64>>,
    pub nw: Vec<Option<Vec<f64>>>,
}

impl Fields {
    pub fn pressures(&self, l: usize) -> Pressures<'_> {
        Pressures {
            w: &self.w[l],
            nw: self.nw[l].as_deref(),
        }
    }

    pub fn get(&self, phase: Phase, l: usize) -> Option<&[f64]> {
        match phase {
            Phase::Wetting => self.w.get(l).map(Vec::as_slice),
            Phase::Nonwetting => self.nw.get(l).and_then(|v| v.as_deref()),
        }
    }

    fn set(&mut self, phase: Phase, l: usize, v: Vec<f64>) {
        match phase {
            Phase::Wetting => self.w[l] = v,
            Phase::Nonwetting => self.nw[l] = Some(v),
        }
    }
}

type GKey = (Phase, usize, usize);

/// State of one time step: iterates, time-level data, g-term buffers and
/// per-step caches.
#[derive(Debug, Clone)]
pub struct IterationState {
    step: usize,
    time: f64,
    prev_time: Fields,
    current: Fields,
    g: BTreeMap<GKey, TraceFieldDG1>,
    iteration: usize,
    subsequent: Vec<Vec<f64>>,
    s_prev_qp: Vec<Vec<f64>>,
    sources: Vec<Vec<f64>>,
    dirichlet: Vec<Vec<(usize, f64)>>,
}

impl IterationState {
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Iterate `p^{n,i}` after `iteration()` iterations.
    pub fn fields(&self) -> &Fields {
        &self.current
    }

    pub fn previous_time_level(&self) -> &Fields {
        &self.prev_time
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// g-term of `phase` owned by `l` toward `k` for the latest iteration.
    pub fn g(&self, phase: Phase, l: usize, k: usize) -> Option<&TraceFieldDG1> {
        self.g.get(&(phase, l, k))
    }

    /// Subsequent errors per iteration, indexed like [`Engine::equations`].
    pub fn subsequent_errors(&self) -> &[Vec<f64>] {
        &self.subsequent
    }

    /// Replaces the current iterate; the shape must match.
    pub fn set_iterate(&mut self, fields: Fields) -> Result<(), LddError> {
        same_shape(&self.current, &fields)?;
        self.current = fields;
        Ok(())
    }

    /// Replaces an existing g-term buffer.
    pub fn set_g(
        &mut self,
        phase: Phase,
        l: usize,
        k: usize,
        g: TraceFieldDG1,
    ) -> Result<(), LddError> {
        let slot = self
            .g
            .get_mut(&(phase, l, k))
            .ok_or(FemError::MissingGTerm {
                subdomain: l,
                neighbor: k,
            })?;
        if slot.values.len() != g.values.len() {
            return Err(FemError::DofMismatch {
                expected: slot.values.len(),
                found: g.values.len(),
            }
            .into());
        }
        *slot = g;
        Ok(())
    }
}

fn same_shape(a: &Fields, b: &Fields) -> Result<(), LddError> {
    for l in 0..a.w.len() {
        for phase in Phase::ALL {
            let ok = match (a.get(phase, l), b.get(phase, l)) {
                (Some(x), Some(y)) => x.len() == y.len(),
                (None, None) => true,
                _ => false,
            };
            if !ok {
                return Err(LddError::MissingField {
                    phase,
                    subdomain: l,
                });
            }
        }
    }
    if a.w.len() != b.w.len() || a.nw.len() != b.nw.len() {
        return Err(LddError::MissingField {
            phase: Phase::Wetting,
            subdomain: b.w.len(),
        });
    }
    Ok(())
}

/// Outcome of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub subsequent_errors: Vec<f64>,
    pub linear_iterations: Vec<usize>,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Converged,
    MaxIterations,
}

impl StepStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StepStatus::Converged => "converged",
            StepStatus::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub fields: Fields,
    pub iterations: usize,
    pub status: StepStatus,
    /// Per iteration, per equation.
    pub subsequent_errors: Vec<Vec<f64>>,
    pub linear_solves: usize,
    pub diagnostics: Vec<DiagnosticRow>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub fields: Fields,
}

/// Multi-domain LDD solver for one scenario.
#[derive(Debug)]
pub struct Engine {
    scenario: Scenario,
    exact: ManufacturedSolution,
    mesh: MultiDomainMesh,
    spaces: Vec<SubdomainSpace>,
    equations: Vec<(Phase, usize)>,
    executor: Executor,
    solve_order: Vec<usize>,
    diagnostics: bool,
}

impl Engine {
    pub fn new(scenario: Scenario, mode: ExecutionMode) -> Result<Self, LddError> {
        scenario.validate()?;
        let partition = build_partition(&scenario.geometry)?;
        let mesh = triangulate(&partition, scenario.resolution)?;
        let spaces = SubdomainSpace::build_all(&mesh, &QuadratureRule::degree4())?;
        let w = mesh.num_subdomains();
        let mut equations: Vec<(Phase, usize)> = (0..w).map(|l| (Phase::Wetting, l)).collect();
        equations.extend(
            (0..w)
                .filter(|&l| mesh.model(l) == Model::TwoPhase)
                .map(|l| (Phase::Nonwetting, l)),
        );
        let solve_order = (0..equations.len()).collect();
        Ok(Self {
            exact: scenario.manufactured(),
            scenario,
            mesh,
            spaces,
            equations,
            executor: Executor::new(mode)?,
            solve_order,
            diagnostics: false,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn mesh(&self) -> &MultiDomainMesh {
        &self.mesh
    }

    pub fn spaces(&self) -> &[SubdomainSpace] {
        &self.spaces
    }

    /// Equations in canonical order: wetting on every subdomain, then
    /// nonwetting on the two-phase subdomains.
    pub fn equations(&self) -> &[(Phase, usize)] {
        &self.equations
    }

    pub fn fields_ids(&self) -> Vec<FieldId> {
        self.equations
            .iter()
            .map(|&(phase, subdomain)| FieldId { phase, subdomain })
            .collect()
    }

    /// Order in which the equations are dispatched; results do not depend
    /// on it.
    pub fn set_solve_order(&mut self, order: Vec<usize>) -> Result<(), LddError> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..self.equations.len()).collect::<Vec<_>>() {
            return Err(LddError::InvalidSolveOrder(self.equations.len()));
        }
        self.solve_order = order;
        Ok(())
    }

    /// Collect per-equation diagnostics rows in every step.
    pub fn set_diagnostics(&mut self, on: bool) {
        self.diagnostics = on;
    }

    fn model(&self, l: usize) -> Model {
        self.spaces[l].model()
    }

    /// Nodal interpolant of the exact solution at time `t`.
    pub fn exact_fields(&self, t: f64) -> Fields {
        let interp = |phase, l: usize| {
            self.spaces[l].interpolate(|x, y| self.exact.exact_pressure(phase, l, x, y, t))
        };
        Fields {
            w: (0..self.spaces.len())
                .map(|l| interp(Phase::Wetting, l))
                .collect(),
            nw: (0..self.spaces.len())
                .map(|l| (self.model(l) == Model::TwoPhase).then(|| interp(Phase::Nonwetting, l)))
                .collect(),
        }
    }

    fn check_fields(&self, f: &Fields) -> Result<(), LddError> {
        for (l, space) in self.spaces.iter().enumerate() {
            for phase in Phase::ALL {
                if phase == Phase::Nonwetting && space.model() == Model::Richards {
                    continue;
                }
                match f.get(phase, l) {
                    Some(v) if v.len() == space.num_dofs() => {}
                    _ => {
                        return Err(LddError::MissingField {
                            phase,
                            subdomain: l,
                        })
                    }
                }
            }
        }
        Ok(())
    }

    fn g_keys(&self) -> Vec<GKey> {
        let mut keys = Vec::new();
        for l in 0..self.spaces.len() {
            for &k in self.mesh.neighbors(l) {
                keys.push((Phase::Wetting, l, k));
                if self.model(l) == Model::TwoPhase || self.model(k) == Model::TwoPhase {
                    keys.push((Phase::Nonwetting, l, k));
                }
            }
        }
        keys
    }

    fn initial_g(&self, (phase, l, k): GKey, prev: &Fields) -> Result<TraceFieldDG1, LddError> {
        let space = &self.spaces[l];
        let params = &self.scenario.materials[l];
        let curves = &self.scenario.curves[l];
        let solver = &self.scenario.solver;
        let trace = space.trace(k).ok_or(FemError::NotNeighbor {
            subdomain: l,
            neighbor: k,
        })?;
        if phase == Phase::Nonwetting && self.model(l) == Model::Richards {
            let mut g = TraceFieldDG1::zeros(l, trace);
            if solver.gravity_coupling == GravityCoupling::Include {
                let gz = params.gravity_gradient(Phase::Nonwetting, solver.gravity_on);
                let p = prev.pressures(l);
                for (r, v) in trace.records.iter().zip(g.values.iter_mut()) {
                    let gn = gz[0] * r.normal[0] + gz[1] * r.normal[1];
                    for (vj, &d) in v.iter_mut().zip(&r.local_dofs) {
                        let s = curves.saturation(p.capillary(d));
                        *vj = crate::constitutive::mobility(params, curves, Phase::Nonwetting, s)
                            * gn;
                    }
                }
            }
            return Ok(g);
        }
        let p = prev.get(phase, l).ok_or(LddError::MissingField {
            phase,
            subdomain: l,
        })?;
        let mut g = reconstruct_interface_flux(
            space,
            k,
            prev.pressures(l),
            phase,
            params,
            curves,
            solver.gravity_on,
        )?;
        let lambda = solver.lambda(phase, l, k);
        for (r, v) in trace.records.iter().zip(g.values.iter_mut()) {
            for j in 0..2 {
                v[j] -= lambda * p[r.local_dofs[j]];
            }
        }
        Ok(g)
    }

    /// Sets `p^{n,0} = p^{n-1}`, the initial g-terms and the per-step caches
    /// for time step `step` (time `step τ`).
    pub fn init_time_step(&self, prev: &Fields, step: usize) -> Result<IterationState, LddError> {
        self.check_fields(prev)?;
        let t = step as f64 * self.scenario.solver.tau;
        let g = self
            .g_keys()
            .into_iter()
            .map(|key| Ok((key, self.initial_g(key, prev)?)))
            .collect::<Result<BTreeMap<_, _>, LddError>>()?;
        let s_prev_qp = self
            .spaces
            .iter()
            .enumerate()
            .map(|(l, s)| {
                s.saturation_at_qp(&self.scenario.curves[l], &prev.w[l], prev.nw[l].as_deref())
            })
            .collect();
        let sources = self
            .equations
            .iter()
            .map(|&(phase, l)| {
                self.spaces[l]
                    .quadrature_points()
                    .iter()
                    .map(|q| self.scenario.source_term(phase, l, q[0], q[1], t))
                    .collect()
            })
            .collect();
        let dirichlet = self
            .equations
            .iter()
            .map(|&(phase, l)| {
                let space = &self.spaces[l];
                space
                    .boundary_dofs()
                    .iter()
                    .map(|&v| {
                        let [x, y] = space.points()[v];
                        (v, self.exact.exact_pressure(phase, l, x, y, t))
                    })
                    .collect()
            })
            .collect();
        Ok(IterationState {
            step,
            time: t,
            prev_time: prev.clone(),
            current: prev.clone(),
            g,
            iteration: 0,
            subsequent: Vec::new(),
            s_prev_qp,
            sources,
            dirichlet,
        })
    }

    /// g-terms of iteration `i` from the iterate and g-terms of `i-1`,
    /// keyed by `(phase, owner, neighbor)`.
    pub fn next_g_terms(
        &self,
        state: &IterationState,
    ) -> Result<BTreeMap<(Phase, usize, usize), TraceFieldDG1>, LddError> {
        let solver = &self.scenario.solver;
        let mut next = BTreeMap::new();
        for (&(phase, l, k), old) in &state.g {
            let incoming = state.g.get(&(phase, k, l)).ok_or(FemError::MissingGTerm {
                subdomain: k,
                neighbor: l,
            })?;
            let trace = self.spaces[l].trace(k).ok_or(FemError::NotNeighbor {
                subdomain: l,
                neighbor: k,
            })?;
            let mut g = old.clone();
            if phase == Phase::Nonwetting
                && self.model(l) == Model::TwoPhase
                && self.model(k) == Model::Richards
            {
                for (v, w) in g.values.iter_mut().zip(&incoming.values) {
                    *v = [-w[0], -w[1]];
                }
            } else {
                let lambda = solver.lambda(phase, l, k);
                let pk = state.current.get(phase, k).ok_or(LddError::MissingField {
                    phase,
                    subdomain: k,
                })?;
                for ((v, w), r) in g
                    .values
                    .iter_mut()
                    .zip(&incoming.values)
                    .zip(&trace.records)
                {
                    for j in 0..2 {
                        v[j] = -2.0 * lambda * pk[r.neighbor_dofs[j]] - w[j];
                    }
                }
            }
            next.insert((phase, l, k), g);
        }
        Ok(next)
    }

    fn solve_equation(
        &self,
        state: &IterationState,
        g: &BTreeMap<GKey, TraceFieldDG1>,
        eq: usize,
    ) -> Result<(Vec<f64>, usize), LddError> {
        let (phase, l) = self.equations[eq];
        let space = &self.spaces[l];
        let solver = &self.scenario.solver;
        let terms: Vec<InterfaceTerm<'_>> = space
            .neighbors()
            .map(|k| InterfaceTerm {
                neighbor: k,
                lambda: solver.lambda(phase, l, k),
                g: &g[&(phase, l, k)],
            })
            .collect();
        let inputs = SystemInputs {
            phase,
            params: &self.scenario.materials[l],
            curves: &self.scenario.curves[l],
            l_weight: solver.l_weight(phase, l),
            tau: solver.tau,
            gravity_on: solver.gravity_on,
            prev_iterate: state.current.pressures(l),
            prev_time_saturation: &state.s_prev_qp[l],
            source: &state.sources[eq],
            interfaces: &terms,
            dirichlet: &state.dirichlet[eq],
        };
        let sys =
            assemble_subdomain_system(space, &inputs).map_err(|source| LddError::Assembly {
                phase,
                subdomain: l,
                source,
            })?;
        let x0 = state.current.get(phase, l);
        let out = solver
            .linear
            .solve(&sys.matrix, &sys.rhs, x0)
            .map_err(|source| LddError::LinearSolve {
                phase,
                subdomain: l,
                source,
            })?;
        if !out.converged {
            log::warn!(
                "linear solve for {} on subdomain {} stopped at relative residual {:e}",
                phase.tag(),
                l + 1,
                out.relative_residual
            );
        }
        Ok((out.x, out.iterations))
    }

    fn distance(&self, l: usize, a: &[f64], b: &[f64]) -> f64 {
        match self.scenario.solver.stopping_norm {
            StoppingNorm::L2 => self.spaces[l].l2_distance(a, b),
            StoppingNorm::Euclidean => {
                norm2(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
            }
        }
    }

    /// One LDD iteration: exchange g-terms from the `i-1` snapshot, then
    /// solve every equation independently.
    pub fn ldd_iteration(&self, state: &mut IterationState) -> Result<IterationRecord, LddError> {
        let g = self.next_g_terms(state)?;
        let results = self
            .executor
            .map(&self.solve_order, |eq| self.solve_equation(state, &g, eq));
        let mut next = state.current.clone();
        let mut errors = Vec::with_capacity(results.len());
        let mut linear = Vec::with_capacity(results.len());
        for (&(phase, l), r) in self.equations.iter().zip(results) {
            let (x, its) = r?;
            let old = state.current.get(phase, l).ok_or(LddError::MissingField {
                phase,
                subdomain: l,
            })?;
            errors.push(self.distance(l, &x, old));
            linear.push(its);
            next.set(phase, l, x);
        }
        state.current = next;
        state.g = g;
        state.iteration += 1;
        state.subsequent.push(errors.clone());
        let eps = self.scenario.solver.epsilon;
        Ok(IterationRecord {
            iteration: state.iteration,
            converged: errors.iter().all(|&e| e < eps),
            subsequent_errors: errors,
            linear_iterations: linear,
        })
    }

    /// Iterates until every subsequent error is below `ε` or the iteration
    /// limit is reached.
    pub fn run_time_step(&self, state: &mut IterationState) -> Result<StepOutcome, LddError> {
        let max = self.scenario.solver.max_iterations;
        let mut status = StepStatus::MaxIterations;
        let mut linear_solves = 0;
        let mut diagnostics = Vec::new();
        while state.iteration < max {
            let rec = self.ldd_iteration(state)?;
            linear_solves += rec.linear_iterations.len();
            if self.diagnostics {
                for (&(phase, subdomain), (&err, &its)) in self
                    .equations
                    .iter()
                    .zip(rec.subsequent_errors.iter().zip(&rec.linear_iterations))
                {
                    diagnostics.push(DiagnosticRow {
                        step: state.step,
                        iteration: rec.iteration,
                        field: FieldId { phase, subdomain },
                        subsequent_error: err,
                        linear_iterations: its,
                    });
                }
            }
            if rec.converged {
                status = StepStatus::Converged;
                break;
            }
        }
        if status == StepStatus::MaxIterations {
            log::warn!(
                "time step {} did not reach the stopping criterion in {} iterations",
                state.step,
                max
            );
        }
        Ok(StepOutcome {
            fields: state.current.clone(),
            iterations: state.iteration,
            status,
            subsequent_errors: state.subsequent.clone(),
            linear_solves,
            diagnostics,
        })
    }

    /// Relative L² error per field (absolute where the exact norm vanishes).
    pub fn relative_errors(&self, fields: &Fields, t: f64) -> Vec<f64> {
        self.equations
            .iter()
            .map(|&(phase, l)| {
                let space = &self.spaces[l];
                let u = fields.get(phase, l).unwrap_or(&[]);
                let exact = |x: f64, y: f64| self.exact.exact_pressure(phase, l, x, y, t);
                let err = space.l2_error(u, exact);
                let norm = space.l2_norm_of(exact);
                if norm > 0.0 {
                    err / norm
                } else {
                    err
                }
            })
            .collect()
    }

    /// `‖p_{α,l} - p_{α,k}‖_{L²(Γ_lk)}`.
    pub fn interface_jump(&self, fields: &Fields, phase: Phase, l: usize, k: usize) -> Option<f64> {
        let (a, b) = (fields.get(phase, l)?, fields.get(phase, k)?);
        let trace = self.spaces[l].trace(k)?;
        let sq: f64 = trace
            .records
            .iter()
            .map(|r| {
                let d0 = a[r.local_dofs[0]] - b[r.neighbor_dofs[0]];
                let d1 = a[r.local_dofs[1]] - b[r.neighbor_dofs[1]];
                r.length / 3.0 * (d0 * d0 + d0 * d1 + d1 * d1)
            })
            .sum();
        Some(sq.sqrt())
    }

    /// `‖p_{α,l}‖_{L²(Γ_lk)}`.
    pub fn trace_norm(&self, fields: &Fields, phase: Phase, l: usize, k: usize) -> Option<f64> {
        let a = fields.get(phase, l)?;
        let trace = self.spaces[l].trace(k)?;
        let sq: f64 = trace
            .records
            .iter()
            .map(|r| {
                let (v0, v1) = (a[r.local_dofs[0]], a[r.local_dofs[1]]);
                r.length / 3.0 * (v0 * v0 + v0 * v1 + v1 * v1)
            })
            .sum();
        Some(sq.sqrt())
    }

    /// Runs `steps` time steps from the interpolated exact solution at `t = 0`.
    pub fn run_steps(&self, steps: usize) -> Result<RunOutcome, LddError> {
        let mut fields = self.exact_fields(0.0);
        let mut report = RunReport::new(&self.scenario.name, self.fields_ids());
        for n in 1..=steps {
            let mut state = self.init_time_step(&fields, n)?;
            let out = self.run_time_step(&mut state)?;
            let rel = self.relative_errors(&out.fields, state.time);
            report.steps.push(StepRecord {
                step: n,
                time: state.time,
                iterations: out.iterations,
                status: out.status,
                relative_errors: rel,
                subsequent_errors: out.subsequent_errors,
                linear_solves: out.linear_solves,
                diagnostics: out.diagnostics,
            });
            fields = out.fields;
        }
        Ok(RunOutcome { report, fields })
    }

    /// Runs the scenario's configured number of steps.
    pub fn run_simulation(&self) -> Result<RunOutcome, LddError> {
        self.run_steps(self.scenario.solver.steps)
    }
}
