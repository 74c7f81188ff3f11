#![allow(clippy::needless_range_loop)]

use ldd_core::constitutive::{ConstitutiveCurves, MaterialParams, Phase};
use ldd_core::fem::{
    assemble_subdomain_system, assemble_unconstrained, project_trace, reconstruct_interface_flux,
    FemError, InterfaceTerm, P1Field, Pressures, QuadratureRule, SubdomainSpace, SystemInputs,
    TraceFieldDG1,
};
use ldd_core::geometry::{
    build_partition, triangulate, Model, MultiDomainMesh, PartitionSpec, SubdomainSpec,
};
use ldd_core::verify::preset;
use nalgebra::DMatrix;

fn mesh(spec: &PartitionSpec, r: usize) -> MultiDomainMesh {
    triangulate(&build_partition(spec).unwrap(), r).unwrap()
}

fn unit_mobility() -> MaterialParams {
    MaterialParams::water_air(0.3, 1.0)
}

struct Inputs {
    s_prev: Vec<f64>,
    source: Vec<f64>,
}

impl Inputs {
    fn zero(space: &SubdomainSpace) -> Self {
        let n = space.quadrature_points().len();
        Self {
            s_prev: vec![1.0; n],
            source: vec![0.0; n],
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn system<'a>(
    params: &'a MaterialParams,
    curves: &'a ConstitutiveCurves,
    l_weight: f64,
    tau: f64,
    p: Pressures<'a>,
    data: &'a Inputs,
    interfaces: &'a [InterfaceTerm<'a>],
    dirichlet: &'a [(usize, f64)],
) -> SystemInputs<'a> {
    SystemInputs {
        phase: Phase::Wetting,
        params,
        curves,
        l_weight,
        tau,
        gravity_on: false,
        prev_iterate: p,
        prev_time_saturation: &data.s_prev,
        source: &data.source,
        interfaces,
        dirichlet,
    }
}

fn reference_triangle() -> SubdomainSpace {
    let spec = PartitionSpec::single(vec![[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]], Model::Richards);
    let m = mesh(&spec, 1);
    SubdomainSpace::new(&m, 0, QuadratureRule::degree4()).unwrap()
}

#[test]
fn reference_element_stiffness_and_mass() {
    let space = reference_triangle();
    assert_eq!(space.num_dofs(), 3);
    let (params, curves) = (unit_mobility(), ConstitutiveCurves::power(2.0));
    let p = vec![1.0; 3];
    let data = Inputs::zero(&space);
    let right = space
        .points()
        .iter()
        .position(|q| *q == [0.0, 1.0])
        .unwrap();
    let k = assemble_unconstrained(
        &space,
        &system(
            &params,
            &curves,
            0.0,
            1.0,
            Pressures { w: &p, nw: None },
            &data,
            &[],
            &[],
        ),
    )
    .unwrap()
    .matrix
    .to_dense();
    for i in 0..3 {
        for j in 0..3 {
            let expected = match (i == right, j == right, i == j) {
                (true, true, _) => 1.0,
                (_, _, true) => 0.5,
                (true, false, _) | (false, true, _) => -0.5,
                _ => 0.0,
            };
            assert!(
                (k[i][j] - expected).abs() < 1e-14,
                "K[{i}][{j}] = {}",
                k[i][j]
            );
        }
    }
    let m = assemble_unconstrained(
        &space,
        &system(
            &params,
            &curves,
            1.0,
            0.0,
            Pressures { w: &p, nw: None },
            &data,
            &[],
            &[],
        ),
    )
    .unwrap()
    .matrix
    .to_dense();
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { 2.0 / 24.0 } else { 1.0 / 24.0 };
            assert!((m[i][j] - expected).abs() < 1e-15);
        }
    }
}

fn diagonal_split() -> MultiDomainMesh {
    let spec = PartitionSpec {
        global_polygon: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        subdomains: vec![
            SubdomainSpec {
                polygon: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]],
                model: Model::Richards,
            },
            SubdomainSpec {
                polygon: vec![[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
                model: Model::Richards,
            },
        ],
    };
    mesh(&spec, 1)
}

#[test]
fn interface_block_is_the_facet_mass() {
    let m = diagonal_split();
    let space = SubdomainSpace::new(&m, 0, QuadratureRule::degree4()).unwrap();
    let trace = space.trace(1).unwrap();
    assert_eq!(trace.num_facets(), 1);
    let h = trace.records[0].length;
    assert!((h - 2f64.sqrt()).abs() < 1e-15);
    let (params, curves) = (unit_mobility(), ConstitutiveCurves::power(2.0));
    let p = vec![1.0; space.num_dofs()];
    let data = Inputs::zero(&space);
    let g = TraceFieldDG1::zeros(0, trace);
    let with = |lambda| {
        let terms = [InterfaceTerm {
            neighbor: 1,
            lambda,
            g: &g,
        }];
        assemble_unconstrained(
            &space,
            &system(
                &params,
                &curves,
                0.0,
                1.0,
                Pressures { w: &p, nw: None },
                &data,
                &terms,
                &[],
            ),
        )
        .unwrap()
        .matrix
        .to_dense()
    };
    let (a, b) = (with(0.75), with(0.0));
    let [u, v] = trace.records[0].local_dofs;
    for i in 0..3 {
        for j in 0..3 {
            let on = [i, j].iter().all(|x| *x == u || *x == v);
            let expected = if !on {
                0.0
            } else if i == j {
                0.75 * h / 6.0 * 2.0
            } else {
                0.75 * h / 6.0
            };
            assert!((a[i][j] - b[i][j] - expected).abs() < 1e-15);
        }
    }
}

#[test]
fn assembly_errors() {
    let m = diagonal_split();
    let space = SubdomainSpace::new(&m, 0, QuadratureRule::degree4()).unwrap();
    let (params, curves) = (unit_mobility(), ConstitutiveCurves::power(2.0));
    let p = vec![1.0; space.num_dofs()];
    let data = Inputs::zero(&space);
    let missing = assemble_unconstrained(
        &space,
        &system(
            &params,
            &curves,
            1.0,
            1.0,
            Pressures { w: &p, nw: None },
            &data,
            &[],
            &[],
        ),
    );
    assert!(matches!(
        missing,
        Err(FemError::MissingGTerm {
            subdomain: 0,
            neighbor: 1
        })
    ));
    let g = TraceFieldDG1::zeros(0, space.trace(1).unwrap());
    let terms = [InterfaceTerm {
        neighbor: 1,
        lambda: 1.0,
        g: &g,
    }];
    let mut inputs = system(
        &params,
        &curves,
        1.0,
        1.0,
        Pressures {
            w: &p,
            nw: Some(&p),
        },
        &data,
        &terms,
        &[],
    );
    inputs.phase = Phase::Nonwetting;
    assert!(matches!(
        assemble_unconstrained(&space, &inputs),
        Err(FemError::PhaseModelMismatch { subdomain: 0 })
    ));
    let short = vec![1.0; 2];
    let bad = system(
        &params,
        &curves,
        1.0,
        1.0,
        Pressures {
            w: &short,
            nw: None,
        },
        &data,
        &terms,
        &[],
    );
    assert!(matches!(
        assemble_unconstrained(&space, &bad),
        Err(FemError::DofMismatch { .. })
    ));
    assert!(P1Field::from_values(&space, short).is_err());
}

#[test]
fn patch_test_reproduces_linear_pressure() {
    let spec = PartitionSpec::single(
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        Model::Richards,
    );
    let m = mesh(&spec, 6);
    let space = SubdomainSpace::new(&m, 0, QuadratureRule::degree4()).unwrap();
    let exact = |x: f64, y: f64| 2.0 + x + 0.5 * y;
    let p = space.interpolate(exact);
    let (params, curves) = (unit_mobility(), ConstitutiveCurves::power(2.0));
    let data = Inputs {
        s_prev: space.saturation_at_qp(&curves, &p, None),
        source: vec![0.0; space.quadrature_points().len()],
    };
    let dirichlet: Vec<(usize, f64)> = space.boundary_dofs().iter().map(|&v| (v, p[v])).collect();
    let sys = assemble_subdomain_system(
        &space,
        &system(
            &params,
            &curves,
            0.01,
            1e-3,
            Pressures { w: &p, nw: None },
            &data,
            &[],
            &dirichlet,
        ),
    )
    .unwrap();
    let n = p.len();
    let a = DMatrix::from_fn(n, n, |i, j| sys.matrix.get(i, j));
    let x = a.lu().solve(&nalgebra::DVector::from_vec(sys.rhs)).unwrap();
    for (a, b) in x.iter().zip(&p) {
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }
}

#[test]
fn assembled_matrices_are_symmetric_positive_definite() {
    for name in ["fig3-homogeneous", "fig4-heterogeneous", "fig8-fivedomain"] {
        let mut s = preset(name).unwrap();
        s.resolution = if name == "fig8-fivedomain" { 12 } else { 14 };
        s.solver.gravity_on = true;
        let e = ldd_core::ldd::Engine::new(s.clone(), ldd_core::ldd::ExecutionMode::Sequential)
            .unwrap();
        let fields = e.exact_fields(0.3);
        let state = e.init_time_step(&fields, 1).unwrap();
        for &(phase, l) in e.equations() {
            let space = &e.spaces()[l];
            assert!(space.num_dofs() <= 500);
            let gs: Vec<TraceFieldDG1> = space
                .neighbors()
                .map(|k| state.g(phase, l, k).unwrap().clone())
                .collect();
            let terms: Vec<InterfaceTerm> = space
                .neighbors()
                .zip(&gs)
                .map(|(k, g)| InterfaceTerm {
                    neighbor: k,
                    lambda: s.solver.lambda(phase, l, k),
                    g,
                })
                .collect();
            let data = Inputs {
                s_prev: space.saturation_at_qp(&s.curves[l], &fields.w[l], fields.nw[l].as_deref()),
                source: vec![0.0; space.quadrature_points().len()],
            };
            let dirichlet: Vec<(usize, f64)> =
                space.boundary_dofs().iter().map(|&v| (v, 0.0)).collect();
            let mut inputs = system(
                &s.materials[l],
                &s.curves[l],
                s.solver.l_weight(phase, l),
                s.solver.tau,
                fields.pressures(l),
                &data,
                &terms,
                &dirichlet,
            );
            inputs.phase = phase;
            inputs.gravity_on = true;
            let raw = assemble_unconstrained(space, &inputs).unwrap();
            assert!(raw.matrix.symmetry_defect() < 1e-12);
            let sys = assemble_subdomain_system(space, &inputs).unwrap();
            assert!(sys.matrix.symmetry_defect() < 1e-12);
            let n = space.num_dofs();
            let dense = DMatrix::from_fn(n, n, |i, j| sys.matrix.get(i, j));
            assert!(dense.cholesky().is_some(), "{name} {phase:?} {l}");
        }
    }
}

#[test]
fn quadrature_degree_does_not_matter() {
    let s = preset("fig3-homogeneous").unwrap();
    let m = mesh(&s.geometry, 8);
    let exact = s.manufactured();
    let t = 0.5;
    let assemble = |rule: QuadratureRule| {
        let mut out = Vec::new();
        for l in 0..2 {
            let space = SubdomainSpace::new(&m, l, rule.clone()).unwrap();
            let w = space.interpolate(|x, y| exact.exact_pressure(Phase::Wetting, l, x, y, t));
            let nw = (l == 1).then(|| {
                space.interpolate(|x, y| exact.exact_pressure(Phase::Nonwetting, l, x, y, t))
            });
            let p = Pressures {
                w: &w,
                nw: nw.as_deref(),
            };
            let p0 = space.interpolate(|x, y| exact.exact_pressure(Phase::Wetting, l, x, y, 0.0));
            let n0 = (l == 1).then(|| {
                space.interpolate(|x, y| exact.exact_pressure(Phase::Nonwetting, l, x, y, 0.0))
            });
            let phases: &[Phase] = if l == 1 {
                &Phase::ALL
            } else {
                &[Phase::Wetting]
            };
            for &phase in phases {
                let data = Inputs {
                    s_prev: space.saturation_at_qp(&s.curves[l], &p0, n0.as_deref()),
                    source: space
                        .quadrature_points()
                        .iter()
                        .map(|q| s.source_term(phase, l, q[0], q[1], t))
                        .collect(),
                };
                let g = TraceFieldDG1::constant(l, space.trace(1 - l).unwrap(), -1.0);
                let terms = [InterfaceTerm {
                    neighbor: 1 - l,
                    lambda: 0.75,
                    g: &g,
                }];
                let mut inputs = system(
                    &s.materials[l],
                    &s.curves[l],
                    s.solver.l_weight(phase, l),
                    s.solver.tau,
                    p,
                    &data,
                    &terms,
                    &[],
                );
                inputs.phase = phase;
                let sys = assemble_unconstrained(&space, &inputs).unwrap();
                out.push((sys.matrix.values().to_vec(), sys.rhs));
            }
        }
        out
    };
    let a = assemble(QuadratureRule::degree4());
    let b = assemble(QuadratureRule::degree6());
    assert_eq!(QuadratureRule::degree6().degree(), 6);
    for ((ma, ra), (mb, rb)) in a.iter().zip(&b) {
        let scale = ma.iter().fold(0.0f64, |x, v| x.max(v.abs()));
        for (x, y) in ma.iter().zip(mb) {
            assert!((x - y).abs() <= 1e-8 * scale, "{x} {y}");
        }
        let scale = ra.iter().fold(0.0f64, |x, v| x.max(v.abs()));
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).abs() <= 1e-8 * scale, "{x} {y}");
        }
    }
}

#[test]
fn flux_of_linear_pressure() {
    let m = mesh(&PartitionSpec::two_domain(), 1);
    let space = SubdomainSpace::new(&m, 0, QuadratureRule::degree4()).unwrap();
    let (params, curves) = (unit_mobility(), ConstitutiveCurves::power(2.0));
    let p = space.interpolate(|_, y| y);
    let trace = space.trace(1).unwrap();
    assert!(trace.records.iter().all(|r| r.normal == [0.0, -1.0]));
    let f = reconstruct_interface_flux(
        &space,
        1,
        Pressures { w: &p, nw: None },
        Phase::Wetting,
        &params,
        &curves,
        false,
    )
    .unwrap();
    assert!(f.values.iter().flatten().all(|&v| (v - 1.0).abs() < 1e-14));

    let c = vec![5.0; space.num_dofs()];
    let f = reconstruct_interface_flux(
        &space,
        1,
        Pressures { w: &c, nw: None },
        Phase::Wetting,
        &params,
        &curves,
        false,
    )
    .unwrap();
    assert!(f.values.iter().flatten().all(|&v| v == 0.0));
    let f = reconstruct_interface_flux(
        &space,
        1,
        Pressures { w: &c, nw: None },
        Phase::Wetting,
        &params,
        &curves,
        true,
    )
    .unwrap();
    let expected = 997.0 * 9.81;
    assert!(f
        .values
        .iter()
        .flatten()
        .all(|&v| (v - expected).abs() < 1e-9));
}

#[test]
fn manufactured_flux_converges_at_first_order() {
    let s = preset("fig3-homogeneous").unwrap();
    let exact = s.manufactured();
    let worst = |r: usize| {
        let m = mesh(&s.geometry, r);
        let mut worst: f64 = 0.0;
        for l in 0..2 {
            let space = SubdomainSpace::new(&m, l, QuadratureRule::degree4()).unwrap();
            let w = space.interpolate(|x, y| exact.exact_pressure(Phase::Wetting, l, x, y, 0.0));
            let nw = (l == 1).then(|| {
                space.interpolate(|x, y| exact.exact_pressure(Phase::Nonwetting, l, x, y, 0.0))
            });
            let f = reconstruct_interface_flux(
                &space,
                1 - l,
                Pressures {
                    w: &w,
                    nw: nw.as_deref(),
                },
                Phase::Wetting,
                &s.materials[l],
                &s.curves[l],
                false,
            )
            .unwrap();
            let trace = space.trace(1 - l).unwrap();
            for (rec, v) in trace.records.iter().zip(&f.values) {
                let [a, b] = rec.local_dofs;
                let mid = [
                    (space.points()[a][0] + space.points()[b][0]) / 2.0,
                    (space.points()[a][1] + space.points()[b][1]) / 2.0,
                ];
                let jet = exact.expression(Phase::Wetting, l).jet(mid[0], mid[1], 0.0);
                let pc =
                    exact.exact_pressure(Phase::Nonwetting, l, mid[0], mid[1], 0.0) - jet.value;
                let k = ldd_core::constitutive::mobility(
                    &s.materials[l],
                    &s.curves[l],
                    Phase::Wetting,
                    s.curves[l].saturation(pc),
                );
                let analytic = -k * (jet.grad[0] * rec.normal[0] + jet.grad[1] * rec.normal[1]);
                worst = worst.max((0.5 * (v[0] + v[1]) - analytic).abs());
            }
        }
        worst
    };
    let (coarse, fine) = (worst(10), worst(20));
    assert!(
        coarse < 0.05 && fine < 0.5 * coarse * 1.2,
        "{coarse} {fine}"
    );
}

#[test]
fn projection_of_trace_values() {
    let m = mesh(&PartitionSpec::two_domain(), 2);
    let space = SubdomainSpace::new(&m, 1, QuadratureRule::degree4()).unwrap();
    let trace = space.trace(0).unwrap();
    assert_eq!(trace.num_facets(), 2);
    let pg = project_trace(trace, &TraceFieldDG1::constant(1, trace, 4.5));
    assert!(pg.iter().all(|&v| v == 4.5));

    let shared = trace
        .vertices
        .iter()
        .position(|&v| space.points()[v] == [0.5, 0.0])
        .unwrap();
    let mut g = TraceFieldDG1::zeros(1, trace);
    let mut val = 1.0;
    for (e, v) in trace.endpoints.iter().zip(g.values.iter_mut()) {
        for j in 0..2 {
            if e[j] == shared {
                v[j] = val;
            }
        }
        val += 2.0;
    }
    assert_eq!(project_trace(trace, &g)[shared], 2.0);

    let lin = |x: f64| 3.0 - 2.0 * x;
    let mut g = TraceFieldDG1::zeros(1, trace);
    for (r, v) in trace.records.iter().zip(g.values.iter_mut()) {
        *v = [
            lin(space.points()[r.local_dofs[0]][0]),
            lin(space.points()[r.local_dofs[1]][0]),
        ];
    }
    for (i, &v) in trace.vertices.iter().enumerate() {
        assert!((project_trace(trace, &g)[i] - lin(space.points()[v][0])).abs() < 1e-15);
    }
}

#[test]
fn norms_on_the_unit_square() {
    let spec = PartitionSpec::single(
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        Model::Richards,
    );
    let m = mesh(&spec, 4);
    let space = SubdomainSpace::new(&m, 0, QuadratureRule::degree4()).unwrap();
    assert!((space.area() - 1.0).abs() < 1e-15);
    let two = P1Field::interpolate(&space, |_, _| 2.0);
    assert!((space.l2_norm(&two.values) - 2.0).abs() < 1e-14);
    let zero = P1Field::zeros(&space);
    assert!((space.l2_error(&zero.values, |_, _| 2.0) - 2.0).abs() < 1e-14);
    let x = space.interpolate(|x, _| x);
    assert!((space.l2_norm(&x) - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    assert!((space.l2_distance(&two.values, &zero.values) - 2.0).abs() < 1e-14);
}
