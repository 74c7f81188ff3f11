use std::collections::BTreeMap;

use ldd_core::geometry::polygon::area;
use ldd_core::geometry::{build_partition, triangulate, MultiDomainMesh, PartitionSpec};
use proptest::prelude::*;

fn mesh(spec: &PartitionSpec, r: usize) -> MultiDomainMesh {
    triangulate(&build_partition(spec).unwrap(), r).unwrap()
}

fn cell_area(m: &MultiDomainMesh, c: usize) -> f64 {
    let [a, b, d] = m.cells()[c].map(|v| m.vertices()[v]);
    area(&[a, b, d])
}

fn check_mesh(m: &MultiDomainMesh, spec: &PartitionSpec) {
    let total: f64 = (0..m.cells().len()).map(|c| cell_area(m, c)).sum();
    let global = area(&spec.global_polygon);
    assert!((total - global).abs() <= 1e-12 * global);
    for l in 0..m.num_subdomains() {
        let sub: f64 = m
            .submesh(l)
            .global_cells
            .iter()
            .map(|&c| cell_area(m, c))
            .sum();
        let expected = area(&spec.subdomains[l].polygon);
        assert!((sub - expected).abs() <= 1e-12 * expected);
    }

    // facets seen from both sides
    let mut seen: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    for iface in m.interfaces() {
        let (a, b) = iface.pair;
        let ab = m.interface_trace_map(a, b).unwrap();
        let ba = m.interface_trace_map(b, a).unwrap();
        assert_eq!(ab.len(), iface.facets.len());
        assert_eq!(ba.len(), iface.facets.len());
        for ((r, s), f) in ab.iter().zip(&ba).zip(&iface.facets) {
            assert_eq!(r.normal[0] + s.normal[0], 0.0);
            assert_eq!(r.normal[1] + s.normal[1], 0.0);
            assert_eq!(r.local_dofs, s.neighbor_dofs);
            assert_eq!(r.neighbor_dofs, s.local_dofs);
            for j in 0..2 {
                assert_eq!(
                    m.local_point(a, r.local_dofs[j]),
                    m.local_point(b, r.neighbor_dofs[j])
                );
                assert_eq!(
                    m.local_point(a, r.local_dofs[j]),
                    m.vertices()[f.vertices[j]]
                );
            }
            let mut key = f.vertices;
            key.sort_unstable();
            *seen.entry(key).or_default() += 1;
        }
    }
    assert!(seen.values().all(|&c| c == 1));

    // brute-force neighbour sets from shared cell edges
    let mut owners: BTreeMap<[usize; 2], Vec<usize>> = BTreeMap::new();
    for (c, tri) in m.cells().iter().enumerate() {
        for e in 0..3 {
            let mut key = [tri[e], tri[(e + 1) % 3]];
            key.sort_unstable();
            owners.entry(key).or_default().push(m.cell_subdomain()[c]);
        }
    }
    let mut expected: Vec<Vec<usize>> = vec![Vec::new(); m.num_subdomains()];
    let mut crossing = 0;
    for (key, subs) in &owners {
        if subs.len() == 2 && subs[0] != subs[1] {
            crossing += 1;
            assert!(seen.contains_key(key));
            expected[subs[0]].push(subs[1]);
            expected[subs[1]].push(subs[0]);
        }
    }
    assert_eq!(crossing, seen.len());
    for (l, mut e) in expected.into_iter().enumerate() {
        e.sort_unstable();
        e.dedup();
        assert_eq!(m.neighbors(l), e.as_slice());
        for k in 0..m.num_subdomains() {
            assert_eq!(m.interface_trace_map(l, k).is_ok(), e.contains(&k));
        }
    }
}

#[test]
fn index_sets() {
    let p = build_partition(&PartitionSpec::two_domain()).unwrap();
    assert_eq!(
        (p.richards(), p.two_phase(), p.neighbors(0).to_vec()),
        (vec![0], vec![1], vec![1])
    );
    let p = build_partition(&PartitionSpec::five_domain()).unwrap();
    assert_eq!((p.richards(), p.two_phase()), (vec![0, 4], vec![1, 2, 3]));
    let single = PartitionSpec::single(
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        ldd_core::geometry::Model::Richards,
    );
    let m = mesh(&single, 3);
    assert!(m.neighbors(0).is_empty() && m.interfaces().is_empty());
}

#[test]
fn calibrated_resolutions() {
    let m = mesh(&PartitionSpec::two_domain(), 20);
    assert!((0.06..=0.08).contains(&m.max_h()));
    let m = mesh(&PartitionSpec::two_domain(), 14);
    assert!((m.max_h() - 0.1).abs() < 0.005);
    let unit = PartitionSpec::single(
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        ldd_core::geometry::Model::Richards,
    );
    let h = mesh(&unit, 2).max_h();
    let target = 0.5 * 2f64.sqrt();
    assert!(h >= target / 2.0 && h <= target * 2.0);
}

#[test]
fn inner_subdomain_traces() {
    let m = mesh(&PartitionSpec::five_domain(), 8);
    assert_eq!(m.neighbors(2), &[1, 3]);
    check_mesh(&m, &PartitionSpec::five_domain());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn two_domain_mesh_invariants(r in 1usize..24) {
        check_mesh(&mesh(&PartitionSpec::two_domain(), r), &PartitionSpec::two_domain());
    }

    #[test]
    fn five_domain_mesh_invariants(q in 1usize..7) {
        check_mesh(&mesh(&PartitionSpec::five_domain(), 4 * q), &PartitionSpec::five_domain());
    }
}
