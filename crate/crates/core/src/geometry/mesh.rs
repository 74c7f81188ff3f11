//! Conforming triangulation of a partition and extraction of matching
//! subdomain meshes and interface facet records.
//!
//! The triangulator is a structured right-triangle mesh over the bounding
//! box of the global polygon. Every polygon vertex must sit on a grid node
//! and every polygon edge must run along grid lines (or along the cell
//! diagonal), so interfaces are unions of mesh edges by construction.
//! Submeshes reference the same global vertex array, which makes traces on
//! both sides of an interface coincide bit for bit.

use std::collections::BTreeMap;
use std::io::{self, Write};

use super::partition::{Model, Partition};
use super::polygon::{self, Location};
use super::{GeometryError, Point};

/// Cells, vertices and boundary information of one subdomain.
#[derive(Debug, Clone)]
pub struct Submesh {
    /// Local vertex index -> global vertex index.
    pub global_vertices: Vec<usize>,
    /// Triangles in local vertex indices, counter-clockwise.
    pub cells: Vec<[usize; 3]>,
    /// Local cell index -> global cell index.
    pub global_cells: Vec<usize>,
    /// Maximum cell circumdiameter.
    pub h: f64,
    /// Local vertices lying on the outer boundary of the global domain.
    pub boundary_dofs: Vec<usize>,
    global_to_local: Vec<usize>,
}

impl Submesh {
    pub fn num_dofs(&self) -> usize {
        self.global_vertices.len()
    }

    pub fn local_vertex(&self, global: usize) -> Option<usize> {
        match self.global_to_local.get(global) {
            Some(&l) if l != usize::MAX => Some(l),
            _ => None,
        }
    }
}

/// One interface facet between subdomains `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// Global endpoint vertices; this order fixes the DG1 endpoint order on
    /// both sides.
    pub vertices: [usize; 2],
    /// Global cells adjacent to the facet on side `a` and side `b`.
    pub cells: [usize; 2],
    /// Unit normal pointing from subdomain `a` into subdomain `b`.
    pub normal: Point,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interface {
    pub pair: (usize, usize),
    pub facets: Vec<Facet>,
}

/// Facet seen from subdomain `l` towards neighbour `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub facet: usize,
    /// Cell of subdomain `l` adjacent to the facet (local index).
    pub local_cell: usize,
    pub local_dofs: [usize; 2],
    pub neighbor_dofs: [usize; 2],
    /// Outer normal of `l` on the facet, `n_lk`.
    pub normal: Point,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct MultiDomainMesh {
    vertices: Vec<Point>,
    cells: Vec<[usize; 3]>,
    cell_subdomain: Vec<usize>,
    models: Vec<Model>,
    neighbors: Vec<Vec<usize>>,
    submeshes: Vec<Submesh>,
    interfaces: Vec<Interface>,
    interface_index: BTreeMap<(usize, usize), usize>,
    global_area: f64,
}

/// Grid coordinate `i` of `n` on `[lo, hi]`, exact at the end points and at
/// any dyadic or decimal fraction representable as `i / n`.
fn grid_coord(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    (lo * (n - i) as f64 + hi * i as f64) / n as f64
}

fn snap(v: f64, lo: f64, hi: f64, n: usize) -> Option<usize> {
    let t = (v - lo) / (hi - lo) * n as f64;
    let i = t.round();
    let tol = 1e-9 * n as f64;
    if (t - i).abs() <= tol && i >= 0.0 && i <= n as f64 {
        Some(i as usize)
    } else {
        None
    }
}

fn circumdiameter(a: Point, b: Point, c: Point) -> f64 {
    let la = (b[0] - c[0]).hypot(b[1] - c[1]);
    let lb = (a[0] - c[0]).hypot(a[1] - c[1]);
    let lc = (a[0] - b[0]).hypot(a[1] - b[1]);
    let area2 = ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
    la * lb * lc / area2
}

/// Builds the conforming mesh. `resolution = r` targets edge length `1/r`.
pub fn triangulate(
    partition: &Partition,
    resolution: usize,
) -> Result<MultiDomainMesh, GeometryError> {
    if resolution == 0 {
        return Err(GeometryError::InvalidResolution);
    }
    let gp = partition.global_polygon();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in gp {
        xmin = xmin.min(p[0]);
        xmax = xmax.max(p[0]);
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let target = 1.0 / resolution as f64;
    let nx = (((xmax - xmin) / target).round() as usize).max(1);
    let ny = (((ymax - ymin) / target).round() as usize).max(1);

    // every polygon must be resolved by the grid
    let all_polys = std::iter::once(gp).chain((0..partition.len()).map(|l| partition.polygon(l)));
    for poly in all_polys {
        for i in 0..poly.len() {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            let ia = (snap(a[0], xmin, xmax, nx), snap(a[1], ymin, ymax, ny));
            let ib = (snap(b[0], xmin, xmax, nx), snap(b[1], ymin, ymax, ny));
            let aligned = match (ia, ib) {
                ((Some(ax), Some(ay)), (Some(bx), Some(by))) => {
                    ax == bx
                        || ay == by
                        || (bx as isize - ax as isize) == (by as isize - ay as isize)
                }
                _ => false,
            };
            if !aligned {
                if len < target {
                    return Err(GeometryError::RefinementRequired {
                        edge_length: len,
                        target,
                    });
                }
                return Err(GeometryError::NotGridAligned {
                    point: a,
                    resolution,
                });
            }
        }
    }

    // cells: each grid square split along its (i,j)-(i+1,j+1) diagonal
    let node = |i: usize, j: usize| j * (nx + 1) + i;
    let coord = |i: usize, j: usize| [grid_coord(xmin, xmax, i, nx), grid_coord(ymin, ymax, j, ny)];
    let mut raw_cells: Vec<([usize; 3], usize)> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let tris = [
                [node(i, j), node(i + 1, j), node(i + 1, j + 1)],
                [node(i, j), node(i + 1, j + 1), node(i, j + 1)],
            ];
            for tri in tris {
                let pts: Vec<Point> = tri
                    .iter()
                    .map(|&v| coord(v % (nx + 1), v / (nx + 1)))
                    .collect();
                let c = [
                    (pts[0][0] + pts[1][0] + pts[2][0]) / 3.0,
                    (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0,
                ];
                if polygon::locate(gp, c) != Location::Inside {
                    continue;
                }
                let owners: Vec<usize> = (0..partition.len())
                    .filter(|&l| polygon::locate(partition.polygon(l), c) == Location::Inside)
                    .collect();
                match owners.as_slice() {
                    [l] => raw_cells.push((tri, *l)),
                    [] => return Err(GeometryError::UncoveredCell { centroid: c }),
                    _ => {
                        return Err(GeometryError::Overlap {
                            first: owners[0],
                            second: owners[1],
                        })
                    }
                }
            }
        }
    }

    // compact vertex numbering in grid order
    let mut used = vec![usize::MAX; (nx + 1) * (ny + 1)];
    for (tri, _) in &raw_cells {
        for &v in tri {
            used[v] = 0;
        }
    }
    let mut vertices = Vec::new();
    for (g, slot) in used.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = vertices.len();
            vertices.push(coord(g % (nx + 1), g / (nx + 1)));
        }
    }
    let cells: Vec<[usize; 3]> = raw_cells
        .iter()
        .map(|(t, _)| [used[t[0]], used[t[1]], used[t[2]]])
        .collect();
    let cell_subdomain: Vec<usize> = raw_cells.iter().map(|&(_, l)| l).collect();

    // edge -> adjacent cells
    let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (c, tri) in cells.iter().enumerate() {
        for e in 0..3 {
            let (a, b) = (tri[e], tri[(e + 1) % 3]);
            edges.entry((a.min(b), a.max(b))).or_default().push(c);
        }
    }
    let mut on_boundary = vec![false; vertices.len()];
    let mut facets_by_pair: BTreeMap<(usize, usize), Vec<Facet>> = BTreeMap::new();
    for (&(a, b), adj) in &edges {
        match adj.as_slice() {
            [_] => {
                on_boundary[a] = true;
                on_boundary[b] = true;
            }
            [c0, c1] => {
                let (s0, s1) = (cell_subdomain[*c0], cell_subdomain[*c1]);
                if s0 == s1 {
                    continue;
                }
                let (ca, cb, la, lb) = if s0 < s1 {
                    (*c0, *c1, s0, s1)
                } else {
                    (*c1, *c0, s1, s0)
                };
                let (pa, pb) = (vertices[a], vertices[b]);
                let d = [pb[0] - pa[0], pb[1] - pa[1]];
                let length = d[0].hypot(d[1]);
                let mut normal = [d[1] / length, -d[0] / length];
                let opposite = cells[ca]
                    .iter()
                    .copied()
                    .find(|&v| v != a && v != b)
                    .expect("triangle");
                let po = vertices[opposite];
                if normal[0] * (po[0] - pa[0]) + normal[1] * (po[1] - pa[1]) > 0.0 {
                    normal = [-normal[0], -normal[1]];
                }
                facets_by_pair.entry((la, lb)).or_default().push(Facet {
                    vertices: [a, b],
                    cells: [ca, cb],
                    normal,
                    length,
                });
            }
            _ => return Err(GeometryError::NonManifoldEdge { vertices: [a, b] }),
        }
    }

    let w = partition.len();
    let mut submeshes = Vec::with_capacity(w);
    for l in 0..w {
        let mut global_to_local = vec![usize::MAX; vertices.len()];
        let mut global_vertices = Vec::new();
        let mut local_cells = Vec::new();
        let mut global_cells = Vec::new();
        let mut h: f64 = 0.0;
        // number vertices in global order for reproducible dof layouts
        let mut members: Vec<usize> = Vec::new();
        for (c, tri) in cells.iter().enumerate() {
            if cell_subdomain[c] == l {
                members.extend_from_slice(tri);
            }
        }
        members.sort_unstable();
        members.dedup();
        for g in members {
            global_to_local[g] = global_vertices.len();
            global_vertices.push(g);
        }
        for (c, tri) in cells.iter().enumerate() {
            if cell_subdomain[c] != l {
                continue;
            }
            local_cells.push([
                global_to_local[tri[0]],
                global_to_local[tri[1]],
                global_to_local[tri[2]],
            ]);
            global_cells.push(c);
            h = h.max(circumdiameter(
                vertices[tri[0]],
                vertices[tri[1]],
                vertices[tri[2]],
            ));
        }
        if local_cells.is_empty() {
            return Err(GeometryError::EmptyInterior { subdomain: l });
        }
        let boundary_dofs = global_vertices
            .iter()
            .enumerate()
            .filter(|&(_, &g)| on_boundary[g])
            .map(|(i, _)| i)
            .collect();
        submeshes.push(Submesh {
            global_vertices,
            cells: local_cells,
            global_cells,
            h,
            boundary_dofs,
            global_to_local,
        });
    }

    let mut interfaces = Vec::new();
    let mut interface_index = BTreeMap::new();
    for (pair, facets) in facets_by_pair {
        interface_index.insert(pair, interfaces.len());
        interfaces.push(Interface { pair, facets });
    }
    // neighbour sets from the mesh must agree with the partition
    let mut neighbors = vec![Vec::new(); w];
    for &(a, b) in interface_index.keys() {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    for (l, n) in neighbors.iter_mut().enumerate() {
        n.sort_unstable();
        if n.as_slice() != partition.neighbors(l) {
            return Err(GeometryError::NeighborMismatch { subdomain: l });
        }
    }

    Ok(MultiDomainMesh {
        vertices,
        cells,
        cell_subdomain,
        models: partition.models(),
        neighbors,
        submeshes,
        interfaces,
        interface_index,
        global_area: polygon::area(gp),
    })
}

impl MultiDomainMesh {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn cell_subdomain(&self) -> &[usize] {
        &self.cell_subdomain
    }

    pub fn num_subdomains(&self) -> usize {
        self.submeshes.len()
    }

    pub fn model(&self, l: usize) -> Model {
        self.models[l]
    }

    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.neighbors[l]
    }

    pub fn submesh(&self, l: usize) -> &Submesh {
        &self.submeshes[l]
    }

    pub fn submeshes(&self) -> &[Submesh] {
        &self.submeshes
    }

    pub fn interfaces(&self) -> &[Interface] {
        &self.interfaces
    }

    pub fn global_area(&self) -> f64 {
        self.global_area
    }

    /// Mesh size of subdomain `l`.
    pub fn h(&self, l: usize) -> f64 {
        self.submeshes[l].h
    }

    pub fn max_h(&self) -> f64 {
        self.submeshes.iter().fold(0.0, |m, s| m.max(s.h))
    }

    /// Coordinates of local vertex `v` of subdomain `l`.
    pub fn local_point(&self, l: usize, v: usize) -> Point {
        self.vertices[self.submeshes[l].global_vertices[v]]
    }

    /// Interface shared by `l` and `k` in either order.
    pub fn interface(&self, l: usize, k: usize) -> Option<&Interface> {
        self.interface_index
            .get(&(l.min(k), l.max(k)))
            .map(|&i| &self.interfaces[i])
    }

    /// Facet-by-facet correspondence between the traces of `l` and `k`.
    ///
    /// Records follow the shared facet order and endpoint order of the
    /// interface, so the map for `(k, l)` lists the same facets with local and
    /// neighbour dofs swapped and the normal negated.
    pub fn interface_trace_map(
        &self,
        l: usize,
        k: usize,
    ) -> Result<Vec<TraceRecord>, GeometryError> {
        let iface = self.interface(l, k).ok_or(GeometryError::NotNeighbors {
            subdomain: l,
            neighbor: k,
        })?;
        if l == k {
            return Err(GeometryError::NotNeighbors {
                subdomain: l,
                neighbor: k,
            });
        }
        let side = usize::from(l != iface.pair.0);
        let (me, other) = (&self.submeshes[l], &self.submeshes[k]);
        iface
            .facets
            .iter()
            .enumerate()
            .map(|(f, facet)| {
                let local = |s: &Submesh| -> Result<[usize; 2], GeometryError> {
                    let a = s.local_vertex(facet.vertices[0]);
                    let b = s.local_vertex(facet.vertices[1]);
                    match (a, b) {
                        (Some(a), Some(b)) => Ok([a, b]),
                        _ => Err(GeometryError::MalformedFacet { facet: f }),
                    }
                };
                let global_cell = facet.cells[side];
                let local_cell = me
                    .global_cells
                    .binary_search(&global_cell)
                    .map_err(|_| GeometryError::MalformedFacet { facet: f })?;
                let normal = if side == 0 {
                    facet.normal
                } else {
                    [-facet.normal[0], -facet.normal[1]]
                };
                Ok(TraceRecord {
                    facet: f,
                    local_cell,
                    local_dofs: local(me)?,
                    neighbor_dofs: local(other)?,
                    normal,
                    length: facet.length,
                })
            })
            .collect()
    }

    /// Plain-text dump: one `vertex`, `cell` or `facet` record per line.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# vertices {} cells {} subdomains {}",
            self.vertices.len(),
            self.cells.len(),
            self.num_subdomains()
        )?;
        for (i, p) in self.vertices.iter().enumerate() {
            writeln!(out, "vertex {i} {:e} {:e}", p[0], p[1])?;
        }
        for (c, tri) in self.cells.iter().enumerate() {
            writeln!(
                out,
                "cell {c} {} {} {} {}",
                self.cell_subdomain[c] + 1,
                tri[0],
                tri[1],
                tri[2]
            )?;
        }
        for iface in &self.interfaces {
            for f in &iface.facets {
                writeln!(
                    out,
                    "facet {} {} {} {} {:e} {:e}",
                    iface.pair.0 + 1,
                    iface.pair.1 + 1,
                    f.vertices[0],
                    f.vertices[1],
                    f.normal[0],
                    f.normal[1]
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_partition, PartitionSpec};
    use super::*;

    fn unit_square(r: usize) -> MultiDomainMesh {
        let sq = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let p = build_partition(&PartitionSpec::single(sq, Model::Richards)).unwrap();
        triangulate(&p, r).unwrap()
    }

    #[test]
    fn unit_square_mesh_size() {
        let m = unit_square(2);
        let h = m.max_h();
        let target = 0.5 * 2f64.sqrt();
        assert!(h >= target / 2.0 && h <= target * 2.0);
        assert_eq!(m.cells().len(), 8);
        assert_eq!(m.submesh(0).boundary_dofs.len(), 8);
    }

    #[test]
    fn calibrated_two_domain_mesh_size() {
        let p = build_partition(&PartitionSpec::two_domain()).unwrap();
        let m = triangulate(&p, 20).unwrap();
        assert!((0.06..=0.08).contains(&m.max_h()));
    }

    #[test]
    fn horizontal_interface_normals_point_down_from_top() {
        let p = build_partition(&PartitionSpec::two_domain()).unwrap();
        let m = triangulate(&p, 4).unwrap();
        let map = m.interface_trace_map(0, 1).unwrap();
        assert_eq!(map.len(), 4);
        assert!(map.iter().all(|r| r.normal == [0.0, -1.0]));
        let back = m.interface_trace_map(1, 0).unwrap();
        assert!(back.iter().all(|r| r.normal == [0.0, 1.0]));
    }

    #[test]
    fn trace_map_rejects_non_neighbours() {
        let p = build_partition(&PartitionSpec::five_domain()).unwrap();
        let m = triangulate(&p, 4).unwrap();
        assert!(matches!(
            m.interface_trace_map(0, 2),
            Err(GeometryError::NotNeighbors { .. })
        ));
    }

    #[test]
    fn unaligned_geometry_is_rejected() {
        let p = build_partition(&PartitionSpec::five_domain()).unwrap();
        assert!(matches!(
            triangulate(&p, 2),
            Err(GeometryError::RefinementRequired { .. })
        ));
        assert!(matches!(
            triangulate(&p, 6),
            Err(GeometryError::NotGridAligned { .. })
        ));
        assert!(matches!(
            triangulate(&p, 0),
            Err(GeometryError::InvalidResolution)
        ));
    }

    #[test]
    fn dump_has_one_line_per_record() {
        let p = build_partition(&PartitionSpec::two_domain()).unwrap();
        let m = triangulate(&p, 2).unwrap();
        let mut buf = Vec::new();
        m.write_dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let facets = text.lines().filter(|l| l.starts_with("facet")).count();
        assert_eq!(facets, 2);
        assert_eq!(
            text.lines().filter(|l| l.starts_with("cell")).count(),
            m.cells().len()
        );
    }
}
