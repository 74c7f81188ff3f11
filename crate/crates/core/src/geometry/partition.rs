//! Partitions of a polygonal domain into model-tagged subdomains.

use serde::{Deserialize, Serialize};

use super::polygon::{self, Location};
use super::{GeometryError, Point};

/// Flow model solved on a subdomain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    Richards,
    TwoPhase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubdomainSpec {
    pub polygon: Vec<Point>,
    pub model: Model,
}

/// Geometry descriptor: global polygon plus subdomain polygons in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub global_polygon: Vec<Point>,
    pub subdomains: Vec<SubdomainSpec>,
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point> {
    vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]]
}

impl PartitionSpec {
    /// `(0,1)x(0,1)` Richards over `(0,1)x(-1,0)` two-phase, interface `y = 0`.
    pub fn two_domain() -> Self {
        Self::two_domain_with(Model::Richards, Model::TwoPhase)
    }

    pub fn two_domain_with(top: Model, bottom: Model) -> Self {
        Self {
            global_polygon: rect(0.0, -1.0, 1.0, 1.0),
            subdomains: vec![
                SubdomainSpec {
                    polygon: rect(0.0, 0.0, 1.0, 1.0),
                    model: top,
                },
                SubdomainSpec {
                    polygon: rect(0.0, -1.0, 1.0, 0.0),
                    model: bottom,
                },
            ],
        }
    }

    /// Two Richards subdomains on top, an inner two-phase subdomain
    /// `(0.25,0.75)x(-0.75,-0.25)` and its left/right two-phase surroundings.
    pub fn five_domain() -> Self {
        let left = vec![
            [0.0, -1.0],
            [0.5, -1.0],
            [0.5, -0.75],
            [0.25, -0.75],
            [0.25, -0.25],
            [0.5, -0.25],
            [0.5, 0.0],
            [0.0, 0.0],
        ];
        let right = vec![
            [0.5, -1.0],
            [1.0, -1.0],
            [1.0, 0.0],
            [0.5, 0.0],
            [0.5, -0.25],
            [0.75, -0.25],
            [0.75, -0.75],
            [0.5, -0.75],
        ];
        Self {
            global_polygon: rect(0.0, -1.0, 1.0, 1.0),
            subdomains: vec![
                SubdomainSpec {
                    polygon: rect(0.0, 0.0, 0.5, 1.0),
                    model: Model::Richards,
                },
                SubdomainSpec {
                    polygon: left,
                    model: Model::TwoPhase,
                },
                SubdomainSpec {
                    polygon: rect(0.25, -0.75, 0.75, -0.25),
                    model: Model::TwoPhase,
                },
                SubdomainSpec {
                    polygon: right,
                    model: Model::TwoPhase,
                },
                SubdomainSpec {
                    polygon: rect(0.5, 0.0, 1.0, 1.0),
                    model: Model::Richards,
                },
            ],
        }
    }

    pub fn single(polygon: Vec<Point>, model: Model) -> Self {
        Self {
            global_polygon: polygon.clone(),
            subdomains: vec![SubdomainSpec { polygon, model }],
        }
    }
}

/// Validated partition with neighbour sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    global_polygon: Vec<Point>,
    subdomains: Vec<SubdomainSpec>,
    neighbors: Vec<Vec<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.subdomains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subdomains.is_empty()
    }

    pub fn global_polygon(&self) -> &[Point] {
        &self.global_polygon
    }

    pub fn polygon(&self, l: usize) -> &[Point] {
        &self.subdomains[l].polygon
    }

    pub fn model(&self, l: usize) -> Model {
        self.subdomains[l].model
    }

    pub fn models(&self) -> Vec<Model> {
        self.subdomains.iter().map(|s| s.model).collect()
    }

    /// Indices of subdomains sharing a boundary piece of positive length with `l`.
    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.neighbors[l]
    }

    pub fn richards(&self) -> Vec<usize> {
        self.with_model(Model::Richards)
    }

    pub fn two_phase(&self) -> Vec<usize> {
        self.with_model(Model::TwoPhase)
    }

    fn with_model(&self, m: Model) -> Vec<usize> {
        (0..self.len()).filter(|&l| self.model(l) == m).collect()
    }

    /// Unordered neighbour pairs `(l, k)` with `l < k`.
    pub fn interface_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for l in 0..self.len() {
            for &k in &self.neighbors[l] {
                if l < k {
                    pairs.push((l, k));
                }
            }
        }
        pairs
    }
}

fn valid_polygon(poly: &[Point], which: Option<usize>) -> Result<(), GeometryError> {
    let bad = |reason: &str| match which {
        Some(l) => GeometryError::InvalidSubdomain {
            subdomain: l,
            reason: reason.to_string(),
        },
        None => GeometryError::InvalidGlobalPolygon(reason.to_string()),
    };
    if poly.len() < 3 {
        return Err(bad("fewer than three vertices"));
    }
    if poly.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(bad("non-finite coordinate"));
    }
    if !polygon::is_simple(poly) {
        return Err(bad("polygon is not simple"));
    }
    if polygon::area(poly) == 0.0 {
        return Err(match which {
            Some(l) => GeometryError::EmptyInterior { subdomain: l },
            None => bad("zero area"),
        });
    }
    Ok(())
}

/// Validates a geometry descriptor and computes neighbour sets.
pub fn build_partition(spec: &PartitionSpec) -> Result<Partition, GeometryError> {
    if spec.subdomains.is_empty() {
        return Err(GeometryError::NoSubdomains);
    }
    valid_polygon(&spec.global_polygon, None)?;
    for (l, s) in spec.subdomains.iter().enumerate() {
        valid_polygon(&s.polygon, Some(l))?;
        if s.polygon
            .iter()
            .any(|&p| polygon::locate(&spec.global_polygon, p) == Location::Outside)
        {
            return Err(GeometryError::OutsideDomain { subdomain: l });
        }
    }

    let w = spec.subdomains.len();
    for a in 0..w {
        for b in a + 1..w {
            let (pa, pb) = (&spec.subdomains[a].polygon, &spec.subdomains[b].polygon);
            if overlaps(pa, pb) {
                return Err(GeometryError::Overlap {
                    first: a,
                    second: b,
                });
            }
        }
    }

    let global = polygon::area(&spec.global_polygon);
    let covered: f64 = spec
        .subdomains
        .iter()
        .map(|s| polygon::area(&s.polygon))
        .sum();
    let tol = 1e-12 * global;
    if covered < global - tol {
        return Err(GeometryError::Gap {
            uncovered: global - covered,
        });
    }
    if covered > global + tol {
        return Err(GeometryError::AreaExcess {
            excess: covered - global,
        });
    }

    let mut neighbors = vec![Vec::new(); w];
    for a in 0..w {
        for b in a + 1..w {
            let len = polygon::shared_boundary_length(
                &spec.subdomains[a].polygon,
                &spec.subdomains[b].polygon,
            );
            if len > 0.0 {
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
    }
    neighbors.iter_mut().for_each(|n| n.sort_unstable());

    Ok(Partition {
        global_polygon: spec.global_polygon.clone(),
        subdomains: spec.subdomains.clone(),
        neighbors,
    })
}

fn overlaps(a: &[Point], b: &[Point]) -> bool {
    for i in 0..a.len() {
        for j in 0..b.len() {
            if polygon::segments_cross(a[i], a[(i + 1) % a.len()], b[j], b[(j + 1) % b.len()]) {
                return true;
            }
        }
    }
    let inside = |poly: &[Point], pts: &[Point]| {
        pts.iter()
            .any(|&p| polygon::locate(poly, p) == Location::Inside)
    };
    inside(b, a)
        || inside(a, b)
        || inside(b, &polygon::interior_probes(a))
        || inside(a, &polygon::interior_probes(b))
}
