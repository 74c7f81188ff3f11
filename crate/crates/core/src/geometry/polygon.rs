//! Planar polygon predicates used to validate partitions.

use super::Point;

pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

pub fn area(poly: &[Point]) -> f64 {
    signed_area(poly).abs()
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Proper crossing: the open segments intersect in exactly one interior point.
pub fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    cross(a, b, p) == 0.0
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// A polygon is simple when no two non-adjacent edges touch and adjacent
/// edges meet only at their shared vertex.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        if poly[i] == poly[(i + 1) % n] {
            return false;
        }
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // collinear fold-back
                let shared = if j == i + 1 { b } else { a };
                let other_i = if j == i + 1 { a } else { b };
                let other_j = if j == i + 1 { d } else { c };
                if cross(shared, other_i, other_j) == 0.0 {
                    let v1 = [other_i[0] - shared[0], other_i[1] - shared[1]];
                    let v2 = [other_j[0] - shared[0], other_j[1] - shared[1]];
                    if v1[0] * v2[0] + v1[1] * v2[1] > 0.0 {
                        return false;
                    }
                }
                continue;
            }
            if segments_cross(a, b, c, d)
                || on_segment(a, c, d)
                || on_segment(b, c, d)
                || on_segment(c, a, b)
                || on_segment(d, a, b)
            {
                return false;
            }
        }
    }
    true
}

/// Where a point lies relative to a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

pub fn locate(poly: &[Point], p: Point) -> Location {
    let n = poly.len();
    for i in 0..n {
        if on_segment(p, poly[i], poly[(i + 1) % n]) {
            return Location::Boundary;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Length of the collinear overlap of two segments (zero if not collinear).
pub fn collinear_overlap(p1: Point, p2: Point, q1: Point, q2: Point) -> f64 {
    if cross(p1, p2, q1) != 0.0 || cross(p1, p2, q2) != 0.0 {
        return 0.0;
    }
    let d = [p2[0] - p1[0], p2[1] - p1[1]];
    let len = d[0].hypot(d[1]);
    if len == 0.0 {
        return 0.0;
    }
    let proj = |q: Point| ((q[0] - p1[0]) * d[0] + (q[1] - p1[1]) * d[1]) / len;
    let (s1, s2) = (proj(q1), proj(q2));
    let lo = s1.min(s2).max(0.0);
    let hi = s1.max(s2).min(len);
    (hi - lo).max(0.0)
}

/// Length of boundary shared by two polygons.
pub fn shared_boundary_length(a: &[Point], b: &[Point]) -> f64 {
    let mut total = 0.0;
    for i in 0..a.len() {
        let (p1, p2) = (a[i], a[(i + 1) % a.len()]);
        for j in 0..b.len() {
            total += collinear_overlap(p1, p2, b[j], b[(j + 1) % b.len()]);
        }
    }
    total
}

/// Centroids of a fan triangulation from each vertex, filtered to those
/// strictly inside the polygon. Used as interior probes.
pub fn interior_probes(poly: &[Point]) -> Vec<Point> {
    let n = poly.len();
    let mut probes = Vec::new();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        let p = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
        if locate(poly, p) == Location::Inside {
            probes.push(p);
        }
    }
    probes
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: [Point; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

    #[test]
    fn unit_square_area_and_location() {
        assert_eq!(signed_area(&SQUARE), 1.0);
        assert_eq!(locate(&SQUARE, [0.5, 0.5]), Location::Inside);
        assert_eq!(locate(&SQUARE, [1.0, 0.5]), Location::Boundary);
        assert_eq!(locate(&SQUARE, [1.5, 0.5]), Location::Outside);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bowtie = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(!is_simple(&bowtie));
        assert!(is_simple(&SQUARE));
    }

    #[test]
    fn shared_edge_length_of_stacked_squares() {
        let top = [[0.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        assert_eq!(shared_boundary_length(&SQUARE, &top), 1.0);
        let corner = [[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0]];
        assert_eq!(shared_boundary_length(&SQUARE, &corner), 0.0);
    }
}
