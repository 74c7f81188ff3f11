//! Symmetric quadrature rules on triangles in barycentric coordinates.
#![allow(clippy::excessive_precision)]

/// Weights sum to one; multiply by the cell area.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    degree: usize,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

fn orbit3(a: f64, w: f64, pts: &mut Vec<[f64; 3]>, ws: &mut Vec<f64>) {
    let b = 1.0 - 2.0 * a;
    for p in [[a, a, b], [a, b, a], [b, a, a]] {
        pts.push(p);
        ws.push(w);
    }
}

fn orbit6(a: f64, b: f64, w: f64, pts: &mut Vec<[f64; 3]>, ws: &mut Vec<f64>) {
    let c = 1.0 - a - b;
    for p in [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ] {
        pts.push(p);
        ws.push(w);
    }
}

impl QuadratureRule {
    /// Six-point rule exact for polynomials of degree 4.
    pub fn degree4() -> Self {
        let (mut p, mut w) = (Vec::new(), Vec::new());
        orbit3(
            0.445_948_490_915_964_886_32,
            0.223_381_589_678_011_465_70,
            &mut p,
            &mut w,
        );
        orbit3(
            0.091_576_213_509_770_743_46,
            0.109_951_743_655_321_867_64,
            &mut p,
            &mut w,
        );
        Self {
            degree: 4,
            points: p,
            weights: w,
        }
    }

    /// Twelve-point rule exact for polynomials of degree 6.
    pub fn degree6() -> Self {
        let (mut p, mut w) = (Vec::new(), Vec::new());
        orbit3(
            0.249_286_745_170_910_421_29,
            0.116_786_275_726_379_366_03,
            &mut p,
            &mut w,
        );
        orbit3(
            0.063_089_014_491_502_228_34,
            0.050_844_906_370_206_816_92,
            &mut p,
            &mut w,
        );
        orbit6(
            0.310_352_451_033_784_405_42,
            0.053_145_049_844_816_947_35,
            0.082_851_075_618_373_575_19,
            &mut p,
            &mut w,
        );
        Self {
            degree: 6,
            points: p,
            weights: w,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}
