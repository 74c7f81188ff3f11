#![allow(dead_code)]

use ldd_core::constitutive::{mobility, Phase};
use ldd_core::geometry::polygon::{locate, Location};
use ldd_core::geometry::Model;
use ldd_core::verify::Scenario;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `±Φ ∂_t S - ∇·(k(S) ∇(p + z))` by nested centred differences of the
/// exact pressures with step `h`, Richardson-extrapolated from `h` and `h/2`.
pub fn fd_source(s: &Scenario, phase: Phase, l: usize, x: f64, y: f64, t: f64, h: f64) -> f64 {
    if phase == Phase::Nonwetting && s.model(l) == Model::Richards {
        return 0.0;
    }
    let exact = s.manufactured();
    let params = &s.materials[l];
    let curves = &s.curves[l];
    let gz = params.gravity_gradient(phase, s.solver.gravity_on);
    let p = |x: f64, y: f64, t: f64| exact.exact_pressure(phase, l, x, y, t);
    let sat = |x: f64, y: f64, t: f64| {
        curves.saturation(
            exact.exact_pressure(Phase::Nonwetting, l, x, y, t)
                - exact.exact_pressure(Phase::Wetting, l, x, y, t),
        )
    };
    let once = |h: f64| {
        let flux = |x: f64, y: f64, dir: usize| {
            let k = mobility(params, curves, phase, sat(x, y, t));
            let d = if dir == 0 {
                (p(x + h, y, t) - p(x - h, y, t)) / (2.0 * h)
            } else {
                (p(x, y + h, t) - p(x, y - h, t)) / (2.0 * h)
            };
            -k * (d + gz[dir])
        };
        let div = (flux(x + h, y, 0) - flux(x - h, y, 0)) / (2.0 * h)
            + (flux(x, y + h, 1) - flux(x, y - h, 1)) / (2.0 * h);
        let st = (sat(x, y, t + h) - sat(x, y, t - h)) / (2.0 * h);
        let sign = if phase == Phase::Wetting { 1.0 } else { -1.0 };
        sign * params.porosity * st + div
    };
    (4.0 * once(h / 2.0) - once(h)) / 3.0
}

/// Uniform sample strictly inside subdomain `l`, away from its boundary.
pub fn interior_point(s: &Scenario, l: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let poly = &s.geometry.subdomains[l].polygon;
    let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
    for p in poly {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    loop {
        let q = [
            rng.random_range(lo[0]..hi[0]),
            rng.random_range(lo[1]..hi[1]),
        ];
        let clear = [
            [0.0, 0.0],
            [0.01, 0.0],
            [-0.01, 0.0],
            [0.0, 0.01],
            [0.0, -0.01],
        ]
        .iter()
        .all(|o| locate(poly, [q[0] + o[0], q[1] + o[1]]) == Location::Inside);
        if clear {
            return (q[0], q[1]);
        }
    }
}

/// Worst `|f - f_fd| / (1 + |f|)` over `points` random samples and five
/// times in `[0.1, 1]` per appearing field.
pub fn worst_source_mismatch(s: &Scenario, points: usize, seed: u64) -> f64 {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for l in 0..s.num_subdomains() {
        for phase in Phase::ALL {
            if phase == Phase::Nonwetting && s.model(l) == Model::Richards {
                continue;
            }
            for _ in 0..points {
                let (x, y) = interior_point(s, l, &mut rng);
                for t in [0.1, 0.3, 0.5, 0.75, 1.0] {
                    let f = s.source_term(phase, l, x, y, t);
                    let g = fd_source(s, phase, l, x, y, t, 1e-3);
                    worst = worst.max((f - g).abs() / (1.0 + f.abs()));
                }
            }
        }
    }
    worst
}

/// Seeded SPD matrix `BᵀB/n + I` with a sparse random `B`, plus a random
/// right-hand side.
pub fn random_spd(n: usize, seed: u64) -> (ldd_core::linalg::SparseMatrix, Vec<f64>) {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = vec![vec![0.0; n]; n];
    for row in b.iter_mut() {
        for v in row.iter_mut() {
            if rng.random::<f64>() < 0.1 {
                *v = rng.random_range(-1.0..1.0);
            }
        }
    }
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for row in &b {
                s += row[i] * row[j];
            }
            a[i][j] = s / n as f64 + if i == j { 1.0 } else { 0.0 };
        }
    }
    let rhs = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    (ldd_core::linalg::SparseMatrix::from_dense(&a).unwrap(), rhs)
}
