//! Restarted GMRES with right preconditioning, and preconditioned CG.
//!
//! With right preconditioning the Arnoldi residual estimate is the residual
//! of the unpreconditioned system, so `relative_residual` reports
//! `||b - A x|| / ||b||` directly.

use super::sparse::{dot, norm2};
use super::{IluPreconditioner, LinalgError, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub rel_tol: f64,
    pub restart: usize,
    pub max_iters: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            restart: 30,
            max_iters: 2000,
        }
    }
}

/// Result of an iterative solve. `converged == false` is not an error: the
/// best iterate and its residual are still returned.
#[derive(Debug, Clone)]
pub struct KrylovOutcome {
    pub x: Vec<f64>,
    pub relative_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual after every inner iteration, starting with the
    /// initial guess.
    pub residual_history: Vec<f64>,
}

fn check_dims(a: &SparseMatrix, b: &[f64], opts: &KrylovOptions) -> Result<(), LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if b.len() != a.nrows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    if !(opts.rel_tol > 0.0 && opts.rel_tol < 1.0) || opts.restart == 0 {
        return Err(LinalgError::InvalidOptions);
    }
    Ok(())
}

fn residual(a: &SparseMatrix, b: &[f64], x: &[f64], r: &mut [f64]) {
    a.mul_vec_into(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

fn precondition(m: Option<&IluPreconditioner>, v: &[f64], z: &mut [f64]) {
    match m {
        Some(ilu) => ilu.apply(v, z),
        None => z.copy_from_slice(v),
    }
}

/// Restarted GMRES(m). `x0` defaults to zero.
pub fn gmres(
    a: &SparseMatrix,
    b: &[f64],
    m: Option<&IluPreconditioner>,
    opts: &KrylovOptions,
    x0: Option<&[f64]>,
) -> Result<KrylovOutcome, LinalgError> {
    check_dims(a, b, opts)?;
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(KrylovOutcome {
            x: vec![0.0; n],
            relative_residual: 0.0,
            iterations: 0,
            converged: true,
            residual_history: vec![0.0],
        });
    }
    let mut x = match x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        Some(x0) => {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: x0.len(),
            })
        }
        None => vec![0.0; n],
    };
    let restart = opts.restart.min(n.max(1));
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(restart + 1);
    // Hessenberg columns, each of length restart + 1
    let mut h = vec![vec![0.0; restart + 1]; restart];
    let mut cs = vec![0.0; restart];
    let mut sn = vec![0.0; restart];
    let mut g = vec![0.0; restart + 1];
    let mut history = Vec::new();
    let mut total = 0;

    loop {
        residual(a, b, &x, &mut r);
        let beta = norm2(&r);
        let rel = beta / bnorm;
        if history.is_empty() {
            history.push(rel);
        }
        if rel <= opts.rel_tol || total >= opts.max_iters {
            return Ok(KrylovOutcome {
                x,
                relative_residual: rel,
                iterations: total,
                converged: rel <= opts.rel_tol,
                residual_history: history,
            });
        }

        basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;
        let mut k = 0;
        let mut breakdown = false;
        for j in 0..restart {
            precondition(m, &basis[j], &mut z);
            a.mul_vec_into(&z, &mut w);
            let col = &mut h[j];
            col.iter_mut().for_each(|v| *v = 0.0);
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                col[i] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
            let hnext = norm2(&w);
            col[j + 1] = hnext;
            for i in 0..j {
                let (hi, hi1) = (col[i], col[i + 1]);
                col[i] = cs[i] * hi + sn[i] * hi1;
                col[i + 1] = -sn[i] * hi + cs[i] * hi1;
            }
            let denom = col[j].hypot(col[j + 1]);
            if denom == 0.0 {
                return Err(LinalgError::Breakdown { iteration: total });
            }
            cs[j] = col[j] / denom;
            sn[j] = col[j + 1] / denom;
            col[j] = denom;
            col[j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            total += 1;
            k = j + 1;
            let est = g[j + 1].abs() / bnorm;
            history.push(est);
            if hnext <= f64::EPSILON * beta {
                breakdown = true;
                break;
            }
            if est <= opts.rel_tol || total >= opts.max_iters {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }

        // back substitution for y, then x += M^{-1} V y
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for (jj, yj) in y.iter().enumerate().skip(i + 1) {
                s -= h[jj][i] * yj;
            }
            y[i] = s / h[i][i];
        }
        let mut u = vec![0.0; n];
        for (yj, v) in y.iter().zip(&basis) {
            for (ui, vi) in u.iter_mut().zip(v) {
                *ui += yj * vi;
            }
        }
        precondition(m, &u, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }

        if breakdown {
            residual(a, b, &x, &mut r);
            let rel = norm2(&r) / bnorm;
            if rel > opts.rel_tol && rel >= beta / bnorm {
                return Err(LinalgError::Breakdown { iteration: total });
            }
        }
    }
}

/// Preconditioned conjugate gradients, for symmetric positive definite `A`.
pub fn conjugate_gradient(
    a: &SparseMatrix,
    b: &[f64],
    m: Option<&IluPreconditioner>,
    opts: &KrylovOptions,
    x0: Option<&[f64]>,
) -> Result<KrylovOutcome, LinalgError> {
    check_dims(a, b, opts)?;
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    if bnorm == 0.0 {
        return Ok(KrylovOutcome {
            x: vec![0.0; n],
            relative_residual: 0.0,
            iterations: 0,
            converged: true,
            residual_history: vec![0.0],
        });
    }
    let mut r = vec![0.0; n];
    residual(a, b, &x, &mut r);
    let mut z = vec![0.0; n];
    precondition(m, &r, &mut z);
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rel = norm2(&r) / bnorm;
    let mut history = vec![rel];
    let mut it = 0;
    while rel > opts.rel_tol && it < opts.max_iters {
        a.mul_vec_into(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(LinalgError::Breakdown { iteration: it });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        precondition(m, &r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
        rel = norm2(&r) / bnorm;
        history.push(rel);
    }
    Ok(KrylovOutcome {
        x,
        relative_residual: rel,
        iterations: it,
        converged: rel <= opts.rel_tol,
        residual_history: history,
    })
}
