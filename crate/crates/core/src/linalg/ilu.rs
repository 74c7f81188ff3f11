//! ILU(0): incomplete LU factorisation restricted to the pattern of `A`.
//!
//! L is unit lower triangular and stored strictly below the diagonal, U is
//! stored on and above it, both in one CSR array sharing the source pattern.

use super::{LinalgError, SparseMatrix};

#[derive(Debug, Clone)]
pub struct IluPreconditioner {
    factors: SparseMatrix,
    diag: Vec<usize>,
}

impl IluPreconditioner {
    pub fn new(a: &SparseMatrix) -> Result<Self, LinalgError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(LinalgError::NotSquare {
                rows: n,
                cols: a.ncols(),
            });
        }
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            diag.push(
                a.position(i, i)
                    .ok_or(LinalgError::MissingDiagonal { row: i })?,
            );
        }

        let mut lu = a.clone();
        let offsets = lu.row_offsets().to_vec();
        let cols = lu.col_indices().to_vec();
        // position of column j in the current row, or usize::MAX
        let mut work = vec![usize::MAX; n];
        for i in 0..n {
            let (start, end) = (offsets[i], offsets[i + 1]);
            for k in start..end {
                work[cols[k]] = k;
            }
            for kk in start..end {
                let k = cols[kk];
                if k >= i {
                    break;
                }
                let pivot = lu.values()[diag[k]];
                if pivot == 0.0 {
                    return Err(LinalgError::ZeroPivot { row: k });
                }
                let lik = lu.values()[kk] / pivot;
                lu.values_mut()[kk] = lik;
                for kj in diag[k] + 1..offsets[k + 1] {
                    let pos = work[cols[kj]];
                    if pos != usize::MAX {
                        let ukj = lu.values()[kj];
                        lu.values_mut()[pos] -= lik * ukj;
                    }
                }
            }
            if lu.values()[diag[i]] == 0.0 {
                return Err(LinalgError::ZeroPivot { row: i });
            }
            for k in start..end {
                work[cols[k]] = usize::MAX;
            }
        }
        Ok(Self { factors: lu, diag })
    }

    /// Combined factors: strictly-lower part is L (unit diagonal implied),
    /// the rest is U.
    pub fn factors(&self) -> &SparseMatrix {
        &self.factors
    }

    pub fn lower(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Greater => self.factors.get(i, j),
            std::cmp::Ordering::Less => 0.0,
        }
    }

    pub fn upper(&self, i: usize, j: usize) -> f64 {
        if i <= j {
            self.factors.get(i, j)
        } else {
            0.0
        }
    }

    /// Solves `L U z = r`.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = self.diag.len();
        let offsets = self.factors.row_offsets();
        let cols = self.factors.col_indices();
        let vals = self.factors.values();
        for i in 0..n {
            let mut s = r[i];
            for k in offsets[i]..self.diag[i] {
                s -= vals[k] * z[cols[k]];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in self.diag[i] + 1..offsets[i + 1] {
                s -= vals[k] * z[cols[k]];
            }
            z[i] = s / vals[self.diag[i]];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_factors_trivially() {
        let a = SparseMatrix::from_dense(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let ilu = IluPreconditioner::new(&a).unwrap();
        assert_eq!(ilu.lower(1, 0), 0.0);
        assert_eq!(ilu.upper(0, 0), 2.0);
        assert_eq!(ilu.upper(1, 1), 3.0);
    }

    #[test]
    fn full_pattern_gives_exact_lu() {
        let a = SparseMatrix::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let ilu = IluPreconditioner::new(&a).unwrap();
        assert_eq!(ilu.lower(1, 0), 0.25);
        assert_eq!(ilu.upper(0, 0), 4.0);
        assert_eq!(ilu.upper(0, 1), 1.0);
        assert_eq!(ilu.upper(1, 1), 2.75);
        let mut z = vec![0.0; 2];
        ilu.apply(&[5.0, 4.0], &mut z);
        assert!((z[0] - 1.0).abs() < 1e-15 && (z[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tridiagonal_product_reproduces_pattern() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0 + i as f64 * 0.01));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let ilu = IluPreconditioner::new(&a).unwrap();
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let lu: f64 = (0..n).map(|k| ilu.lower(i, k) * ilu.upper(k, j)).sum();
                assert!((lu - v).abs() < 1e-13, "({i},{j}): {lu} vs {v}");
            }
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let a = SparseMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            IluPreconditioner::new(&a),
            Err(LinalgError::ZeroPivot { row: 0 })
        ));
    }
}
