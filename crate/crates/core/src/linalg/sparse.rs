//! Compressed-row sparse matrices.

use std::io::{self, Write};

use super::LinalgError;

/// Square or rectangular matrix in compressed row storage.
///
/// Column indices are strictly increasing within each row. Values may be
/// explicit zeros; the pattern is what ILU(0) and assembly work against.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix with the given per-row column sets and all values zero.
    /// Column sets are sorted and deduplicated.
    pub fn from_pattern(
        nrows: usize,
        ncols: usize,
        rows: &[Vec<usize>],
    ) -> Result<Self, LinalgError> {
        if rows.len() != nrows {
            return Err(LinalgError::DimensionMismatch {
                expected: nrows,
                found: rows.len(),
            });
        }
        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::new();
        row_offsets.push(0);
        for cols in rows {
            let mut cols = cols.clone();
            cols.sort_unstable();
            cols.dedup();
            if let Some(&c) = cols.last() {
                if c >= ncols {
                    return Err(LinalgError::IndexOutOfBounds {
                        row: row_offsets.len() - 1,
                        col: c,
                    });
                }
            }
            col_indices.extend_from_slice(&cols);
            row_offsets.push(col_indices.len());
        }
        let nnz = col_indices.len();
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values: vec![0.0; nnz],
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, LinalgError> {
        let mut rows = vec![Vec::new(); nrows];
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(LinalgError::IndexOutOfBounds { row: i, col: j });
            }
            rows[i].push(j);
        }
        let mut m = Self::from_pattern(nrows, ncols, &rows)?;
        for &(i, j, v) in triplets {
            m.add(i, j, v)?;
        }
        Ok(m)
    }

    /// Dense row-major input; exact zeros are dropped except on the diagonal.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(LinalgError::DimensionMismatch {
                    expected: m,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 || i == j {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, m, &triplets)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[a..b], &self.values[a..b])
    }

    /// Storage position of entry `(i, j)` if it is in the pattern.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = (self.row_offsets[i], self.row_offsets[i + 1]);
        self.col_indices[a..b].binary_search(&j).ok().map(|k| a + k)
    }

    /// Value at `(i, j)`, zero outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<(), LinalgError> {
        let k = self
            .position(i, j)
            .ok_or(LinalgError::NotInPattern { row: i, col: j })?;
        self.values[k] += v;
        Ok(())
    }

    pub fn clear_values(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut s = 0.0;
            for k in a..b {
                s += self.values[k] * x[self.col_indices[k]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// Largest `|A_ij - A_ji|` relative to the largest `|A_ij|`.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let t = if j < self.nrows { self.get(j, i) } else { 0.0 };
                worst = worst.max((v - t).abs());
            }
        }
        worst / scale
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        d
    }

    /// Imposes `x[dof] = value` by symmetric elimination: the known column is
    /// moved to the right-hand side, then row and column are cleared except
    /// for the diagonal.
    pub fn constrain_symmetric(&mut self, rhs: &mut [f64], constraints: &[(usize, f64)]) {
        let mut fixed = vec![None; self.nrows];
        for &(dof, value) in constraints {
            fixed[dof] = Some(value);
        }
        for i in 0..self.nrows {
            if fixed[i].is_some() {
                continue;
            }
            let (a, b) = (self.row_offsets[i], self.row_offsets[i + 1]);
            for k in a..b {
                if let Some(value) = fixed[self.col_indices[k]] {
                    rhs[i] -= self.values[k] * value;
                    self.values[k] = 0.0;
                }
            }
        }
        // keep the diagonal so constrained rows share the scale of the rest
        for &(dof, value) in constraints {
            let (a, b) = (self.row_offsets[dof], self.row_offsets[dof + 1]);
            let mut d = 1.0;
            for k in a..b {
                if self.col_indices[k] == dof {
                    if self.values[k] > 0.0 {
                        d = self.values[k];
                    }
                } else {
                    self.values[k] = 0.0;
                }
            }
            if let Some(k) = self.position(dof, dof) {
                self.values[k] = d;
                rhs[dof] = d * value;
            } else {
                rhs[dof] = value;
            }
        }
    }

    /// Writes the matrix as `row col value` lines (zero-based).
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "% {} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(out, "{i} {j} {v:e}")?;
            }
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
