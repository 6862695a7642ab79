//! Column-compressed sparse matrices.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Maximal deviation of a column sum from 1 accepted by the stochasticity
/// checks.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// A square sparse matrix in compressed-column form.
///
/// Row indices inside each column are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Assembles a matrix from per-column `(row, value)` lists. Entries are
    /// sorted by row and duplicates summed; explicit zeros are dropped.
    pub fn from_columns(n: usize, columns: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        if columns.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: columns.len(),
            });
        }
        let nnz: usize = columns.iter().map(Vec::len).sum();
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        col_ptr.push(0);
        for mut col in columns {
            col.sort_unstable_by_key(|e| e.0);
            let mut last: Option<u32> = None;
            for (i, v) in col {
                if i as usize >= n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: i as usize + 1,
                    });
                }
                if last == Some(i) {
                    *values.last_mut().unwrap() += v;
                } else {
                    row_idx.push(i);
                    values.push(v);
                    last = Some(i);
                }
            }
            col_ptr.push(row_idx.len());
        }
        let mut m = Self {
            n,
            col_ptr,
            row_idx,
            values,
        };
        m.drop_zeros();
        Ok(m)
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut col_ptr = Vec::with_capacity(self.n + 1);
        let mut row_idx = Vec::with_capacity(self.row_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        col_ptr.push(0);
        for j in 0..self.n {
            for (i, v) in self.column(j) {
                if v != 0.0 {
                    row_idx.push(i as u32);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        *self = Self {
            n: self.n,
            col_ptr,
            row_idx,
            values,
        };
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n as u32).collect(),
            values: vec![1.0; n],
        }
    }

    /// Dense row-major input, mainly for tests and small examples.
    pub fn from_dense(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: rows.len(),
            });
        }
        let columns = (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&i| rows[i * n + j] != 0.0)
                    .map(|i| (i as u32, rows[i * n + j]))
                    .collect()
            })
            .collect();
        Self::from_columns(n, columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_indices(&self) -> &[u32] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Nonzero `(row, value)` pairs of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[r.clone()]
            .iter()
            .zip(&self.values[r])
            .map(|(&i, &v)| (i as usize, v))
    }

    pub fn column_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        match self.row_idx[r.clone()].binary_search(&(i as u32)) {
            Ok(pos) => self.values[r.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.column(j).map(|(_, v)| v).sum()).collect()
    }

    /// Checks that every entry lies in `[0, 1]` and every column sums to 1
    /// within [`STOCHASTIC_TOL`].
    pub fn validate_stochastic(&self) -> Result<()> {
        for j in 0..self.n {
            let mut sum = 0.0;
            for (_, v) in self.column(j) {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::NotStochastic { column: j, sum: v });
                }
                sum += v;
            }
            if (sum - 1.0).abs() >= STOCHASTIC_TOL {
                return Err(Error::NotStochastic { column: j, sum });
            }
        }
        Ok(())
    }

    /// `out = A v`, serial scatter over columns.
    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n);
        assert_eq!(out.len(), self.n);
        out.fill(0.0);
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0.0 {
                continue;
            }
            for (i, a) in self.column(j) {
                out[i] += a * vj;
            }
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.mul_vec_into(v, &mut out);
        out
    }

    /// The transpose, i.e. the same matrix in compressed-row form.
    pub fn transpose(&self) -> CscMatrix {
        let n = self.n;
        let mut counts = vec![0usize; n + 1];
        for &i in &self.row_idx {
            counts[i as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = vec![0u32; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for j in 0..n {
            for (i, v) in self.column(j) {
                let p = next[i];
                row_idx[p] = j as u32;
                values[p] = v;
                next[i] += 1;
            }
        }
        CscMatrix {
            n,
            col_ptr,
            row_idx,
            values,
        }
    }
}

/// Row-compressed view of a [`CscMatrix`], used for gather-style products
/// that split cleanly across threads.
#[derive(Debug, Clone)]
pub struct RowMajor {
    t: CscMatrix,
}

impl RowMajor {
    pub fn new(a: &CscMatrix) -> Self {
        Self { t: a.transpose() }
    }

    pub fn n(&self) -> usize {
        self.t.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.t.column(i)
    }

    /// `out = A v`; rows are processed in parallel chunks.
    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.t.n);
        assert_eq!(out.len(), self.t.n);
        const CHUNK: usize = 4096;
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (off, o) in chunk.iter_mut().enumerate() {
                let i = base + off;
                let r = self.t.col_ptr[i]..self.t.col_ptr[i + 1];
                let mut acc = 0.0;
                for (&j, &a) in self.t.row_idx[r.clone()].iter().zip(&self.t.values[r]) {
                    acc += a * v[j as usize];
                }
                *o = acc;
            }
        });
    }
}
