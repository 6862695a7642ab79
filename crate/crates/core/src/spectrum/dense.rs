use crate::error::{invalid, Error, Result};
use crate::sparse::CscMatrix;

/// Largest dimension densified unless the caller raises the cap.
pub const DEFAULT_DENSE_CAP: usize = 22_500;

/// A square real matrix stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        sums
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Bytes needed to densify and fully decompose an `n x n` matrix: the
/// matrix, its Schur vectors and a few `n`-vectors.
pub fn dense_memory_estimate(n: usize) -> u128 {
    let n = n as u128;
    2 * n * n * 8 + 16 * n * 8
}

/// `G_ij = alpha S_ij + (1 - alpha) / N` as a dense matrix. Refuses
/// dimensions above `cap`.
pub fn materialize_dense(s: &CscMatrix, alpha: f64, cap: usize) -> Result<DenseMatrix> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} is outside [0, 1]")));
    }
    let n = s.n();
    if n > cap {
        return Err(Error::DenseCapExceeded {
            n,
            cap,
            bytes: dense_memory_estimate(n),
        });
    }
    let mut m = DenseMatrix {
        n,
        data: vec![(1.0 - alpha) / n as f64; n * n],
    };
    for j in 0..n {
        for (i, v) in s.column(j) {
            m.data[i * n + j] += alpha * v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> CscMatrix {
        CscMatrix::from_dense(3, &[0.0, 1.0, 0.5, 1.0, 0.0, 0.5, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn alpha_limits() {
        let s = three();
        let d = materialize_dense(&s, 1.0, 10).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d.get(i, j), s.get(i, j));
            }
        }
        let d = materialize_dense(&s, 0.0, 10).unwrap();
        assert!(d.as_slice().iter().all(|&v| v == 1.0 / 3.0));
    }

    #[test]
    fn hand_values() {
        let d = materialize_dense(&three(), 0.85, 10).unwrap();
        let expect = [[0.05, 0.9, 0.475], [0.9, 0.05, 0.475], [0.05, 0.05, 0.05]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((d.get(i, j) - expect[i][j]).abs() < 1e-15);
            }
        }
        for c in d.column_sums() {
            assert!((c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_refusal_reports_memory() {
        let err = materialize_dense(&CscMatrix::identity(50), 1.0, 49).unwrap_err();
        match err {
            Error::DenseCapExceeded { n, cap, bytes } => {
                assert_eq!((n, cap), (50, 49));
                assert!(bytes >= 2 * 50 * 50 * 8);
            }
            e => panic!("{e}"),
        }
    }
}
