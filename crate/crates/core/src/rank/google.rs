use crate::error::{invalid, Error, Result};
use crate::sparse::{CscMatrix, RowMajor};

/// `G = alpha S + (1 - alpha) E / N` applied without forming `E`.
#[derive(Debug, Clone)]
pub struct GoogleOperator<'a> {
    s: &'a CscMatrix,
    rows: RowMajor,
    alpha: f64,
}

impl<'a> GoogleOperator<'a> {
    /// `s` is expected to be column-stochastic (not re-checked here).
    pub fn new(s: &'a CscMatrix, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid("alpha", format!("{alpha} is outside [0, 1]")));
        }
        Ok(Self {
            s,
            rows: RowMajor::new(s),
            alpha,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.s.n()
    }

    pub fn matrix(&self) -> &CscMatrix {
        self.s
    }

    /// `out = G v`.
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.n();
        for len in [v.len(), out.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        self.rows.mul_vec_into(v, out);
        let teleport = (1.0 - self.alpha) * v.iter().sum::<f64>() / n as f64;
        let alpha = self.alpha;
        for o in out.iter_mut() {
            *o = alpha * *o + teleport;
        }
        Ok(())
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }
}
