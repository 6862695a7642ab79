//! Ordinary least-squares line fits used by the link, PageRank and Weyl
//! scaling analyses.

use crate::error::{Error, Result};

/// Result of fitting `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fitted points.
    pub rms_residual: f64,
    pub n_points: usize,
}

impl LineFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Least-squares line through `(x, y)` pairs. Requires at least `min_points`
/// pairs and a non-degenerate spread in `x`.
pub fn fit_line(points: &[(f64, f64)], min_points: usize) -> Result<LineFit> {
    let n = points.len();
    if n < min_points.max(2) {
        return Err(Error::InsufficientData {
            needed: min_points.max(2),
            found: n,
        });
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        let dx = x - mean_x;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }
    if sxx <= 0.0 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: 1,
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>();
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: (ss / nf).sqrt(),
        n_points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        let fit = fit_line(&pts, 2).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 3.0).abs() < 1e-13);
        assert!(fit.rms_residual < 1e-13);
    }

    #[test]
    fn too_few_points() {
        let pts = [(1.0, 1.0), (2.0, 2.0)];
        assert!(matches!(
            fit_line(&pts, 5),
            Err(Error::InsufficientData { needed: 5, found: 2 })
        ));
    }

    #[test]
    fn constant_x_is_degenerate() {
        let pts = [(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)];
        assert!(fit_line(&pts, 2).is_err());
    }
}
