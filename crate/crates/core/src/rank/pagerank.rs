use std::io::{self, Write};

use super::google::GoogleOperator;
use super::par::participation_ratio;
use crate::error::{invalid, Error, Result};
use crate::ulam_net::CellGrid;

/// Power-iteration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankOptions {
    /// Stop once the L1 change between successive iterates drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Return the last iterate instead of an error when `max_iter` is hit.
    /// Always treated as set when `alpha == 1`.
    pub allow_unconverged: bool,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200_000,
            allow_unconverged: false,
        }
    }
}

/// A probability vector over nodes together with its ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    pub p: Vec<f64>,
    /// Node indices by decreasing `p`, ties by increasing index.
    pub order: Vec<usize>,
    pub xi: f64,
    pub alpha: f64,
    pub iterations: usize,
    /// L1 change of the final iteration.
    pub residual: f64,
    pub converged: bool,
}

impl RankVector {
    /// Wraps an arbitrary nonnegative vector, normalizing it to unit sum.
    pub fn from_probabilities(mut p: Vec<f64>, alpha: f64) -> Result<Self> {
        if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(invalid("p", "entries must be finite and nonnegative"));
        }
        let total: f64 = p.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroVector);
        }
        p.iter_mut().for_each(|v| *v /= total);
        let xi = participation_ratio(&p)?;
        let order = rank_order(&p);
        Ok(Self {
            p,
            order,
            xi,
            alpha,
            iterations: 0,
            residual: 0.0,
            converged: true,
        })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    /// `p` in rank order, `sorted()[0]` being the top node.
    pub fn sorted(&self) -> Vec<f64> {
        self.order.iter().map(|&j| self.p[j]).collect()
    }

    /// TSV with columns `rank_index node_index x_center y_center p`;
    /// ranks start at 1.
    pub fn write_tsv<W: Write>(&self, grid: &CellGrid, mut w: W) -> io::Result<()> {
        writeln!(w, "# rank_index\tnode_index\tx_center\ty_center\tp")?;
        for (r, &j) in self.order.iter().enumerate() {
            let (x, y) = grid.cell_center(j);
            writeln!(w, "{}\t{}\t{}\t{}\t{:e}", r + 1, j, x, y, self.p[j])?;
        }
        Ok(())
    }
}

fn rank_order(p: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_unstable_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    order
}

/// PageRank by power iteration `v <- G v`, renormalized to unit sum after
/// every step. Starts from `v0` or the uniform vector.
///
/// At `alpha = 1` the step is `v <- (v + S v) / 2`. It has the same fixed
/// points and the same limit from `v0`, but eigenvalues of `S` on the unit
/// circle other than 1 (periodic attractors) no longer make it oscillate.
pub fn pagerank(g: &GoogleOperator, opts: &PageRankOptions, v0: Option<&[f64]>) -> Result<RankVector> {
    let n = g.n();
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if opts.max_iter == 0 {
        return Err(invalid("max_iter", "must be at least 1"));
    }
    let mut v = match v0 {
        Some(v0) => {
            if v0.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v0.len(),
                });
            }
            let total: f64 = v0.iter().sum();
            if v0.iter().any(|&x| !(x >= 0.0)) || !(total > 0.0) {
                return Err(invalid("v0", "must be a nonnegative vector with positive sum"));
            }
            v0.iter().map(|x| x / total).collect()
        }
        None => vec![1.0 / n as f64; n],
    };
    let mut next = vec![0.0; n];
    let lazy = g.alpha() == 1.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        g.apply_into(&v, &mut next)?;
        if lazy {
            for (a, b) in next.iter_mut().zip(&v) {
                *a = 0.5 * (*a + b);
            }
        }
        iterations += 1;
        let total: f64 = next.iter().sum();
        let inv = 1.0 / total;
        residual = 0.0;
        for (a, b) in next.iter_mut().zip(&v) {
            *a *= inv;
            residual += (*a - b).abs();
        }
        std::mem::swap(&mut v, &mut next);
        if residual < opts.tol {
            break;
        }
    }
    let converged = residual < opts.tol;
    if !converged && !opts.allow_unconverged && g.alpha() < 1.0 {
        return Err(Error::NotConverged {
            iterations,
            residual,
        });
    }
    let xi = participation_ratio(&v)?;
    let order = rank_order(&v);
    Ok(RankVector {
        p: v,
        order,
        xi,
        alpha: g.alpha(),
        iterations,
        residual,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CscMatrix;

    fn three() -> CscMatrix {
        CscMatrix::from_dense(3, &[0.0, 1.0, 0.5, 1.0, 0.0, 0.5, 0.0, 0.0, 0.0]).unwrap()
    }

    /// Gaussian elimination with partial pivoting, row-major `a`.
    fn solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for c in 0..n {
            let piv = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs())).unwrap();
            for k in 0..n {
                a.swap(c * n + k, piv * n + k);
            }
            b.swap(c, piv);
            for r in c + 1..n {
                let f = a[r * n + c] / a[c * n + c];
                for k in c..n {
                    a[r * n + k] -= f * a[c * n + k];
                }
                b[r] -= f * b[c];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
            x[r] = (b[r] - s) / a[r * n + r];
        }
        x
    }

    #[test]
    fn alpha_zero_is_uniform_after_one_step() {
        let s = three();
        let g = GoogleOperator::new(&s, 0.0).unwrap();
        let r = pagerank(&g, &PageRankOptions::default(), None).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.p.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-16));
        assert_eq!(r.order, vec![0, 1, 2]);
    }

    #[test]
    fn three_node_linear_solve() {
        let s = three();
        let alpha = 0.85;
        let n = 3;
        let mut a = vec![0.0; 9];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = f64::from(u8::from(i == j)) - alpha * s.get(i, j);
            }
        }
        let x = solve(a, vec![(1.0 - alpha) / 3.0; 3]);
        let total: f64 = x.iter().sum();
        let g = GoogleOperator::new(&s, alpha).unwrap();
        let r = pagerank(&g, &PageRankOptions::default(), None).unwrap();
        for i in 0..n {
            assert!((r.p[i] - x[i] / total).abs() < 1e-10);
        }
        assert!(r.converged);
        assert_eq!(r.order, vec![0, 1, 2]);
        assert!((r.p[0] - r.p[1]).abs() < 1e-12 && r.p[2] < r.p[1]);
    }

    #[test]
    fn fixed_point_residual() {
        let s = three();
        let g = GoogleOperator::new(&s, 0.95).unwrap();
        let opts = PageRankOptions::default();
        let r = pagerank(&g, &opts, None).unwrap();
        let gp = g.apply(&r.p).unwrap();
        let res: f64 = gp.iter().zip(&r.p).map(|(a, b)| (a - b).abs()).sum();
        assert!(res < 10.0 * opts.tol);
    }

    #[test]
    fn periodic_chain_settles_at_unit_alpha() {
        // Plain iteration would swap the two entries forever.
        let s = CscMatrix::from_dense(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let g = GoogleOperator::new(&s, 1.0).unwrap();
        let r = pagerank(&g, &PageRankOptions::default(), Some(&[1.0, 0.0])).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 2);
        assert_eq!(r.p, vec![0.5, 0.5]);
    }

    #[test]
    fn non_convergence_is_reported() {
        let s = CscMatrix::from_dense(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let opts = PageRankOptions {
            max_iter: 50,
            ..Default::default()
        };
        // 1 -> 2 -> 3 -> 3 needs two lazy steps per hop
        let chain = CscMatrix::from_dense(3, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0]).unwrap();
        let g = GoogleOperator::new(&chain, 1.0).unwrap();
        let short = PageRankOptions { max_iter: 3, ..opts };
        let r = pagerank(&g, &short, Some(&[1.0, 0.0, 0.0])).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
        assert!(r.residual > 0.1);

        let g = GoogleOperator::new(&s, 0.999_999).unwrap();
        let err = pagerank(&g, &opts, Some(&[1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::NotConverged { iterations: 50, .. }));
    }

    #[test]
    fn ties_by_node_index() {
        let r = RankVector::from_probabilities(vec![0.1, 0.3, 0.1, 0.3, 0.2], 1.0).unwrap();
        assert_eq!(r.order, vec![1, 3, 4, 0, 2]);
        assert_eq!(r.sorted(), vec![0.3, 0.3, 0.2, 0.1, 0.1]);
    }

    #[test]
    fn bad_inputs() {
        let s = three();
        let g = GoogleOperator::new(&s, 0.5).unwrap();
        let opts = PageRankOptions::default();
        assert!(pagerank(&g, &opts, Some(&[1.0])).is_err());
        assert!(pagerank(&g, &opts, Some(&[0.0, 0.0, 0.0])).is_err());
        let bad = PageRankOptions { tol: 0.0, ..opts };
        assert!(pagerank(&g, &bad, None).is_err());
    }

    #[test]
    fn tsv_rows() {
        let grid = CellGrid::square(2).unwrap();
        let r = RankVector::from_probabilities(vec![0.1, 0.4, 0.2, 0.3], 0.85).unwrap();
        let mut out = Vec::new();
        r.write_tsv(&grid, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("1\t1\t"));
        assert!(lines[4].starts_with("4\t0\t"));
    }
}
