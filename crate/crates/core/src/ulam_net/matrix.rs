use rand::Rng;
use rayon::prelude::*;

use super::grid::CellGrid;
use crate::error::{invalid, Result};
use crate::rng::{self, Purpose};
use crate::sparse::CscMatrix;
use crate::typical_map::{iterate_period_batch, PhaseSet};

/// Ulam approximation of the Perron-Frobenius operator of one map period:
/// `S_ij` is the fraction of the `n_c` trajectories started in cell `j`
/// that end in cell `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct UlamMatrix {
    pub(crate) matrix: CscMatrix,
    pub(crate) grid: CellGrid,
    pub(crate) n_c: usize,
    pub(crate) seed: u64,
    pub(crate) phase_set: Option<PhaseSet>,
}

impl UlamMatrix {
    pub fn matrix(&self) -> &CscMatrix {
        &self.matrix
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Map parameters the matrix was built from; `None` after import.
    pub fn phase_set(&self) -> Option<&PhaseSet> {
        self.phase_set.as_ref()
    }

    pub fn into_matrix(self) -> CscMatrix {
        self.matrix
    }
}

impl AsRef<CscMatrix> for UlamMatrix {
    fn as_ref(&self) -> &CscMatrix {
        &self.matrix
    }
}

struct Scratch {
    xs: Vec<f64>,
    ys: Vec<f64>,
    dest: Vec<u32>,
}

impl Scratch {
    fn with_capacity(n: usize) -> Self {
        Self {
            xs: Vec::with_capacity(n),
            ys: Vec::with_capacity(n),
            dest: Vec::with_capacity(n),
        }
    }

    fn clear(&mut self) {
        self.xs.clear();
        self.ys.clear();
        self.dest.clear();
    }
}

/// How the `n_c` starting points are placed inside a source cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// `m x m` sub-cell centers, `n_c = m^2`.
    Stratified(usize),
    /// Uniform random points from the cell's own stream.
    Random,
}

impl Placement {
    pub fn for_count(n_c: usize) -> Self {
        let m = (n_c as f64).sqrt().round() as usize;
        if m * m == n_c {
            Placement::Stratified(m)
        } else {
            Placement::Random
        }
    }
}

/// Builds the Ulam matrix of one map period.
///
/// Starting points form a stratified `sqrt(n_c) x sqrt(n_c)` sub-grid when
/// `n_c` is a perfect square and are drawn uniformly (from a per-cell stream
/// of `seed`) otherwise. Columns are built in parallel; the result does not
/// depend on the thread count.
pub fn build_ulam_matrix(ps: &PhaseSet, grid: CellGrid, n_c: usize, seed: u64) -> Result<UlamMatrix> {
    if n_c == 0 {
        return Err(invalid("n_c", "at least one trajectory per cell is required"));
    }
    if grid.is_empty() {
        return Err(invalid("grid", "grid has no cells"));
    }
    let n = grid.len();
    let placement = Placement::for_count(n_c);
    let inv_nc = 1.0 / n_c as f64;

    let columns: Vec<Vec<(u32, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::with_capacity(n_c),
            |scratch, j| {
                scratch.clear();
                let (x0, y0) = grid.cell_origin(j);
                let (wx, wy) = (grid.cell_width_x(), grid.cell_width_y());
                match placement {
                    Placement::Stratified(m) => {
                        let mf = m as f64;
                        for a in 0..m {
                            let x = x0 + (a as f64 + 0.5) * wx / mf;
                            for b in 0..m {
                                scratch.xs.push(x);
                                scratch.ys.push(y0 + (b as f64 + 0.5) * wy / mf);
                            }
                        }
                    }
                    Placement::Random => {
                        let mut r = rng::stream(seed, Purpose::CellSampling, j as u64);
                        for _ in 0..n_c {
                            let u: f64 = r.random();
                            let v: f64 = r.random();
                            scratch.xs.push(x0 + u * wx);
                            scratch.ys.push(y0 + v * wy);
                        }
                    }
                }
                iterate_period_batch(&mut scratch.xs, &mut scratch.ys, ps);
                let dest = &mut scratch.dest;
                dest.extend(
                    scratch
                        .xs
                        .iter()
                        .zip(&scratch.ys)
                        .map(|(&x, &y)| grid.bin(x, y) as u32),
                );
                dest.sort_unstable();
                let mut col = Vec::new();
                let mut iter = dest.iter().peekable();
                while let Some(&i) = iter.next() {
                    let mut count = 1usize;
                    while iter.next_if_eq(&&i).is_some() {
                        count += 1;
                    }
                    col.push((i, count as f64 * inv_nc));
                }
                col
            },
        )
        .collect();

    Ok(UlamMatrix {
        matrix: CscMatrix::from_columns(n, columns)?,
        grid,
        n_c,
        seed,
        phase_set: Some(ps.clone()),
    })
}

/// Column-normalizes a nonnegative integer adjacency matrix given as
/// `(row, column, count)` triples; columns without links become uniform
/// `1/N` columns.
pub fn normalize_adjacency(n: usize, links: &[(usize, usize, u64)]) -> Result<CscMatrix> {
    if n == 0 {
        return Err(invalid("n", "matrix must have at least one node"));
    }
    let mut columns: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for &(i, j, c) in links {
        if i >= n || j >= n {
            return Err(invalid("links", format!("entry ({i}, {j}) outside {n} x {n}")));
        }
        if c > 0 {
            columns[j].push((i as u32, c as f64));
        }
    }
    let uniform = 1.0 / n as f64;
    for col in &mut columns {
        let total: f64 = col.iter().map(|e| e.1).sum();
        if total == 0.0 {
            *col = (0..n as u32).map(|i| (i, uniform)).collect();
        } else {
            // Integer counts: merge duplicates before dividing so each entry
            // is a single rounded quotient.
            col.sort_unstable_by_key(|e| e.0);
            col.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            for e in col.iter_mut() {
                e.1 /= total;
            }
        }
    }
    CscMatrix::from_columns(n, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typical_map::phase_set_t10;

    #[test]
    fn placement_choice() {
        assert_eq!(Placement::for_count(10_000), Placement::Stratified(100));
        assert_eq!(Placement::for_count(1), Placement::Stratified(1));
        assert_eq!(Placement::for_count(1000), Placement::Random);
    }

    #[test]
    fn columns_are_stochastic() {
        let ps = phase_set_t10();
        for n_c in [1, 7, 16, 100] {
            let s = build_ulam_matrix(&ps, CellGrid::square(12).unwrap(), n_c, 3).unwrap();
            s.matrix().validate_stochastic().unwrap();
            for j in 0..s.n() {
                assert!(s.matrix().column_nnz(j) <= n_c.min(s.n()));
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let ps = phase_set_t10();
        let g = CellGrid::square(10).unwrap();
        let a = build_ulam_matrix(&ps, g, 50, 9).unwrap();
        let b = build_ulam_matrix(&ps, g, 50, 9).unwrap();
        let c = build_ulam_matrix(&ps, g, 50, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let ps = phase_set_t10();
        assert!(build_ulam_matrix(&ps, CellGrid::square(4).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn normalize_identity() {
        let s = normalize_adjacency(3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]).unwrap();
        assert_eq!(s, CscMatrix::identity(3));
    }

    #[test]
    fn dangling_column_becomes_uniform() {
        let s = normalize_adjacency(4, &[(1, 0, 2), (0, 1, 1), (3, 3, 5)]).unwrap();
        for i in 0..4 {
            assert_eq!(s.get(i, 2), 0.25);
        }
        s.validate_stochastic().unwrap();
    }

    #[test]
    fn normalize_by_hand() {
        // A = [[0,1],[1,1]]
        let s = normalize_adjacency(2, &[(1, 0, 1), (0, 1, 1), (1, 1, 1)]).unwrap();
        assert_eq!(s.get(0, 0), 0.0);
        assert_eq!(s.get(1, 0), 1.0);
        assert_eq!(s.get(0, 1), 0.5);
        assert_eq!(s.get(1, 1), 0.5);
    }

    #[test]
    fn duplicate_links_accumulate() {
        let s = normalize_adjacency(2, &[(0, 0, 1), (0, 0, 1), (1, 0, 2)]).unwrap();
        assert_eq!(s.get(0, 0), 0.5);
        assert_eq!(s.get(1, 0), 0.5);
    }
}
