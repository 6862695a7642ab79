use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Error, Result};

/// Uniform partition of `[0, 2pi) x [-pi, pi)` into `n_x * n_y` cells.
///
/// Node `j = n_y * cx + cy`, where `cx` is the column (x-bin) and `cy` the
/// row (y-bin) of the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellGrid {
    n_x: usize,
    n_y: usize,
}

impl CellGrid {
    pub fn new(n_x: usize, n_y: usize) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(invalid("grid", "both axes need at least one cell"));
        }
        if n_x.checked_mul(n_y).is_none_or(|n| n > u32::MAX as usize) {
            return Err(invalid("grid", format!("{n_x} x {n_y} cells overflow the node index")));
        }
        Ok(Self { n_x, n_y })
    }

    /// `n x n` cells.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_width_x(&self) -> f64 {
        TAU / self.n_x as f64
    }

    pub fn cell_width_y(&self) -> f64 {
        TAU / self.n_y as f64
    }

    /// Effective noise amplitude introduced by the discretization,
    /// `2pi / sqrt(N)`.
    pub fn sigma(&self) -> f64 {
        TAU / (self.len() as f64).sqrt()
    }

    /// Node containing `(x, y)`; rejects points outside the region.
    pub fn cell_of(&self, x: f64, y: f64) -> Result<usize> {
        if !((0.0..TAU).contains(&x) && (-PI..PI).contains(&y)) {
            return Err(Error::OutOfRegion { x, y });
        }
        Ok(self.bin(x, y))
    }

    /// Binning for points already known to be inside the region.
    #[inline]
    pub(crate) fn bin(&self, x: f64, y: f64) -> usize {
        let cx = ((x / self.cell_width_x()) as usize).min(self.n_x - 1);
        let cy = (((y + PI) / self.cell_width_y()) as usize).min(self.n_y - 1);
        self.n_y * cx + cy
    }

    /// `(cx, cy)` of node `j`.
    pub fn coords(&self, j: usize) -> (usize, usize) {
        (j / self.n_y, j % self.n_y)
    }

    /// Lower-left corner of the cell of node `j`.
    pub fn cell_origin(&self, j: usize) -> (f64, f64) {
        let (cx, cy) = self.coords(j);
        (
            cx as f64 * self.cell_width_x(),
            -PI + cy as f64 * self.cell_width_y(),
        )
    }

    pub fn cell_center(&self, j: usize) -> (f64, f64) {
        let (cx, cy) = self.coords(j);
        (
            (cx as f64 + 0.5) * self.cell_width_x(),
            -PI + (cy as f64 + 0.5) * self.cell_width_y(),
        )
    }
}
