use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::error::{invalid, Result};
use crate::fit::fit_line;
use crate::sparse::CscMatrix;
use crate::typical_map::{ks_entropy_theory, PhaseSet};

/// Number of nodes per integer link count.
pub type DegreeHistogram = BTreeMap<usize, usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct LinkStats {
    pub in_degree: DegreeHistogram,
    pub out_degree: DegreeHistogram,
    /// Nodes that no column points to.
    pub n_zero_in: usize,
    pub n_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }
}

impl LinkStats {
    pub fn histogram(&self, dir: Direction) -> &DegreeHistogram {
        match dir {
            Direction::In => &self.in_degree,
            Direction::Out => &self.out_degree,
        }
    }

    /// Mean number of links per node (the same for both directions).
    pub fn mean_degree(&self) -> f64 {
        let links: usize = self.out_degree.iter().map(|(k, c)| k * c).sum();
        links as f64 / self.n_nodes as f64
    }

    /// TSV with columns `direction, kappa, count`.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# direction\tkappa\tcount")?;
        for dir in [Direction::In, Direction::Out] {
            for (k, c) in self.histogram(dir) {
                writeln!(w, "{}\t{k}\t{c}", dir.label())?;
            }
        }
        Ok(())
    }
}

/// In/out degree histograms of the nonzero pattern of `s`.
pub fn link_stats(s: &CscMatrix) -> LinkStats {
    let n = s.n();
    let mut in_deg = vec![0usize; n];
    for &i in s.row_indices() {
        in_deg[i as usize] += 1;
    }
    let mut in_degree = DegreeHistogram::new();
    for &d in &in_deg {
        *in_degree.entry(d).or_default() += 1;
    }
    let mut out_degree = DegreeHistogram::new();
    for j in 0..n {
        *out_degree.entry(s.column_nnz(j)).or_default() += 1;
    }
    LinkStats {
        n_zero_in: in_degree.get(&0).copied().unwrap_or(0),
        in_degree,
        out_degree,
        n_nodes: n,
    }
}

/// `P(kappa) ~ prefactor * kappa^(-mu)` over an inclusive range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub mu: f64,
    pub prefactor: f64,
    pub fit_range: (usize, usize),
    /// RMS residual in decimal log-log coordinates.
    pub residual: f64,
    pub n_bins: usize,
}

pub const MIN_FIT_BINS: usize = 5;

/// Least-squares fit of `log10 P` against `log10 kappa` over nonzero bins
/// with `kappa` in `fit_range` (bins with `kappa = 0` never take part).
pub fn fit_power_law(hist: &DegreeHistogram, fit_range: (usize, usize)) -> Result<PowerLawFit> {
    let (lo, hi) = fit_range;
    if lo > hi {
        return Err(invalid("fit_range", format!("[{lo}, {hi}] is empty")));
    }
    let pts: Vec<(f64, f64)> = hist
        .range(lo.max(1)..=hi)
        .filter(|(_, &c)| c > 0)
        .map(|(&k, &c)| ((k as f64).log10(), (c as f64).log10()))
        .collect();
    let line = fit_line(&pts, MIN_FIT_BINS)?;
    Ok(PowerLawFit {
        mu: -line.slope,
        prefactor: 10f64.powf(line.intercept),
        fit_range,
        residual: line.rms_residual,
        n_bins: line.n_points,
    })
}

/// Default `kappa` range over the decaying side of the histogram, from the
/// typical link count 10: `[10, 50]` when one period stretches a cell by a
/// small factor (`exp(h T) < e^1.5`, e.g. `T10` at `k = 0.22`), `[10, 200]`
/// for stronger stretching.
pub fn default_fit_range(ps: &PhaseSet) -> (usize, usize) {
    let stretch = ks_entropy_theory(ps.k()) * ps.period() as f64;
    if stretch < 1.5 {
        (10, 50)
    } else {
        (10, 200)
    }
}

/// TSV fit report with columns `direction, mu, prefactor, range, residual`.
pub fn write_fit_report<W: Write>(mut w: W, fits: &[(Direction, PowerLawFit)]) -> io::Result<()> {
    writeln!(w, "# direction\tmu\tprefactor\trange\tresidual")?;
    for (dir, f) in fits {
        writeln!(
            w,
            "{}\t{}\t{}\t{}-{}\t{}",
            dir.label(),
            f.mu,
            f.prefactor,
            f.fit_range.0,
            f.fit_range.1,
            f.residual
        )?;
    }
    Ok(())
}
