use std::collections::HashMap;
use std::io::{self, Write};
use std::sync::Arc;

use super::google::GoogleOperator;
use super::pagerank::{pagerank, PageRankOptions};
use crate::error::{invalid, Result};
use crate::typical_map::PhaseSet;
use crate::ulam_net::{build_ulam_matrix, CellGrid, UlamMatrix};

/// Smallest `N_max / N_min` span over which a verdict is issued.
pub const MIN_SPAN: f64 = 16.0;
/// `xi(N_max) / xi(N_min)` above which a PageRank counts as delocalized.
pub const GROWTH_THRESHOLD: f64 = 2.0;

/// Supplies Ulam matrices for square grids of a given side.
pub trait MatrixSource {
    fn ulam_matrix(&mut self, ps: &PhaseSet, side: usize) -> Result<Arc<UlamMatrix>>;
}

/// Builds every requested matrix from scratch.
#[derive(Debug, Clone, Copy)]
pub struct FreshBuild {
    pub n_c: usize,
    pub seed: u64,
}

impl MatrixSource for FreshBuild {
    fn ulam_matrix(&mut self, ps: &PhaseSet, side: usize) -> Result<Arc<UlamMatrix>> {
        Ok(Arc::new(build_ulam_matrix(ps, CellGrid::square(side)?, self.n_c, self.seed)?))
    }
}

/// Keeps built matrices keyed by map parameters and grid side.
#[derive(Debug, Default)]
pub struct MatrixCache {
    n_c: usize,
    seed: u64,
    entries: HashMap<(String, usize), Arc<UlamMatrix>>,
}

impl MatrixCache {
    pub fn new(n_c: usize, seed: u64) -> Self {
        Self {
            n_c,
            seed,
            entries: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

impl MatrixSource for MatrixCache {
    fn ulam_matrix(&mut self, ps: &PhaseSet, side: usize) -> Result<Arc<UlamMatrix>> {
        let key = (ps.to_config(), side);
        if let Some(m) = self.entries.get(&key) {
            return Ok(Arc::clone(m));
        }
        let m = FreshBuild {
            n_c: self.n_c,
            seed: self.seed,
        }
        .ulam_matrix(ps, side)?;
        self.entries.insert(key, Arc::clone(&m));
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Delocalized,
    Localized,
    /// Too small an `N` span, or an endpoint failed to converge.
    Undetermined,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Delocalized => "delocalized",
            Verdict::Localized => "localized",
            Verdict::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    /// `alpha` or `k`, depending on the scan.
    pub param: f64,
    pub n: usize,
    pub xi: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub param_name: &'static str,
    pub rows: Vec<ScanRow>,
    /// One verdict per scanned parameter value, in input order.
    pub verdicts: Vec<(f64, Verdict)>,
}

impl ScanReport {
    fn new(param_name: &'static str, params: &[f64], rows: Vec<ScanRow>) -> Self {
        let verdicts = params.iter().map(|&p| (p, verdict(&rows, p))).collect();
        Self {
            param_name,
            rows,
            verdicts,
        }
    }

    pub fn xi(&self, param: f64, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.param == param && r.n == n)
            .map(|r| r.xi)
    }

    pub fn verdict(&self, param: f64) -> Option<Verdict> {
        self.verdicts.iter().find(|v| v.0 == param).map(|v| v.1)
    }

    pub fn n_max(&self) -> usize {
        self.rows.iter().map(|r| r.n).max().unwrap_or(0)
    }

    /// `(largest delocalized alpha, smallest localized alpha)` when every
    /// delocalized value lies below every localized one.
    pub fn alpha_c_bracket(&self) -> Option<(f64, f64)> {
        let deloc = self
            .verdicts
            .iter()
            .filter(|v| v.1 == Verdict::Delocalized)
            .map(|v| v.0)
            .fold(None, |m: Option<f64>, a| Some(m.map_or(a, |m| m.max(a))))?;
        let loc = self
            .verdicts
            .iter()
            .filter(|v| v.1 == Verdict::Localized)
            .map(|v| v.0)
            .fold(None, |m: Option<f64>, a| Some(m.map_or(a, |m| m.min(a))))?;
        (deloc < loc).then_some((deloc, loc))
    }

    /// Smallest parameter from which on every scanned value is delocalized.
    pub fn delocalization_onset(&self) -> Option<f64> {
        let mut sorted = self.verdicts.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut onset = None;
        for &(p, v) in sorted.iter().rev() {
            if v != Verdict::Delocalized {
                break;
            }
            onset = Some(p);
        }
        onset
    }

    /// Parameter with the largest `xi` at the largest `N`, restricted to
    /// values below the delocalization onset.
    pub fn localized_peak(&self) -> Option<(f64, f64)> {
        let n = self.n_max();
        let limit = self.delocalization_onset().unwrap_or(f64::INFINITY);
        self.rows
            .iter()
            .filter(|r| r.n == n && r.param < limit)
            .map(|r| (r.param, r.xi))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// TSV: `param N xi iterations residual converged`, then one
    /// `# verdict` line per parameter.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {}\tN\txi\titerations\tresidual\tconverged", self.param_name)?;
        for r in &self.rows {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{:e}\t{}",
                r.param, r.n, r.xi, r.iterations, r.residual, r.converged
            )?;
        }
        for (p, v) in &self.verdicts {
            writeln!(w, "# verdict\t{}={}\t{}", self.param_name, p, v.label())?;
        }
        Ok(())
    }
}

fn verdict(rows: &[ScanRow], param: f64) -> Verdict {
    let mine: Vec<&ScanRow> = rows.iter().filter(|r| r.param == param).collect();
    let (Some(lo), Some(hi)) = (mine.iter().min_by_key(|r| r.n), mine.iter().max_by_key(|r| r.n)) else {
        return Verdict::Undetermined;
    };
    let ok = |r: &ScanRow| r.converged || r.alpha == 1.0;
    if (hi.n as f64) < MIN_SPAN * lo.n as f64 || !ok(lo) || !ok(hi) {
        return Verdict::Undetermined;
    }
    if hi.xi / lo.xi > GROWTH_THRESHOLD {
        Verdict::Delocalized
    } else {
        Verdict::Localized
    }
}

fn check_lists(params: &[f64], name: &'static str, sides: &[usize]) -> Result<()> {
    if params.is_empty() {
        return Err(invalid(name, "no values to scan"));
    }
    if sides.is_empty() {
        return Err(invalid("grid_sizes", "no grid sizes to scan"));
    }
    Ok(())
}

fn row(s: &UlamMatrix, param: f64, alpha: f64, opts: &PageRankOptions) -> Result<ScanRow> {
    let g = GoogleOperator::new(s.matrix(), alpha)?;
    let opts = PageRankOptions {
        allow_unconverged: true,
        ..*opts
    };
    let r = pagerank(&g, &opts, None)?;
    Ok(ScanRow {
        param,
        n: s.n(),
        xi: r.xi,
        iterations: r.iterations,
        residual: r.residual,
        converged: r.converged,
        alpha,
    })
}

/// PageRank `xi` over all `(alpha, side x side)` combinations; one matrix
/// per grid size.
pub fn delocalization_scan_with<M: MatrixSource>(
    source: &mut M,
    ps: &PhaseSet,
    alphas: &[f64],
    sides: &[usize],
    opts: &PageRankOptions,
) -> Result<ScanReport> {
    check_lists(alphas, "alphas", sides)?;
    let mut rows = Vec::new();
    for &side in sides {
        let s = source.ulam_matrix(ps, side)?;
        for &alpha in alphas {
            rows.push(row(&s, alpha, alpha, opts)?);
        }
    }
    Ok(ScanReport::new("alpha", alphas, rows))
}

pub fn delocalization_scan(
    ps: &PhaseSet,
    alphas: &[f64],
    sides: &[usize],
    n_c: usize,
    seed: u64,
) -> Result<ScanReport> {
    delocalization_scan_with(&mut FreshBuild { n_c, seed }, ps, alphas, sides, &PageRankOptions::default())
}

/// Same as the alpha scan but varying `k` at fixed `alpha`.
pub fn k_scan_xi_with<M: MatrixSource>(
    source: &mut M,
    template: &PhaseSet,
    k_values: &[f64],
    alpha: f64,
    sides: &[usize],
    opts: &PageRankOptions,
) -> Result<ScanReport> {
    check_lists(k_values, "k_values", sides)?;
    let mut rows = Vec::new();
    for &side in sides {
        for &k in k_values {
            let s = source.ulam_matrix(&template.with_k(k)?, side)?;
            rows.push(row(&s, k, alpha, opts)?);
        }
    }
    Ok(ScanReport::new("k", k_values, rows))
}

pub fn k_scan_xi(
    template: &PhaseSet,
    k_values: &[f64],
    alpha: f64,
    sides: &[usize],
    n_c: usize,
    seed: u64,
) -> Result<ScanReport> {
    k_scan_xi_with(
        &mut FreshBuild { n_c, seed },
        template,
        k_values,
        alpha,
        sides,
        &PageRankOptions::default(),
    )
}
