use std::io::{self, Write};

use num_complex::Complex64;

use super::decompose::{google_spectrum, EigenOptions, SpectrumResult, DEGENERATE_ABS};
use crate::error::{invalid, Error, Result};
use crate::fit::fit_line;
use crate::rank::MatrixSource;
use crate::typical_map::{dimension_estimate, PhaseSet};

/// Default number of histogram bins over `[0, gamma_cut]`.
pub const DEFAULT_DENSITY_BINS: usize = 60;

/// Histogram estimate of `dW/dgamma` over the states with `gamma < gamma_cut`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub gamma_cut: f64,
    pub bin_width: f64,
    /// Normalized so that `sum(density) * bin_width == 1`.
    pub density: Vec<f64>,
    /// Number of states below the cut, the normalizing count.
    pub n_gamma: usize,
}

impl SpectralDensity {
    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.density.len()).map(|k| (k as f64 + 0.5) * self.bin_width)
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# gamma\tdensity")?;
        for (g, d) in self.centers().zip(&self.density) {
            writeln!(w, "{g}\t{d}")?;
        }
        writeln!(w, "# N_gamma\t{}", self.n_gamma)
    }
}

pub fn spectral_density(res: &SpectrumResult, bins: usize, gamma_cut: f64) -> Result<SpectralDensity> {
    if !(gamma_cut > 0.0 && gamma_cut.is_finite()) {
        return Err(invalid("gamma_cut", "must be positive and finite"));
    }
    if bins == 0 {
        return Err(invalid("bins", "must be at least 1"));
    }
    let width = gamma_cut / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut n_gamma = 0;
    for &g in &res.gammas {
        if g < gamma_cut {
            // |lambda| may exceed 1 by rounding
            let k = ((g.max(0.0) / width) as usize).min(bins - 1);
            counts[k] += 1;
            n_gamma += 1;
        }
    }
    if n_gamma == 0 {
        return Err(Error::InsufficientData { needed: 1, found: 0 });
    }
    let norm = 1.0 / (n_gamma as f64 * width);
    Ok(SpectralDensity {
        gamma_cut,
        bin_width: width,
        density: counts.iter().map(|&c| c as f64 * norm).collect(),
        n_gamma,
    })
}

/// Number of states with `gamma < gamma_b`.
pub fn count_below(res: &SpectrumResult, gamma_b: f64) -> usize {
    res.gammas.iter().filter(|&&g| g < gamma_b).count()
}

/// Power-law fit `N_gamma = A N^nu` of slow-mode counts.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylFit {
    pub gamma_b: f64,
    /// `(N, N_gamma)` per matrix size.
    pub counts: Vec<(usize, usize)>,
    pub a: f64,
    pub nu: f64,
    /// RMS residual of the fit in `log10 N_gamma`.
    pub residual: f64,
    /// `d - 1` from the dimension estimate, when an entropy is supplied.
    pub nu_theory: Option<f64>,
}

impl WeylFit {
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# N\tN_gamma")?;
        for (n, c) in &self.counts {
            writeln!(w, "{n}\t{c}")?;
        }
        let theory = self.nu_theory.map_or("nan".to_string(), |v| v.to_string());
        writeln!(w, "# gamma_b={}\tA={}\tnu={}\tnu_theory={}", self.gamma_b, self.a, self.nu, theory)
    }
}

/// `nu = d - 1 = 1 - gamma_c / (T h)`.
pub fn weyl_exponent_theory(ps: &PhaseSet, h: f64) -> Result<f64> {
    Ok(dimension_estimate(ps.gamma_c(), ps.period(), h)? - 1.0)
}

/// Least-squares fit of `log N_gamma` against `log N` over at least three
/// sizes.
pub fn weyl_fit(counts: &[(usize, usize)], gamma_b: f64, nu_theory: Option<f64>) -> Result<WeylFit> {
    if let Some(&(n, _)) = counts.iter().find(|c| c.1 == 0) {
        return Err(invalid("counts", format!("no states below gamma_b at N = {n}")));
    }
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(n, c)| ((n as f64).log10(), (c as f64).log10()))
        .collect();
    let line = fit_line(&pts, 3)?;
    Ok(WeylFit {
        gamma_b,
        counts: counts.to_vec(),
        a: 10f64.powf(line.intercept),
        nu: line.slope,
        residual: line.rms_residual,
        nu_theory,
    })
}

/// Builds, decomposes and counts slow modes for each grid side, then fits
/// the Weyl law. `h` (entropy per iteration) enables `nu_theory`.
#[allow(clippy::too_many_arguments)]
pub fn weyl_scan_with<M: MatrixSource>(
    source: &mut M,
    ps: &PhaseSet,
    sides: &[usize],
    alpha: f64,
    gamma_b: f64,
    opts: &EigenOptions,
    h: Option<f64>,
) -> Result<WeylFit> {
    if sides.len() < 3 {
        return Err(invalid("grid_sizes", "the Weyl fit needs at least three sizes"));
    }
    let mut counts = Vec::with_capacity(sides.len());
    for &side in sides {
        let s = source.ulam_matrix(ps, side)?;
        let res = google_spectrum(s.matrix(), alpha, opts)?;
        counts.push((res.n, count_below(&res, gamma_b)));
    }
    let nu_theory = h.map(|h| weyl_exponent_theory(ps, h)).transpose()?;
    weyl_fit(&counts, gamma_b, nu_theory)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub n: usize,
    /// Position in the sorted spectrum, 0 for the leading eigenvalue.
    pub index: usize,
    pub lambda: Complex64,
    /// `1 - |lambda|`.
    pub gap: f64,
}

pub fn spectrum_gaps(res: &SpectrumResult, n_top: usize) -> Vec<GapRow> {
    res.eigenvalues
        .iter()
        .take(n_top)
        .enumerate()
        .map(|(index, &lambda)| GapRow {
            n: res.n,
            index,
            lambda,
            gap: 1.0 - lambda.norm(),
        })
        .collect()
}

/// The `n_top` largest eigenvalues and their gaps for each grid side.
pub fn gap_scan_with<M: MatrixSource>(
    source: &mut M,
    ps: &PhaseSet,
    sides: &[usize],
    n_top: usize,
    alpha: f64,
    opts: &EigenOptions,
) -> Result<Vec<GapRow>> {
    let mut rows = Vec::new();
    for &side in sides {
        let s = source.ulam_matrix(ps, side)?;
        rows.extend(spectrum_gaps(&google_spectrum(s.matrix(), alpha, opts)?, n_top));
    }
    Ok(rows)
}

pub fn write_gap_tsv<W: Write>(mut w: W, rows: &[GapRow]) -> io::Result<()> {
    writeln!(w, "# N\tindex\tre_lambda\tim_lambda\tgap")?;
    for r in rows {
        writeln!(w, "{}\t{}\t{}\t{}\t{:e}", r.n, r.index, r.lambda.re, r.lambda.im, r.gap)?;
    }
    Ok(())
}

/// `(lambda, xi)` for every computed eigenvector with `|lambda| > min_abs`;
/// pass [`DEGENERATE_ABS`] to drop the degenerate `lambda = 0` family.
pub fn eigenvector_pars(res: &SpectrumResult, min_abs: f64) -> Vec<(Complex64, f64)> {
    res.eigenvalues
        .iter()
        .zip(&res.pars)
        .filter_map(|(&l, p)| p.filter(|_| l.norm() > min_abs).map(|p| (l, p)))
        .collect()
}

/// [`eigenvector_pars`] with the default degeneracy threshold.
pub fn nondegenerate_pars(res: &SpectrumResult) -> Vec<(Complex64, f64)> {
    eigenvector_pars(res, DEGENERATE_ABS)
}
