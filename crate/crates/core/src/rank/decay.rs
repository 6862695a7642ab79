use std::f64::consts::{LN_10, TAU};

use super::pagerank::RankVector;
use crate::error::{invalid, Result};
use crate::fit::fit_line;

/// Diffusion constant of the cell noise, `sigma^2 N ~ (2 pi)^2`, held fixed
/// when converting an exponential slope into `b`.
pub const D_SIGMA: f64 = TAU * TAU;

/// Minimal number of ranks inside a decay fit range.
pub const MIN_DECAY_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecayKind {
    /// `p_j ~ j^-beta`
    Algebraic,
    /// `p_j ~ exp(-b gamma_c j / D_sigma)`
    Exponential,
}

impl DecayKind {
    pub fn label(self) -> &'static str {
        match self {
            DecayKind::Algebraic => "algebraic",
            DecayKind::Exponential => "exponential",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub kind: DecayKind,
    /// `beta` for algebraic fits, `b` for exponential ones.
    pub exponent: f64,
    /// Fitted slope of `log10 p` against `log10 j` or `j`.
    pub slope: f64,
    pub intercept: f64,
    /// Inclusive 1-based rank range.
    pub fit_range: (usize, usize),
    /// RMS residual in decades of `p`.
    pub residual: f64,
    pub n_points: usize,
}

/// Least-squares decay fit of the ranked PageRank over ranks
/// `fit_range.0..=fit_range.1` (1-based, top node is rank 1). Zero entries
/// are skipped. `gamma_c` is only used by the exponential kind and must be
/// positive there.
pub fn fit_pagerank_decay(
    r: &RankVector,
    kind: DecayKind,
    fit_range: (usize, usize),
    gamma_c: f64,
) -> Result<DecayFit> {
    let (lo, hi) = fit_range;
    if lo == 0 || hi < lo {
        return Err(invalid("fit_range", format!("({lo}, {hi}) is not a 1-based rank range")));
    }
    if kind == DecayKind::Exponential && !(gamma_c > 0.0) {
        return Err(invalid("gamma_c", "exponential decay needs a dissipative map"));
    }
    let hi = hi.min(r.n());
    let points: Vec<(f64, f64)> = (lo..=hi)
        .filter_map(|j| {
            let p = r.p[r.order[j - 1]];
            (p > 0.0).then(|| {
                let x = match kind {
                    DecayKind::Algebraic => (j as f64).log10(),
                    DecayKind::Exponential => j as f64,
                };
                (x, p.log10())
            })
        })
        .collect();
    let line = fit_line(&points, MIN_DECAY_POINTS)?;
    let exponent = match kind {
        DecayKind::Algebraic => -line.slope,
        DecayKind::Exponential => -line.slope * LN_10 * D_SIGMA / gamma_c,
    };
    Ok(DecayFit {
        kind,
        exponent,
        slope: line.slope,
        intercept: line.intercept,
        fit_range: (lo, hi),
        residual: line.rms_residual,
        n_points: line.n_points,
    })
}

/// Fits both kinds over the same range and keeps the one with the smaller
/// residual.
pub fn select_decay_fit(r: &RankVector, fit_range: (usize, usize), gamma_c: f64) -> Result<DecayFit> {
    let alg = fit_pagerank_decay(r, DecayKind::Algebraic, fit_range, gamma_c)?;
    if !(gamma_c > 0.0) {
        return Ok(alg);
    }
    let exp = fit_pagerank_decay(r, DecayKind::Exponential, fit_range, gamma_c)?;
    Ok(if exp.residual < alg.residual { exp } else { alg })
}
