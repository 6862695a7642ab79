use std::io::{self, Write};

use crate::error::{invalid, Result};
use crate::ulam_net::UlamMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionResult {
    pub q: f64,
    pub n_gamma: usize,
    /// `n_gamma / N`.
    pub gamma: f64,
    /// `eta^T` of the generating map, when known.
    pub gamma_c_reference: Option<f64>,
}

/// Applies `S` once to the uniform vector and, for each threshold `q`,
/// counts the nodes whose weight stays above `q / N`.
pub fn contraction_factor(s: &UlamMatrix, q_values: &[f64]) -> Result<Vec<ContractionResult>> {
    if let Some(&q) = q_values.iter().find(|&&q| !(q > 0.0 && q < 1.0)) {
        return Err(invalid("q", format!("{q} is outside (0, 1)")));
    }
    let m = s.matrix();
    let n = m.n();
    let p_bar = m.mul_vec(&vec![1.0 / n as f64; n]);
    // Sorting once makes each threshold a binary search.
    let mut sorted = p_bar;
    sorted.sort_unstable_by(f64::total_cmp);
    let reference = s.phase_set().map(|ps| ps.contraction());
    Ok(q_values
        .iter()
        .map(|&q| {
            let cut = q / n as f64;
            let n_gamma = n - sorted.partition_point(|&v| v <= cut);
            ContractionResult {
                q,
                n_gamma,
                gamma: n_gamma as f64 / n as f64,
                gamma_c_reference: reference,
            }
        })
        .collect())
}

/// TSV: `q N_Gamma Gamma Gamma_c` (`nan` when the map is unknown).
pub fn write_contraction_tsv<W: Write>(mut w: W, results: &[ContractionResult]) -> io::Result<()> {
    writeln!(w, "# q\tN_Gamma\tGamma\tGamma_c")?;
    for r in results {
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            r.q,
            r.n_gamma,
            r.gamma,
            r.gamma_c_reference.unwrap_or(f64::NAN)
        )?;
    }
    Ok(())
}
