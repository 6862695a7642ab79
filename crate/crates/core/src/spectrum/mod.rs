//! Dense eigendecomposition of Google matrices and spectral analyses.

mod analysis;
mod blocks;
mod decompose;
mod dense;
mod eigvec;
mod schur;

pub use blocks::{strongly_connected_components, BlockOrder};
pub use decompose::{
    decay_rate, eigendecompose, google_spectrum, EigenOptions, SpectrumResult, VectorSelection, DEGENERATE_ABS,
};
pub use dense::{dense_memory_estimate, materialize_dense, DenseMatrix, DEFAULT_DENSE_CAP};
pub use analysis::{
    count_below, eigenvector_pars, gap_scan_with, nondegenerate_pars, spectral_density, spectrum_gaps,
    weyl_exponent_theory, weyl_fit, weyl_scan_with, write_gap_tsv, GapRow, SpectralDensity, WeylFit,
    DEFAULT_DENSITY_BINS,
};
