//! The Google operator, PageRank and localization diagnostics.

mod contraction;
mod decay;
mod google;
mod pagerank;
mod par;
mod scan;

pub use contraction::{contraction_factor, write_contraction_tsv, ContractionResult};
pub use decay::{fit_pagerank_decay, select_decay_fit, DecayFit, DecayKind, D_SIGMA, MIN_DECAY_POINTS};
pub use google::GoogleOperator;
pub use pagerank::{pagerank, PageRankOptions, RankVector};
pub use par::{participation_ratio, participation_ratio_complex};
pub use scan::{
    delocalization_scan, delocalization_scan_with, k_scan_xi, k_scan_xi_with, FreshBuild, MatrixCache,
    MatrixSource, ScanReport, ScanRow, Verdict, GROWTH_THRESHOLD, MIN_SPAN,
};
