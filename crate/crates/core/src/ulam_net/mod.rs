//! Ulam networks: phase-space cells, the sampled transfer matrix and its
//! link statistics.

mod grid;
mod io;
mod links;
mod matrix;

pub use grid::CellGrid;
pub use io::{export_matrix, import_matrix, read_matrix, write_matrix};
pub use links::{
    default_fit_range, fit_power_law, link_stats, write_fit_report, DegreeHistogram, Direction,
    LinkStats, PowerLawFit, MIN_FIT_BINS,
};
pub use matrix::{build_ulam_matrix, normalize_adjacency, Placement, UlamMatrix};
