//! Google matrices of Ulam networks generated by the dissipative Chirikov
//! typical map.
//!
//! The crate is organised bottom-up:
//!
//! - [`typical_map`]: the map itself, its built-in parameter sets and
//!   dynamical diagnostics (Lyapunov exponent, bifurcation scans).
//! - [`ulam_net`]: the cell grid, the Ulam matrix `S` and its link
//!   statistics.
//! - [`rank`]: the Google operator `G = alpha S + (1 - alpha) E / N`,
//!   PageRank, participation ratios, delocalization scans and the global
//!   contraction factor.
//! - [`spectrum`]: dense nonsymmetric eigendecomposition and the spectral
//!   analyses built on it (decay rates, fractal Weyl law, gaps).

pub mod error;
pub mod fit;
pub mod rank;
pub mod rng;
pub mod sparse;
pub mod spectrum;
mod trig;
pub mod typical_map;
pub mod ulam_net;

pub use error::{Error, Result};
pub use sparse::CscMatrix;
pub use typical_map::{MapState, PhaseSet};
pub use ulam_net::{CellGrid, UlamMatrix};
