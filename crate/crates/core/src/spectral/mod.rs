//! Frequency lattice and the operations that act on spectral fields.

mod convolve;
mod dyadic;
mod field;
mod grid;
pub mod io;
mod norm;
mod paraproduct;

pub use convolve::{convolve_direct, convolve_fields, ProductPlan};
pub use dyadic::{chi, dyadic_project, phi, Dyadic, Selector};
pub use field::SpectralField;
pub use grid::{bracket, l1_len, Grid};
pub use norm::{gevrey_norm, weighted_norm};
pub use paraproduct::{paraproduct_split, paraproduct_split_direct, ParaproductSplit};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("non-finite coefficient at (k={k}, j={j})")]
    NonFinite { k: i64, j: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
