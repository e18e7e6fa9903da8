//! Reconstruction experiments: triangulated images gated by polyhedral
//! indicators, and benchmark functions compiled into Taylor networks.

mod bench;
mod image;
mod pwa;

pub use bench::{recon_point, recon_testfn, sweep_csv, Benchmark, SweepRow, SWEEP_HEADER};
pub use image::{bundled_texture, synthetic_texture, Image};
pub use pwa::{
    drop_constraints, fit_image_pwa, mean_drop_mse, reconstruct, DropResult, Halfspace, ImageFit, Reconstruction, Triangle,
    TriangularPwa,
};

use thiserror::Error;

use crate::net::NetError;
use crate::taylor::TaylorError;

/// Seed of the bundled texture.
pub const TEXTURE_SEED: u64 = 32;

#[derive(Debug, Error)]
pub enum ReconError {
    #[error("unsupported image: {0}")]
    UnsupportedFormat(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Taylor(#[from] TaylorError),
}
