//! Reconstruction of functions on `[0,1]^d` from samples of their Fourier
//! transform taken on a non-uniform raster.
//!
//! Three estimators share one set of precomputed matrices:
//!
//! * convolutional gridding (`cg`): density-weighted convolution of the data
//!   with the window spectrum onto integer modes,
//! * frame approximation (`frame`): coefficients in the weighted exponential
//!   frame from the pseudo-inverse of the data/frame Gram matrix,
//! * frame-theoretic convolutional gridding (`ftcg`): gridding with a banded
//!   quadrature matrix obtained from the pseudo-inverse of a band of `Ψ Ω`.
//!
//! The crate is organised bottom-up: [`window`] and [`raster`] describe the
//! problem, [`sampling`] produces Fourier data, [`numerics`] holds the dense
//! linear algebra, [`recon`] builds plans and images, and [`harness`] wires
//! everything into reproducible experiments.

pub mod error;
pub mod harness;
pub mod numerics;
pub mod raster;
pub mod recon;
pub mod sampling;
pub mod window;

pub use error::{Error, Result};
pub use harness::{ExperimentConfig, MetricsReport};
pub use numerics::{BandSpec, DenseMatrix};
pub use raster::{Raster, RasterKind};
pub use recon::{ImageGrid, Method, ReconPlan};
pub use sampling::{SampleSet, Scene};
pub use window::WindowSpec;

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;
