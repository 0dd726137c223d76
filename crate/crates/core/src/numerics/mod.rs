//! Dense complex linear algebra used by the reconstruction plans.

mod band;
mod matrix;
mod pinv;
pub mod quadrature;
mod weights;

pub use band::{band_mask, BandSpec};
pub use matrix::DenseMatrix;
pub use pinv::{condition_number, default_rtol, pseudo_inverse, Conditioning, PseudoInverse};
pub use weights::density_weights;
