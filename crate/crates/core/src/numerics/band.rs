use super::DenseMatrix;
use crate::{Complex, Error, Result};

/// Half-band `r`: entries with `|i - j| ≤ r - 1` are kept, so the band has
/// width `2r - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BandSpec {
    r: usize,
}

impl BandSpec {
    pub fn new(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::param("band", "half-band r must be at least 1"));
        }
        Ok(Self { r })
    }

    /// Band from its total width `2r - 1` (odd).
    pub fn from_width(width: usize) -> Result<Self> {
        if width % 2 == 0 {
            return Err(Error::param("band", format!("width {width} must be odd")));
        }
        Self::new(width.div_ceil(2))
    }

    /// `r ≈ ln(2N + 1)`, rounded up and at least 1.
    pub fn log_heuristic(n: usize) -> Self {
        let r = ((2 * n + 1) as f64).ln().ceil().max(1.0) as usize;
        Self { r }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn width(&self) -> usize {
        2 * self.r - 1
    }

    /// Entries kept in an `n × n` matrix.
    pub fn kept_entries(&self, n: usize) -> usize {
        let r = self.r.min(n);
        (2 * r - 1) * n - r * (r - 1)
    }

    pub fn kept_fraction(&self, n: usize) -> f64 {
        self.kept_entries(n) as f64 / (n * n) as f64
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i.abs_diff(j) < self.r
    }
}

/// Hadamard product of `a` with the binary band matrix.
pub fn band_mask(a: &DenseMatrix, band: BandSpec) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "band mask needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let zero = Complex::new(0.0, 0.0);
    Ok(DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        if band.contains(i, j) {
            a[(i, j)]
        } else {
            zero
        }
    }))
}
