//! Moore–Penrose pseudo-inverse and condition numbers by thresholded SVD.

use faer::Mat;

use super::DenseMatrix;
use crate::{Complex, Error, Result};

/// Default relative singular-value cut-off: `1e-10 · max(rows, cols)`.
pub fn default_rtol(rows: usize, cols: usize) -> f64 {
    1e-10 * rows.max(cols) as f64
}

/// A† together with what was kept of the spectrum.
#[derive(Debug, Clone)]
pub struct PseudoInverse {
    pub matrix: DenseMatrix,
    /// Number of singular values above `rtol · σ_max`.
    pub rank: usize,
    pub sigma_max: f64,
    /// Smallest retained singular value (0 when nothing is retained).
    pub sigma_min: f64,
}

impl PseudoInverse {
    /// Condition number of the rank-truncated operator.
    pub fn kappa(&self) -> f64 {
        if self.rank == 0 {
            f64::INFINITY
        } else {
            self.sigma_max / self.sigma_min
        }
    }
}

fn svd(a: &DenseMatrix) -> Result<faer::linalg::solvers::Svd<Complex>> {
    a.to_faer()
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD of {}x{} matrix did not converge: {e:?}", a.rows(), a.cols())))
}

fn retained(s: &[f64], rtol: f64) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().take_while(|&&v| v > rtol * smax).count()
}

/// `A†`, treating singular values below `rtol · σ_max` as zero.
///
/// `rtol = None` uses [`default_rtol`].
pub fn pseudo_inverse(a: &DenseMatrix, rtol: Option<f64>) -> Result<PseudoInverse> {
    let rtol = rtol.unwrap_or_else(|| default_rtol(a.rows(), a.cols()));
    if !(rtol >= 0.0) {
        return Err(Error::param("rtol", format!("must be non-negative, got {rtol}")));
    }
    if !a.is_finite() {
        return Err(Error::Numerical("pseudo-inverse of a non-finite matrix".into()));
    }
    let dec = svd(a)?;
    let s: Vec<f64> = dec.S().column_vector().iter().map(|z| z.re).collect();
    let rank = retained(&s, rtol);
    let (u, v) = (dec.U(), dec.V());

    // A† = V_r Σ_r⁻¹ U_rᴴ
    let vs = Mat::<Complex>::from_fn(a.cols(), rank, |i, k| v[(i, k)] * (1.0 / s[k]));
    let uh = Mat::<Complex>::from_fn(rank, a.rows(), |k, j| u[(j, k)].conj());
    let inv = &vs * &uh;
    log::debug!(
        "pseudo-inverse of {}x{}: rank {rank} of {}",
        a.rows(),
        a.cols(),
        s.len()
    );
    Ok(PseudoInverse {
        matrix: DenseMatrix::from_faer(inv.as_ref()),
        rank,
        sigma_max: s.first().copied().unwrap_or(0.0),
        sigma_min: if rank == 0 { 0.0 } else { s[rank - 1] },
    })
}

/// 2-norm condition number of the rank-truncated operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioning {
    pub kappa: f64,
    pub sigma_max: f64,
    /// Smallest singular value above the cut-off.
    pub sigma_min: f64,
    pub rank: usize,
}

/// Ratio of the largest to the smallest retained singular value.
pub fn condition_number(a: &DenseMatrix, rtol: Option<f64>) -> Result<Conditioning> {
    let rtol = rtol.unwrap_or_else(|| default_rtol(a.rows(), a.cols()));
    if a.max_abs() == 0.0 {
        return Err(Error::Numerical("condition number of the zero matrix".into()));
    }
    let s = a
        .to_faer()
        .singular_values()
        .map_err(|e| Error::Numerical(format!("singular values did not converge: {e:?}")))?;
    let rank = retained(&s, rtol);
    let sigma_min = s[rank - 1];
    Ok(Conditioning {
        kappa: s[0] / sigma_min,
        sigma_max: s[0],
        sigma_min,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, cols: usize, v: &[f64]) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |i, j| Complex::new(v[i * cols + j], 0.0))
    }

    #[test]
    fn identity_is_its_own_inverse() {
        let p = pseudo_inverse(&DenseMatrix::identity(4), None).unwrap();
        assert!(p.matrix.sub(&DenseMatrix::identity(4)).unwrap().frobenius_norm() < 1e-14);
        assert_eq!(p.rank, 4);
    }

    #[test]
    fn rank_deficient_diagonal() {
        let p = pseudo_inverse(&real(2, 2, &[2.0, 0.0, 0.0, 0.0]), None).unwrap();
        let want = real(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        assert!(p.matrix.sub(&want).unwrap().frobenius_norm() < 1e-15);
        assert_eq!(p.rank, 1);
    }

    #[test]
    fn tall_full_rank() {
        let a = real(5, 3, &[1.0, 2.0, 0.5, -1.0, 0.0, 3.0, 2.0, 1.0, 1.0, 0.0, -2.0, 4.0, 1.5, 1.0, 0.0]);
        let p = pseudo_inverse(&a, None).unwrap();
        let r = a.matmul(&p.matrix).unwrap().matmul(&a).unwrap().sub(&a).unwrap();
        assert!(r.frobenius_norm() / a.frobenius_norm() <= 1e-12);
    }

    #[test]
    fn conditioning() {
        assert_eq!(condition_number(&DenseMatrix::identity(3), None).unwrap().kappa, 1.0);
        let c = condition_number(&real(2, 2, &[10.0, 0.0, 0.0, 1.0]), None).unwrap();
        assert!((c.kappa - 10.0).abs() < 1e-12);
        assert_eq!(c.sigma_min, 1.0);
        let z = DenseMatrix::zeros(2, 2);
        assert!(condition_number(&z, None).is_err());
        // rank-truncated: the zero singular value is ignored
        let c = condition_number(&real(2, 2, &[4.0, 0.0, 0.0, 0.0]), None).unwrap();
        assert_eq!((c.kappa, c.rank), (1.0, 1));
    }

    #[test]
    fn zero_matrix_pinv_is_zero() {
        let p = pseudo_inverse(&DenseMatrix::zeros(2, 3), None).unwrap();
        assert_eq!(p.rank, 0);
        assert_eq!(p.matrix.shape(), (3, 2));
        assert_eq!(p.matrix.max_abs(), 0.0);
    }
}
