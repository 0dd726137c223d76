//! Window functions and their spectra.
//!
//! A window `w` is positive on `[0,1]`, essentially supported there, and has a
//! closed-form spectrum `ŵ` that decays fast enough to be truncated at an
//! integer radius `K`. In two dimensions the window is the tensor product of
//! the one-dimensional factor.
//!
//! The Gaussian spectrum is the whole-line Fourier integral. It differs from the
//! `[0,1]` Fourier coefficient by at most the window mass outside `[0,1]`,
//! reported by [`WindowSpec::tail_mass`]; for `σ = 1/8` that is about `2e-5`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Complex, Error, Result};

pub const DEFAULT_SIGMA: f64 = 0.125;
pub const DEFAULT_TRUNC_EPS: f64 = 1e-12;

/// One-dimensional window factor.
pub trait Window: Send + Sync {
    /// `w(x)` for `x` in `[0,1]`.
    fn value(&self, x: f64) -> f64;
    /// `ŵ(ξ) = ∫ w(x) e^{-2πiξx} dx`.
    fn spectrum(&self, xi: f64) -> Complex;
    /// Smallest integer `K ≥ 1` beyond which `|ŵ|` is negligible.
    fn radius(&self) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowFamily {
    #[default]
    Gaussian,
}

/// Window parameters as they appear in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowParams {
    pub sigma: f64,
    pub trunc_eps: f64,
}

impl Default for WindowParams {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_SIGMA,
            trunc_eps: DEFAULT_TRUNC_EPS,
        }
    }
}

/// A validated window: Gaussian of width `sigma` centred at `1/2` per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    family: WindowFamily,
    sigma: f64,
    trunc_eps: f64,
    radius: usize,
    dim: usize,
}

impl WindowSpec {
    pub fn new(sigma: f64, trunc_eps: f64, dim: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
        }
        if !(trunc_eps > 0.0 && trunc_eps < 1.0) {
            return Err(Error::param(
                "trunc_eps",
                format!("must lie in (0,1), got {trunc_eps}"),
            ));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::param("dim", format!("must be 1 or 2, got {dim}")));
        }
        Ok(Self {
            family: WindowFamily::Gaussian,
            sigma,
            trunc_eps,
            radius: truncation_radius(sigma, trunc_eps)?,
            dim,
        })
    }

    pub fn from_params(params: WindowParams, dim: usize) -> Result<Self> {
        Self::new(params.sigma, params.trunc_eps, dim)
    }

    pub fn params(&self) -> WindowParams {
        WindowParams {
            sigma: self.sigma,
            trunc_eps: self.trunc_eps,
        }
    }

    pub fn family(&self) -> WindowFamily {
        self.family
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn trunc_eps(&self) -> f64 {
        self.trunc_eps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same window in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(self.sigma, self.trunc_eps, dim)
    }

    /// `w(x)`, product over axes. `x` must lie in `[0,1]^d`.
    pub fn eval_window(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!(
                "window is {}-D, point has {} coordinates",
                self.dim,
                x.len()
            )));
        }
        if x.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::Domain(x.to_vec()));
        }
        Ok(x.iter().map(|&v| self.value(v)).product())
    }

    /// `ŵ(ξ)`, product over axes.
    pub fn eval_spectrum(&self, xi: &[f64]) -> Result<Complex> {
        if xi.len() != self.dim {
            return Err(Error::Dimension(format!(
                "window is {}-D, frequency has {} coordinates",
                self.dim,
                xi.len()
            )));
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("xi", "frequency must be finite"));
        }
        Ok(xi.iter().map(|&v| self.spectrum(v)).product())
    }

    /// Window mass outside `[0,1]` per axis: the largest possible gap between
    /// the closed-form spectrum and the true `[0,1]` Fourier coefficient.
    pub fn tail_mass(&self) -> f64 {
        let s = self.sigma;
        s * (2.0 * PI).sqrt() * statrs::function::erf::erfc(0.5 / (s * std::f64::consts::SQRT_2))
    }
}

impl Window for WindowSpec {
    fn value(&self, x: f64) -> f64 {
        let d = x - 0.5;
        (-d * d / (2.0 * self.sigma * self.sigma)).exp()
    }

    fn spectrum(&self, xi: f64) -> Complex {
        let s = self.sigma;
        let mag = (2.0 * PI).sqrt() * s * (-2.0 * PI * PI * s * s * xi * xi).exp();
        Complex::from_polar(mag, -PI * xi)
    }

    fn radius(&self) -> usize {
        self.radius
    }
}

/// Smallest `K ≥ 1` with `|ŵ(K)| ≤ trunc_eps · |ŵ(0)|` for the Gaussian window.
pub fn truncation_radius(sigma: f64, trunc_eps: f64) -> Result<usize> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    if !(trunc_eps > 0.0 && trunc_eps < 1.0) {
        return Err(Error::param(
            "trunc_eps",
            format!("must lie in (0,1), got {trunc_eps}"),
        ));
    }
    let rate = 2.0 * PI * PI * sigma * sigma;
    let ratio = |k: f64| (-rate * k * k).exp();
    let mut k = ((-trunc_eps.ln()) / rate).sqrt().ceil().max(1.0);
    // correct for rounding in the closed form
    while k > 1.0 && ratio(k - 1.0) <= trunc_eps {
        k -= 1.0;
    }
    while ratio(k) > trunc_eps {
        k += 1.0;
    }
    Ok(k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_1d() -> WindowSpec {
        WindowSpec::new(DEFAULT_SIGMA, DEFAULT_TRUNC_EPS, 1).unwrap()
    }

    #[test]
    fn peak_at_centre() {
        assert_eq!(default_1d().eval_window(&[0.5]).unwrap(), 1.0);
        let w2 = WindowSpec::new(0.125, 1e-12, 2).unwrap();
        assert_eq!(w2.eval_window(&[0.5, 0.5]).unwrap(), 1.0);
    }

    #[test]
    fn boundary_value() {
        let v = default_1d().eval_window(&[0.0]).unwrap();
        assert!((v - (-8.0f64).exp()).abs() < 1e-18);
        assert!((v - 3.3546e-4).abs() < 1e-8);
    }

    #[test]
    fn outside_domain_is_rejected() {
        assert!(matches!(default_1d().eval_window(&[1.5]), Err(Error::Domain(_))));
        assert!(matches!(default_1d().eval_window(&[-1e-9]), Err(Error::Domain(_))));
        assert!(default_1d().eval_window(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn spectrum_values() {
        let w = default_1d();
        let z = w.eval_spectrum(&[0.0]).unwrap();
        assert!((z.re - (2.0 * PI).sqrt() / 8.0).abs() < 1e-15);
        assert_eq!(z.im, 0.0);
        assert!((z.re - 0.31333).abs() < 1e-5);

        let one = w.eval_spectrum(&[1.0]).unwrap();
        let want = Complex::from_polar((2.0 * PI).sqrt() / 8.0 * (-PI * PI / 32.0).exp(), -PI);
        assert!((one - want).norm() < 1e-15);

        let k = w.radius() as f64;
        assert!(w.spectrum(k).norm() <= w.trunc_eps() * w.spectrum(0.0).norm());
        assert!(w.eval_spectrum(&[f64::NAN]).is_err());
    }

    #[test]
    fn radius_examples() {
        assert_eq!(truncation_radius(0.125, 1e-12).unwrap(), 10);
        assert_eq!(truncation_radius(0.125, 0.999_999).unwrap(), 1);
        let k1 = truncation_radius(0.125, 1e-12).unwrap() as f64;
        let k2 = truncation_radius(0.25, 1e-12).unwrap() as f64;
        assert!((k2 - k1 / 2.0).abs() <= 1.0);
        assert!(truncation_radius(0.0, 1e-12).is_err());
        assert!(truncation_radius(0.1, 1.0).is_err());
    }

    #[test]
    fn radius_is_smallest() {
        for &(s, e) in &[(0.125, 1e-12), (1.0 / 6.0, 1e-12), (0.1, 1e-6), (0.3, 1e-3)] {
            let w = WindowSpec::new(s, e, 1).unwrap();
            let k = w.radius() as f64;
            let peak = w.spectrum(0.0).norm();
            assert!(w.spectrum(k).norm() <= e * peak);
            if k > 1.0 {
                assert!(w.spectrum(k - 1.0).norm() > e * peak);
            }
        }
    }

    #[test]
    fn tail_mass_default() {
        let t = default_1d().tail_mass();
        assert!(t > 1e-5 && t < 3e-5, "{t}");
    }

    #[test]
    fn invalid_params() {
        assert!(WindowSpec::new(-1.0, 1e-12, 1).is_err());
        assert!(WindowSpec::new(0.1, 0.0, 1).is_err());
        assert!(WindowSpec::new(0.1, 1e-12, 3).is_err());
    }
}
