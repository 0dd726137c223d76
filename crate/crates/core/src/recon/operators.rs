//! The gridding matrix `Ω` and the frame matrix `Ψ`.
//!
//! Both are separable: every entry is a product of one-dimensional factors,
//! so each axis is tabulated once per raster point and the 2-D entries are
//! formed from the tables.

use std::f64::consts::PI;

use super::ModeBox;
use crate::numerics::quadrature::UnitRule;
use crate::numerics::DenseMatrix;
use crate::raster::Raster;
use crate::window::{Window, WindowSpec};
use crate::{Complex, Error, Result};

/// Relative change under node doubling above which `Ψ` is flagged.
pub const QUAD_WARN_TOL: f64 = 1e-8;

/// Per-axis factor table: `rows` raster points by the axis' mode range.
struct AxisTable {
    cols: usize,
    data: Vec<Complex>,
}

impl AxisTable {
    fn build(raster: &Raster, axis: usize, modes: &ModeBox, f: impl Fn(f64) -> Complex) -> Self {
        let range = modes.ranges()[axis];
        let mut data = Vec::with_capacity(raster.len() * range.len());
        for p in raster.points() {
            data.extend(range.iter().map(|m| f(p[axis] - m as f64)));
        }
        Self {
            cols: range.len(),
            data,
        }
    }

    fn get(&self, n: usize, offset: usize) -> Complex {
        self.data[n * self.cols + offset]
    }
}

fn check_dims(raster: &Raster, window: &WindowSpec, modes: &ModeBox) -> Result<()> {
    if raster.dim() != modes.dim() || window.dim() != raster.dim() {
        return Err(Error::Dimension(format!(
            "raster is {}-D, window {}-D, modes {}-D",
            raster.dim(),
            window.dim(),
            modes.dim()
        )));
    }
    Ok(())
}

fn assemble(tables: &[AxisTable], modes: &ModeBox, n: usize, k: usize) -> Complex {
    let off = modes.axis_offsets(k);
    tables.iter().zip(off).map(|(t, o)| t.get(n, o)).product()
}

/// `Ω[m, n] = ŵ(m − λ_n)`, exactly zero when `|m_a − λ_{n,a}| > K` on any axis.
pub fn build_omega(raster: &Raster, window: &WindowSpec, modes: &ModeBox) -> Result<DenseMatrix> {
    check_dims(raster, window, modes)?;
    let k = window.radius() as f64;
    let tables: Vec<AxisTable> = (0..raster.dim())
        .map(|a| {
            AxisTable::build(raster, a, modes, |d| {
                // d = λ − m; ŵ is evaluated at m − λ
                if d.abs() > k {
                    Complex::new(0.0, 0.0)
                } else {
                    window.spectrum(-d)
                }
            })
        })
        .collect();
    Ok(DenseMatrix::from_fn(modes.len(), raster.len(), |m, n| {
        assemble(&tables, modes, n, m)
    }))
}

/// Quadrature rule for `∫₀¹ e^{-2πitx} g(x) dx` with `g` folded into the weights.
pub(crate) struct WeightedRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedRule {
    pub(crate) fn new(order: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        let rule = UnitRule::new(order)?;
        Ok(Self {
            nodes: rule.nodes().to_vec(),
            weights: rule.iter().map(|(x, w)| w * g(x)).collect(),
        })
    }

    pub(crate) fn transform(&self, t: f64) -> Complex {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| Complex::from_polar(w, -2.0 * PI * t * x))
            .sum()
    }

    /// `transform(λ_n − m)` for every point on `axis` and every mode in the
    /// axis range, splitting the phase into a point part and a mode part.
    fn table(&self, raster: &Raster, axis: usize, modes: &ModeBox) -> AxisTable {
        let range = modes.ranges()[axis];
        let mode_phase: Vec<Vec<Complex>> = range
            .iter()
            .map(|m| self.nodes.iter().map(|&x| Complex::from_polar(1.0, 2.0 * PI * m as f64 * x)).collect())
            .collect();
        let mut data = Vec::with_capacity(raster.len() * range.len());
        let mut point_part = vec![Complex::new(0.0, 0.0); self.nodes.len()];
        for p in raster.points() {
            for ((slot, &x), &w) in point_part.iter_mut().zip(&self.nodes).zip(&self.weights) {
                *slot = Complex::from_polar(w, -2.0 * PI * p[axis] * x);
            }
            data.extend(mode_phase.iter().map(|e| e.iter().zip(&point_part).map(|(a, b)| a * b).sum::<Complex>()));
        }
        AxisTable {
            cols: range.len(),
            data,
        }
    }
}

/// Outcome of the node-doubling self-check on `Ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCheck {
    pub nodes: usize,
    /// Max entry change relative to max entry when the node count doubles.
    pub doubling_change: f64,
    pub warning: Option<String>,
}

/// Default node count for `Ψ`: `8·(M + max|λ|)`, at least 32.
pub fn default_quad_nodes(raster: &Raster, modes: &ModeBox) -> usize {
    ((8.0 * (modes.max_abs() as f64 + raster.max_abs())).ceil() as usize).max(32)
}

/// `Ψ[n, m] = ⟨φ_n, ψ_m⟩ = ∫ e^{-2πi⟨λ_n,x⟩} e^{2πi⟨m,x⟩} / w(x) dx`, the
/// inner product being antilinear in its first slot so that `Ψβ = f̂` for
/// `f = Σ β_m ψ_m`. Each axis factor is `v̂(λ_{n,a} − m_a)` with
/// `v̂(t) = ∫₀¹ e^{-2πitx} / w(x) dx` by Gauss–Legendre quadrature.
pub fn build_psi(
    raster: &Raster,
    window: &WindowSpec,
    modes: &ModeBox,
    quad_nodes: Option<usize>,
) -> Result<(DenseMatrix, QuadratureCheck)> {
    check_dims(raster, window, modes)?;
    let nodes = quad_nodes.unwrap_or_else(|| default_quad_nodes(raster, modes));
    let recip = |x: f64| 1.0 / window.value(x);
    let rule = WeightedRule::new(nodes, recip)?;
    let fine = WeightedRule::new(2 * nodes, recip)?;
    let tables: Vec<AxisTable> = (0..raster.dim())
        .map(|a| rule.table(raster, a, modes))
        .collect();

    let mut change: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (a, t) in tables.iter().enumerate() {
        let refined = fine.table(raster, a, modes);
        for (x, y) in t.data.iter().zip(&refined.data) {
            change = change.max((x - y).norm());
            scale = scale.max(y.norm());
        }
    }
    let rel = if scale > 0.0 { change / scale } else { 0.0 };
    let warning = (rel > QUAD_WARN_TOL).then(|| {
        let msg = format!("Ψ quadrature with {nodes} nodes changes by {rel:.2e} under doubling");
        log::warn!("{msg}");
        msg
    });
    let psi = DenseMatrix::from_fn(raster.len(), modes.len(), |n, m| assemble(&tables, modes, n, m));
    if !psi.is_finite() {
        return Err(Error::Numerical("non-finite entry in Ψ".into()));
    }
    Ok((
        psi,
        QuadratureCheck {
            nodes,
            doubling_change: rel,
            warning,
        },
    ))
}

/// `|⟨ζ_n, ζ_ℓ⟩|` as a function of `Δ = n − ℓ`, where `ζ_n = e^{2πi⟨n,x⟩}/w(x)`:
/// the product over axes of `|∫₀¹ e^{2πiΔ_a x} / w(x)² dx|`.
pub fn zeta_inner_product(window: &WindowSpec, delta: &[i64], quad_nodes: usize) -> Result<f64> {
    let rule = WeightedRule::new(quad_nodes, |x| window.value(x).powi(-2))?;
    Ok(delta.iter().map(|&d| rule.transform(-(d as f64)).norm()).product())
}

/// Least-squares fit of `log|⟨ζ_n,ζ_ℓ⟩|` against `log(1 + ‖n − ℓ‖)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Number of ordered pairs `(n, ℓ)`, `n ≠ ℓ`, entering the fit.
    pub pairs: usize,
}

/// Regression over all ordered pairs `n ≠ ℓ` of the 2-D index set `|n_a| ≤ N`.
/// The inner product depends only on `n − ℓ`, so each difference enters
/// with its multiplicity.
pub fn admissibility_decay(window: &WindowSpec, n: usize, quad_nodes: usize) -> Result<DecayFit> {
    let rule = WeightedRule::new(quad_nodes, |x| window.value(x).powi(-2))?;
    let side = 2 * n as i64 + 1;
    let max_d = 2 * n as i64;
    let axis: Vec<f64> = (-max_d..=max_d).map(|d| rule.transform(-(d as f64)).norm()).collect();
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut pairs = 0usize;
    for d1 in -max_d..=max_d {
        for d2 in -max_d..=max_d {
            if d1 == 0 && d2 == 0 {
                continue;
            }
            let mult = ((side - d1.abs()) * (side - d2.abs())) as f64;
            let v = axis[(d1 + max_d) as usize] * axis[(d2 + max_d) as usize];
            let x = (1.0 + ((d1 * d1 + d2 * d2) as f64).sqrt()).ln();
            let y = v.max(f64::MIN_POSITIVE).ln();
            sw += mult;
            sx += mult * x;
            sy += mult * y;
            sxx += mult * x * x;
            sxy += mult * x * y;
            pairs += mult as usize;
        }
    }
    let slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    Ok(DecayFit {
        slope,
        intercept: (sy - slope * sx) / sw,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::jittered_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w1() -> WindowSpec {
        WindowSpec::new(0.125, 1e-12, 1).unwrap()
    }

    // adaptive Simpson, independent of the Gauss–Legendre path
    fn simpson(f: &dyn Fn(f64) -> Complex, a: f64, b: f64, tol: f64, depth: u32) -> Complex {
        let m = 0.5 * (a + b);
        let whole = (b - a) / 6.0 * (f(a) + f(m) * 4.0 + f(b));
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let left = (m - a) / 6.0 * (f(a) + f(lm) * 4.0 + f(m));
        let right = (b - m) / 6.0 * (f(m) + f(rm) * 4.0 + f(b));
        if depth == 0 || (left + right - whole).norm() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            simpson(f, a, m, tol / 2.0, depth - 1) + simpson(f, m, b, tol / 2.0, depth - 1)
        }
    }

    #[test]
    fn omega_uniform_diagonal_and_truncation() {
        let w = w1();
        let r = jittered_grid(&[12], 0.0, 0).unwrap();
        let modes = ModeBox::symmetric(&[12]).unwrap();
        let om = build_omega(&r, &w, &modes).unwrap();
        assert_eq!(om.shape(), (25, 25));
        for i in 0..25 {
            assert!((om[(i, i)] - w.spectrum(0.0)).norm() < 1e-15);
        }
        let k = w.radius();
        assert_eq!(om[(0, k)], w.spectrum(-(k as f64)));
        assert_eq!(om[(0, k + 1)], Complex::new(0.0, 0.0));
    }

    #[test]
    fn omega_partition_of_unity() {
        let w = w1();
        let r = jittered_grid(&[10], 0.25, 4).unwrap();
        let modes = ModeBox::symmetric(&[25]).unwrap();
        let om = build_omega(&r, &w, &modes).unwrap();
        let sums: Vec<f64> = (0..r.len())
            .map(|n| (0..modes.len()).map(|m| om[(m, n)].norm()).sum())
            .collect();
        for s in &sums {
            assert!((s - sums[0]).abs() < 1e-6, "{s} vs {}", sums[0]);
        }
    }

    #[test]
    fn psi_matches_adaptive_oracle() {
        let w = w1();
        let r = jittered_grid(&[6], 0.25, 2).unwrap();
        let modes = ModeBox::symmetric(&[6]).unwrap();
        let (psi, check) = build_psi(&r, &w, &modes, None).unwrap();
        assert!(check.warning.is_none(), "{check:?}");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(0..r.len());
            let k = rng.gen_range(0..modes.len());
            let lam = r.point(n)[0];
            let m = modes.mode(k)[0] as f64;
            let f = |x: f64| Complex::from_polar(1.0 / w.value(x), -2.0 * PI * (lam - m) * x);
            let oracle = simpson(&f, 0.0, 1.0, 1e-12, 40);
            assert!((psi[(n, k)] - oracle).norm() < 1e-8, "{} vs {oracle}", psi[(n, k)]);
        }
    }

    #[test]
    fn vhat_conjugate_symmetry_and_unit_weight() {
        let w = w1();
        let rule = WeightedRule::new(256, |x| 1.0 / w.value(x)).unwrap();
        for t in [0.3, 1.7, 5.0] {
            assert!((rule.transform(-t) - rule.transform(t).conj()).norm() < 1e-12);
        }
        let flat = WeightedRule::new(64, |_| 1.0).unwrap();
        assert!((flat.transform(0.0) - Complex::new(1.0, 0.0)).norm() < 1e-14);
        assert!(flat.transform(3.0).norm() < 1e-13);
    }

    #[test]
    fn psi_2d_is_product() {
        let w = WindowSpec::new(0.125, 1e-12, 2).unwrap();
        let r = jittered_grid(&[2, 2], 0.25, 1).unwrap();
        let modes = ModeBox::symmetric(&[2, 2]).unwrap();
        let (psi, _) = build_psi(&r, &w, &modes, Some(128)).unwrap();
        let rule = WeightedRule::new(128, |x| 1.0 / w.value(x)).unwrap();
        let (n, k) = (7, 13);
        let p = r.point(n);
        let m = modes.mode(k);
        let want = rule.transform(p[0] - m[0] as f64) * rule.transform(p[1] - m[1] as f64);
        assert!((psi[(n, k)] - want).norm() < 1e-12 * want.norm().max(1.0), "{} vs {}", psi[(n, k)], want);
    }

    #[test]
    fn dimension_checks() {
        let r = jittered_grid(&[2], 0.0, 0).unwrap();
        let modes = ModeBox::symmetric(&[2, 2]).unwrap();
        assert!(build_omega(&r, &w1(), &modes).is_err());
    }
}
