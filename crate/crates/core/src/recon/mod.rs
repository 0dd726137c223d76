//! The three estimators and the plans they run on.
//!
//! With `Ω[m,n] = ŵ(m − λ_n)`, `Ψ[n,m] = ⟨φ_n, ψ_m⟩` and data `f̂`:
//!
//! * CG: `γ = Ω D f̂` with density weights `D`,
//! * frame: `β = Ψ† f̂`,
//! * FTCG: `τ = Ω C f̂` with `C = (ΨΩ ⊙ B_r)†`.
//!
//! Every coefficient vector lives on the same mode box and is synthesized as
//! `Σ_m c_m e^{2πi⟨m,x⟩} / w(x)`.

pub(crate) mod image;
mod modes;
mod operators;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use image::{default_grid_size, scene_image, synthesize_modes, windowed_reference, write_pgm, ImageGrid};
pub use modes::ModeBox;
pub use operators::{
    admissibility_decay, build_omega, build_psi, default_quad_nodes, zeta_inner_product, DecayFit,
    QuadratureCheck, QUAD_WARN_TOL,
};

use crate::numerics::{band_mask, condition_number, density_weights, pseudo_inverse, BandSpec, DenseMatrix};
use crate::raster::{AffineRescale, Raster};
use crate::sampling::SampleSet;
use crate::window::WindowSpec;
use crate::{Complex, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cg,
    Frame,
    Ftcg,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cg, Method::Frame, Method::Ftcg];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Cg => "cg",
            Method::Frame => "frame",
            Method::Ftcg => "ftcg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cg" => Ok(Method::Cg),
            "frame" => Ok(Method::Frame),
            "ftcg" => Ok(Method::Ftcg),
            other => Err(Error::param("method", format!("expected cg|frame|ftcg, got `{other}`"))),
        }
    }
}

/// Build diagnostics carried by a plan.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanMetadata {
    pub rescale: Option<AffineRescale>,
    /// Seconds per build phase, in build order.
    pub timings: Vec<(String, f64)>,
    /// Retained rank of each pseudo-inverse.
    pub ranks: Vec<(String, usize)>,
    pub kappa_psi: Option<f64>,
    /// Condition number of `ΨΩ ⊙ B_r` after rank truncation.
    pub kappa_masked_t: Option<f64>,
    pub kappa_c: Option<f64>,
    pub kept_fraction: Option<f64>,
    pub quadrature: Option<QuadratureCheck>,
}

/// Precomputed matrices for one raster, window and mode box.
///
/// `Ω` is always present; `Ψ` is built when the frame or FTCG estimator is
/// requested.
#[derive(Debug, Clone)]
pub struct ReconPlan {
    raster_ref: String,
    raster_len: usize,
    window: WindowSpec,
    modes: ModeBox,
    omega: DenseMatrix,
    density: Option<Vec<f64>>,
    psi: Option<DenseMatrix>,
    frame_b: Option<DenseMatrix>,
    t: Option<DenseMatrix>,
    c: Option<DenseMatrix>,
    band: Option<BandSpec>,
    pub meta: PlanMetadata,
}

/// Knobs shared by the plan builders; `None` picks the documented default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlanOptions {
    pub quad_nodes: Option<usize>,
    pub rtol: Option<f64>,
}

fn timed<T>(meta: &mut PlanMetadata, phase: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f()?;
    meta.timings.push((phase.to_string(), start.elapsed().as_secs_f64()));
    Ok(out)
}

fn nonzero_rank(rank: usize, what: &str) -> Result<()> {
    if rank == 0 {
        return Err(Error::Numerical(format!("{what} has numerical rank 0")));
    }
    Ok(())
}

impl ReconPlan {
    /// Builds everything the requested methods need, sharing `Ψ` and `Ω`.
    pub fn build(
        raster: &Raster,
        window: &WindowSpec,
        modes: &ModeBox,
        methods: &[Method],
        band: Option<BandSpec>,
        opts: PlanOptions,
    ) -> Result<Self> {
        if methods.is_empty() {
            return Err(Error::param("methods", "no method requested"));
        }
        let mut meta = PlanMetadata {
            rescale: raster.rescale().cloned(),
            ..Default::default()
        };
        let omega = timed(&mut meta, "omega", || build_omega(raster, window, modes))?;
        let mut plan = Self {
            raster_ref: raster.fingerprint(),
            raster_len: raster.len(),
            window: window.clone(),
            modes: modes.clone(),
            omega,
            density: None,
            psi: None,
            frame_b: None,
            t: None,
            c: None,
            band: None,
            meta,
        };
        if methods.contains(&Method::Cg) {
            plan.density = Some(timed(&mut plan.meta, "density", || Ok(density_weights(raster)))?);
        }
        if methods.contains(&Method::Frame) || methods.contains(&Method::Ftcg) {
            let (psi, check) = timed(&mut plan.meta, "psi", || build_psi(raster, window, modes, opts.quad_nodes))?;
            plan.meta.quadrature = Some(check);
            plan.psi = Some(psi);
        }
        if methods.contains(&Method::Frame) {
            plan.add_frame(opts.rtol)?;
        }
        if methods.contains(&Method::Ftcg) {
            let band = band.unwrap_or_else(|| BandSpec::log_heuristic(modes.ranges()[0].len() / 2));
            plan.add_ftcg(band, opts.rtol)?;
        }
        Ok(plan)
    }

    fn add_frame(&mut self, rtol: Option<f64>) -> Result<()> {
        let psi = self.psi.as_ref().expect("Ψ built before B");
        let pinv = timed(&mut self.meta, "frame_pinv", || pseudo_inverse(psi, rtol))?;
        nonzero_rank(pinv.rank, "Ψ")?;
        self.meta.ranks.push(("psi".into(), pinv.rank));
        self.meta.kappa_psi = Some(pinv.kappa());
        self.frame_b = Some(pinv.matrix);
        Ok(())
    }

    fn add_ftcg(&mut self, band: BandSpec, rtol: Option<f64>) -> Result<()> {
        let order = self.raster_len;
        if band.r() > order {
            return Err(Error::param(
                "band",
                format!("r = {} exceeds the order {order} of ΨΩ", band.r()),
            ));
        }
        let psi = self.psi.as_ref().expect("Ψ built before T");
        let t = timed(&mut self.meta, "t", || psi.matmul(&self.omega))?;
        let masked = band_mask(&t, band)?;
        let pinv = timed(&mut self.meta, "ftcg_pinv", || pseudo_inverse(&masked, rtol))?;
        nonzero_rank(pinv.rank, "ΨΩ ⊙ B_r")?;
        self.meta.ranks.push(("masked_t".into(), pinv.rank));
        self.meta.kappa_masked_t = Some(pinv.kappa());
        self.meta.kappa_c = Some(condition_number(&pinv.matrix, rtol)?.kappa);
        self.meta.kept_fraction = Some(band.kept_fraction(order));
        if self.meta.kappa_psi.is_none() {
            self.meta.kappa_psi = Some(condition_number(psi, rtol)?.kappa);
        }
        self.t = Some(t);
        self.c = Some(pinv.matrix);
        self.band = Some(band);
        Ok(())
    }

    pub fn raster_ref(&self) -> &str {
        &self.raster_ref
    }

    pub fn window(&self) -> &WindowSpec {
        &self.window
    }

    pub fn modes(&self) -> &ModeBox {
        &self.modes
    }

    pub fn omega(&self) -> &DenseMatrix {
        &self.omega
    }

    pub fn density(&self) -> Option<&[f64]> {
        self.density.as_deref()
    }

    pub fn psi(&self) -> Option<&DenseMatrix> {
        self.psi.as_ref()
    }

    /// `B = Ψ†`.
    pub fn frame_matrix(&self) -> Option<&DenseMatrix> {
        self.frame_b.as_ref()
    }

    /// `T = ΨΩ`.
    pub fn t(&self) -> Option<&DenseMatrix> {
        self.t.as_ref()
    }

    pub fn c(&self) -> Option<&DenseMatrix> {
        self.c.as_ref()
    }

    pub fn band(&self) -> Option<BandSpec> {
        self.band
    }

    pub fn supports(&self, method: Method) -> bool {
        match method {
            Method::Cg => self.density.is_some(),
            Method::Frame => self.frame_b.is_some(),
            Method::Ftcg => self.c.is_some(),
        }
    }
}

pub fn build_cg_plan(raster: &Raster, window: &WindowSpec, modes: &ModeBox) -> Result<ReconPlan> {
    ReconPlan::build(raster, window, modes, &[Method::Cg], None, PlanOptions::default())
}

pub fn build_frame_plan(
    raster: &Raster,
    window: &WindowSpec,
    modes: &ModeBox,
    quad_nodes: Option<usize>,
    rtol: Option<f64>,
) -> Result<ReconPlan> {
    ReconPlan::build(raster, window, modes, &[Method::Frame], None, PlanOptions { quad_nodes, rtol })
}

pub fn build_ftcg_plan(
    raster: &Raster,
    window: &WindowSpec,
    modes: &ModeBox,
    band: BandSpec,
    quad_nodes: Option<usize>,
    rtol: Option<f64>,
) -> Result<ReconPlan> {
    ReconPlan::build(raster, window, modes, &[Method::Ftcg], Some(band), PlanOptions { quad_nodes, rtol })
}

/// `γ`, `β` or `τ` on the plan's mode box.
pub fn coefficients(plan: &ReconPlan, method: Method, samples: &SampleSet) -> Result<Vec<Complex>> {
    if samples.raster_ref != plan.raster_ref {
        return Err(Error::RasterMismatch {
            samples: samples.raster_ref.clone(),
            plan: plan.raster_ref.clone(),
        });
    }
    let missing = || Error::param("method", format!("plan was not built for `{method}`"));
    let f = &samples.values;
    match method {
        Method::Cg => {
            let d = plan.density.as_ref().ok_or_else(missing)?;
            let weighted: Vec<Complex> = f.iter().zip(d).map(|(v, w)| v * w).collect();
            plan.omega.mul_vec(&weighted)
        }
        Method::Frame => plan.frame_b.as_ref().ok_or_else(missing)?.mul_vec(f),
        Method::Ftcg => {
            let c = plan.c.as_ref().ok_or_else(missing)?;
            plan.omega.mul_vec(&c.mul_vec(f)?)
        }
    }
}

/// Synthesizes coefficients on the plan's mode box onto a `G`-point grid per axis.
pub fn synthesize(coeffs: &[Complex], plan: &ReconPlan, grid: usize) -> Result<ImageGrid> {
    let mut img = synthesize_modes(coeffs, &plan.modes, &plan.window, grid)?;
    img.plan_ref = plan.raster_ref.clone();
    Ok(img)
}

pub fn reconstruct(method: Method, samples: &SampleSet, plan: &ReconPlan, grid: usize) -> Result<ImageGrid> {
    let coeffs = coefficients(plan, method, samples)?;
    let mut img = synthesize(&coeffs, plan, grid)?;
    img.label = method.to_string();
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::jittered_grid;
    use crate::sampling::{analytic_coeffs, Provenance, Scene};

    fn setup(n: usize, seed: u64) -> (Raster, WindowSpec, ModeBox) {
        (
            jittered_grid(&[n], 0.25, seed).unwrap(),
            WindowSpec::new(0.125, 1e-12, 1).unwrap(),
            ModeBox::symmetric(&[n]).unwrap(),
        )
    }

    fn rel_l2(a: &ImageGrid, b: &ImageGrid) -> f64 {
        let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.values().iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn cg_plan_shapes_and_determinism() {
        let (r, w, m) = setup(16, 1);
        let p = build_cg_plan(&r, &w, &m).unwrap();
        assert_eq!(p.omega().shape(), (33, 33));
        assert_eq!(p.density().unwrap().len(), 33);
        let q = build_cg_plan(&r, &w, &m).unwrap();
        assert_eq!(p.omega(), q.omega());
        assert_eq!(p.density(), q.density());
    }

    #[test]
    fn frame_plan_reproduces_psi() {
        let (r, w, m) = setup(16, 2);
        let p = build_frame_plan(&r, &w, &m, None, None).unwrap();
        let psi = p.psi().unwrap();
        let b = p.frame_matrix().unwrap();
        let res = psi.matmul(b).unwrap().matmul(psi).unwrap().sub(psi).unwrap();
        assert!(res.frobenius_norm() / psi.frobenius_norm() <= 1e-8);
        assert!(p.meta.kappa_psi.unwrap() > 0.0);
    }

    #[test]
    fn full_band_matches_frame() {
        let (r, w, m) = setup(16, 3);
        let s = analytic_coeffs(&Scene::PaperTestFn, &r).unwrap();
        let full = BandSpec::new(r.len()).unwrap();
        let p = ReconPlan::build(&r, &w, &m, &Method::ALL, Some(full), PlanOptions::default()).unwrap();
        let g = default_grid_size(&m);
        let fr = reconstruct(Method::Frame, &s, &p, g).unwrap();
        let ft = reconstruct(Method::Ftcg, &s, &p, g).unwrap();
        assert!(rel_l2(&ft, &fr) <= 1e-6, "{}", rel_l2(&ft, &fr));
    }

    #[test]
    fn band_out_of_range() {
        let (r, w, m) = setup(4, 0);
        let too_wide = BandSpec::new(r.len() + 1).unwrap();
        assert!(matches!(
            build_ftcg_plan(&r, &w, &m, too_wide, None, None),
            Err(Error::Parameter { name: "band", .. })
        ));
    }

    #[test]
    fn zero_data_and_mismatch() {
        let (r, w, m) = setup(6, 0);
        let p = ReconPlan::build(&r, &w, &m, &Method::ALL, None, PlanOptions::default()).unwrap();
        let zero = SampleSet::new(&r, vec![Complex::new(0.0, 0.0); r.len()], Provenance::Analytic).unwrap();
        for method in Method::ALL {
            assert!(coefficients(&p, method, &zero).unwrap().iter().all(|c| c.norm() == 0.0));
            let img = reconstruct(method, &zero, &p, 64).unwrap();
            assert!(img.values().iter().all(|v| v.norm() == 0.0));
        }
        let other = jittered_grid(&[6], 0.25, 1).unwrap();
        let s = analytic_coeffs(&Scene::PaperTestFn, &other).unwrap();
        assert!(matches!(coefficients(&p, Method::Cg, &s), Err(Error::RasterMismatch { .. })));
        let cg_only = build_cg_plan(&r, &w, &m).unwrap();
        assert!(coefficients(&cg_only, Method::Frame, &zero).is_err());
    }

    #[test]
    fn method_parsing() {
        assert_eq!("ftcg".parse::<Method>().unwrap(), Method::Ftcg);
        assert!("nufft".parse::<Method>().is_err());
    }
}
