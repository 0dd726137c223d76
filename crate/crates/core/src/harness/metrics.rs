use serde::Serialize;

use crate::recon::{ImageGrid, Method};
use crate::{Complex, Result};

/// Floor of [`error_maps`], standing in for `log10 0`.
pub const LOG_ERROR_FLOOR: f64 = -16.0;

/// Metric convention stated at the top of every metrics file.
pub const METRIC_NOTE: &str = "PSNR = 20 log10(max|reference| / sqrt(mean |recon - reference|^2)) over the full grid; \
psnr_db uses the windowed Fourier partial sum of the scene as reference, psnr_raw_db the scene itself";

/// `20·log10(peak / √MSE)` with `peak = max|reference|` and MSE the mean of
/// `|recon − reference|²`. Identical images give `+∞`.
pub fn psnr(recon: &ImageGrid, reference: &ImageGrid) -> Result<f64> {
    recon.same_grid(reference)?;
    let mse = mean_sq_diff(recon.values(), reference.values());
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (reference.peak() / mse.sqrt()).log10())
}

fn mean_sq_diff(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() / a.len() as f64
}

/// `‖recon − reference‖₂ / ‖reference‖₂` over the grid.
pub fn relative_l2(recon: &ImageGrid, reference: &ImageGrid) -> Result<f64> {
    recon.same_grid(reference)?;
    let num: f64 = recon
        .values()
        .iter()
        .zip(reference.values())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let den: f64 = reference.values().iter().map(|y| y.norm_sqr()).sum();
    Ok(if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    })
}

pub fn max_abs_error(recon: &ImageGrid, reference: &ImageGrid) -> Result<f64> {
    recon.same_grid(reference)?;
    Ok(recon
        .values()
        .iter()
        .zip(reference.values())
        .fold(0.0, |m, (x, y)| m.max((x - y).norm())))
}

/// Pointwise `log10|recon − reference|`, floored at −16, in the real part.
pub fn error_maps(recon: &ImageGrid, reference: &ImageGrid) -> Result<ImageGrid> {
    recon.same_grid(reference)?;
    let values = recon
        .values()
        .iter()
        .zip(reference.values())
        .map(|(x, y)| Complex::new((x - y).norm().log10().max(LOG_ERROR_FLOOR), 0.0))
        .collect();
    let mut img = ImageGrid::new(recon.size().to_vec(), values, format!("{}_logerr", recon.label))?;
    img.plan_ref = recon.plan_ref.clone();
    Ok(img)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodMetrics {
    pub method: Method,
    pub psnr_db: f64,
    pub psnr_raw_db: f64,
    pub l2_rel: f64,
    pub linf: f64,
}

impl MethodMetrics {
    pub fn psnr_is_infinite(&self) -> bool {
        self.psnr_db == f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub experiment: String,
    pub setup: Option<String>,
    pub seed: u64,
    pub raster_points: usize,
    pub modes: usize,
    pub band: Option<usize>,
    pub methods: Vec<MethodMetrics>,
    pub kappa_psi: Option<f64>,
    pub kappa_masked_t: Option<f64>,
    pub kappa_c: Option<f64>,
    pub kept_fraction: Option<f64>,
    pub ranks: Vec<(String, usize)>,
    pub quadrature_warning: Option<String>,
    /// Seconds per phase; excluded from `metrics.csv` so that file is reproducible.
    pub timings: Vec<(String, f64)>,
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v:.12e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl MetricsReport {
    pub fn method(&self, m: Method) -> Option<&MethodMetrics> {
        self.methods.iter().find(|x| x.method == m)
    }

    pub fn psnr(&self, m: Method) -> Option<f64> {
        self.method(m).map(|x| x.psnr_db)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# {METRIC_NOTE}\n");
        out.push_str(&format!(
            "# experiment={}, setup={}, seed={}, raster_points={}, modes={}, band={}\n",
            self.experiment,
            self.setup.as_deref().unwrap_or("user"),
            self.seed,
            self.raster_points,
            self.modes,
            self.band.map(|b| b.to_string()).unwrap_or_default()
        ));
        out.push_str("method,psnr_db,psnr_raw_db,l2_rel,linf,kappa_psi,kappa_masked_t,kappa_c,kept_fraction\n");
        for m in &self.methods {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                m.method,
                num(m.psnr_db),
                num(m.psnr_raw_db),
                num(m.l2_rel),
                num(m.linf),
                opt(self.kappa_psi),
                opt(self.kappa_masked_t),
                opt(self.kappa_c),
                opt(self.kept_fraction)
            ));
        }
        out
    }

    pub fn timings_csv(&self) -> String {
        let mut out = String::from("phase,seconds\n");
        for (p, s) in &self.timings {
            out.push_str(&format!("{p},{s:.6}\n"));
        }
        out
    }
}
