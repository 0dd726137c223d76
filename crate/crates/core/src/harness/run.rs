use std::path::Path;

use super::config::ExperimentConfig;
use super::metrics::{error_maps, max_abs_error, psnr, relative_l2, MethodMetrics, MetricsReport};
use crate::numerics::BandSpec;
use crate::raster::{save_raster, Raster};
use crate::recon::image::write_file;
use crate::recon::{reconstruct, scene_image, windowed_reference, ImageGrid, PlanOptions, ReconPlan};
use crate::sampling::{add_noise, analytic_coeffs, min_quadrature_nodes, quadrature_coeffs, save_samples, SampleSet, Scene};
use crate::{Error, Result};

/// Everything a run produced, for callers that want more than the report.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: MetricsReport,
    pub resolved: ExperimentConfig,
    pub raster: Raster,
    pub samples: SampleSet,
    pub reference: ImageGrid,
    pub images: Vec<ImageGrid>,
}

/// Closed-form data where available, otherwise quadrature at a resolved node count.
pub fn sample_scene(scene: &Scene, raster: &Raster) -> Result<SampleSet> {
    match scene {
        Scene::GridImage { .. } => quadrature_coeffs(scene, raster, min_quadrature_nodes(scene, raster).max(256)),
        _ => analytic_coeffs(scene, raster),
    }
}

/// Seed of the noise stream; the raster stream uses the config seed itself.
pub fn noise_seed(seed: u64) -> u64 {
    seed.wrapping_add(1)
}

/// Builds the plan, reconstructs with every requested method and, when
/// `config.out` is set, writes the artifacts there.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let (resolved, raster) = config.resolve()?;
    let window = resolved.window_spec(raster.dim())?;
    let modes = resolved.mode_box()?;
    let grid = resolved.grid.expect("resolved");
    let band = BandSpec::new(resolved.band.expect("resolved"))?;

    let clean = sample_scene(&resolved.scene, &raster)?;
    let samples = add_noise(&clean, resolved.snr.0, noise_seed(resolved.seed))?;

    let opts = PlanOptions {
        quad_nodes: resolved.quad_nodes,
        rtol: resolved.rtol,
    };
    let plan = ReconPlan::build(&raster, &window, &modes, &resolved.methods, Some(band), opts)?;

    let reference = windowed_reference(&resolved.scene, &modes, &window, grid, None)?;
    let scene_img = scene_image(&resolved.scene, raster.dim(), grid)?;

    let mut methods = Vec::new();
    let mut images = Vec::new();
    for &m in &resolved.methods {
        let img = reconstruct(m, &samples, &plan, grid)?;
        methods.push(MethodMetrics {
            method: m,
            psnr_db: psnr(&img, &reference)?,
            psnr_raw_db: psnr(&img, &scene_img)?,
            l2_rel: relative_l2(&img, &reference)?,
            linf: max_abs_error(&img, &reference)?,
        });
        images.push(img);
    }
    let meta = &plan.meta;
    let report = MetricsReport {
        experiment: resolved.name.clone(),
        setup: resolved.setup.clone(),
        seed: resolved.seed,
        raster_points: raster.len(),
        modes: modes.len(),
        band: plan.band().map(|b| b.r()),
        methods,
        kappa_psi: meta.kappa_psi,
        kappa_masked_t: meta.kappa_masked_t,
        kappa_c: meta.kappa_c,
        kept_fraction: meta.kept_fraction,
        ranks: meta.ranks.clone(),
        quadrature_warning: meta.quadrature.as_ref().and_then(|q| q.warning.clone()),
        timings: meta.timings.clone(),
    };
    let outcome = ExperimentOutcome {
        report,
        resolved,
        raster,
        samples,
        reference,
        images,
    };
    if let Some(dir) = &config.out {
        write_artifacts(&outcome, &plan, &scene_img, dir)?;
    }
    Ok(outcome)
}

fn write_artifacts(o: &ExperimentOutcome, plan: &ReconPlan, scene_img: &ImageGrid, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_raster(&o.raster, dir.join("raster.csv"))?;
    save_samples(&o.samples, &o.raster, "raster.csv", dir.join("samples.csv"))?;
    let peak = o.reference.peak();
    o.reference.write_csv(dir.join("reference.csv"))?;
    o.reference.write_magnitude_pgm(dir.join("reference.pgm"), peak)?;
    scene_img.write_magnitude_pgm(dir.join("scene.pgm"), peak)?;
    for img in &o.images {
        img.write_csv(dir.join(format!("{}.csv", img.label)))?;
        img.write_magnitude_pgm(dir.join(format!("{}.pgm", img.label)), peak)?;
        let err = error_maps(img, &o.reference)?;
        let (lo, hi) = err
            .values()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.re), hi.max(v.re)));
        err.write_real_pgm(dir.join(format!("{}_logerr.pgm", img.label)), lo, hi)?;
    }
    if let Some(t) = plan.t() {
        write_file(&dir.join("t_matrix.csv"), t.magnitude_csv().as_bytes())?;
        let peak = t.max_abs();
        let pixels = t
            .as_slice()
            .iter()
            .map(|z| ((z.norm() / peak).clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        crate::recon::write_pgm(&dir.join("t_matrix.pgm"), t.rows(), t.cols(), pixels)?;
    }
    write_file(&dir.join("metrics.csv"), o.report.to_csv().as_bytes())?;
    write_file(&dir.join("timings.csv"), o.report.timings_csv().as_bytes())?;
    write_file(&dir.join("config.json"), o.resolved.to_json().as_bytes())?;
    Ok(())
}
