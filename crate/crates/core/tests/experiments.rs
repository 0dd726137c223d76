use gridfr::harness::{run_experiment, ExperimentConfig, RasterConfig, Snr};
use gridfr::raster::load_raster;
use gridfr::recon::{ImageGrid, Method};
use gridfr::sampling::{load_samples, Scene};
use gridfr::window::WindowParams;

fn small_config(out: Option<std::path::PathBuf>) -> ExperimentConfig {
    ExperimentConfig {
        name: "small".into(),
        setup: None,
        scene: Scene::PaperTestFn,
        raster: RasterConfig::JitteredGrid {
            ranges: vec![[-5, 5], [-5, 5]],
            jitter: 0.25,
        },
        window: WindowParams {
            sigma: 1.0 / 6.0,
            trunc_eps: 1e-12,
        },
        modes: vec![5, 5],
        methods: Method::ALL.to_vec(),
        band: Some(4),
        grid: None,
        snr: Snr(40.0),
        seed: 3,
        quad_nodes: None,
        rtol: None,
        out,
    }
}

#[test]
fn artifacts_are_written_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let first = run_experiment(&small_config(Some(a.clone()))).unwrap();
    run_experiment(&small_config(Some(b.clone()))).unwrap();

    for name in [
        "raster.csv",
        "samples.csv",
        "reference.csv",
        "reference.pgm",
        "scene.pgm",
        "cg.pgm",
        "frame.csv",
        "ftcg_logerr.pgm",
        "t_matrix.csv",
        "t_matrix.pgm",
        "metrics.csv",
        "timings.csv",
        "config.json",
    ] {
        assert!(a.join(name).exists(), "{name}");
    }
    let read = |p: std::path::PathBuf| std::fs::read(p).unwrap();
    assert_eq!(read(a.join("metrics.csv")), read(b.join("metrics.csv")));
    assert_eq!(read(a.join("ftcg.csv")), read(b.join("ftcg.csv")));

    let t = read(a.join("t_matrix.pgm"));
    assert!(t.starts_with(b"P5\n121 121\n255\n"));

    let resolved = ExperimentConfig::load(a.join("config.json")).unwrap();
    assert_eq!(resolved, first.resolved);
    assert!(resolved.grid.is_some() && resolved.quad_nodes.is_some() && resolved.rtol.is_some());

    let raster = load_raster(a.join("raster.csv"), Some(2)).unwrap();
    assert_eq!(raster, first.raster);
    let samples = load_samples(a.join("samples.csv"), &raster).unwrap();
    assert_eq!(samples.values, first.samples.values);

    let img = ImageGrid::read_csv(a.join("frame.csv")).unwrap();
    assert_eq!(img.values(), first.images[1].values());
    let metrics = String::from_utf8(read(a.join("metrics.csv"))).unwrap();
    assert!(metrics.starts_with("# PSNR"));
    assert_eq!(metrics.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn noise_lowers_frame_psnr() {
    let mut clean = small_config(None);
    clean.snr = Snr::NOISELESS;
    let clean = run_experiment(&clean).unwrap().report;
    let noisy = run_experiment(&small_config(None)).unwrap().report;
    assert!(noisy.psnr(Method::Frame).unwrap() < clean.psnr(Method::Frame).unwrap());
}

#[test]
fn presets_carry_their_label_and_band() {
    let r = run_experiment(&ExperimentConfig::preset("asterisk").unwrap()).unwrap().report;
    assert_eq!(r.setup.as_deref(), Some("reconstructed setup"));
    assert_eq!(r.band, Some(12));
    assert_eq!(r.raster_points, 225);
    assert!(r.kappa_psi.unwrap() > 0.0 && r.kept_fraction.unwrap() > 0.0);
}
