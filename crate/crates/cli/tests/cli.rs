use std::path::Path;
use std::process::{Command, Output};

fn gridfr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridfr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: &str = r#"{
    "name": "small",
    "scene": {"kind": "paper_test_fn"},
    "raster": {"kind": "jittered_grid", "ranges": [[-6, 6]], "jitter": 0.25},
    "window": {"sigma": 0.125, "trunc_eps": 1e-12},
    "modes": [6],
    "band": 3,
    "seed": 4
}"#;

#[test]
fn file_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let config = d.join("small.json");
    std::fs::write(&config, SMALL).unwrap();

    let raster = d.join("raster.csv");
    let out = gridfr(&["gen-raster", "--config", s(&config), "--out", s(&raster)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&raster).unwrap().starts_with("# gridfr-raster v1, dim=1, kind=jittered_grid, seed=4"));

    let samples = d.join("samples.csv");
    let out = gridfr(&["sample", "--config", s(&config), "--raster", s(&raster), "--snr", "inf", "--out", s(&samples)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&samples).unwrap().starts_with("# gridfr-samples v1, raster=raster.csv"));

    for method in ["cg", "frame", "ftcg"] {
        let out = gridfr(&[
            "reconstruct", "--config", s(&config), "--samples", s(&samples), "--method", method, "--out", s(d),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(d.join(format!("{method}.pgm")).exists());
    }

    let run_dir = d.join("run");
    let out = gridfr(&["run", "--config", s(&config), "--method", "frame", "--out", s(&run_dir)]);
    assert!(out.status.success());

    let out = gridfr(&[
        "metrics", "--recon", s(&d.join("frame.csv")), "--reference", s(&run_dir.join("reference.csv")),
        "--out", s(&d.join("m")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let psnr: f64 = row.split(',').next().unwrap().parse().unwrap();
    assert!(psnr > 20.0, "{text}");
    assert!(d.join("m/logerr.pgm").exists());
}

#[test]
fn run_preset_writes_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out = gridfr(&["run", "--preset", "asterisk", "--seed", "2", "--snr", "40", "--out", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert!(metrics.contains("setup=reconstructed setup, seed=2"));
    let config = std::fs::read_to_string(dir.path().join("config.json")).unwrap();
    assert!(config.contains("\"snr\": 40.0"));
}

#[test]
fn sweep_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(&cfg, r#"{"axis": "n", "n_values": [4, 6], "seeds": [1, 2]}"#).unwrap();
    let out = gridfr(&["sweep", "--axis", "n", "--config", s(&cfg), "--out", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = table.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "method,4,6");
    assert_eq!(lines.len(), 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = gridfr(&["run", "--preset", "nope", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));

    let out = gridfr(&["run", "--preset", "asterisk", "--band", "0", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));

    let out = gridfr(&["run", "--method", "svd", "--preset", "asterisk", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, SMALL.replace("\"seed\": 4", "\"seed\": 4, \"rtol\": 2.0")).unwrap();
    let out = gridfr(&["run", "--config", s(&bad), "--method", "frame", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let raster = dir.path().join("r.csv");
    std::fs::write(&raster, "# gridfr-raster v1, dim=1, kind=custom, seed=none\n0.5\nNaN\n").unwrap();
    let out = gridfr(&["sample", "--config", s(&bad), "--raster", s(&raster), "--out", s(&dir.path().join("s.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":3:"));
}
