use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gridfr::harness::{
    error_maps, max_abs_error, psnr, relative_l2, run_experiment, run_sweep, sample_scene, BandSetting, ExperimentConfig,
    Snr, SweepAxis, SweepConfig, METRIC_NOTE,
};
use gridfr::numerics::BandSpec;
use gridfr::raster::{load_raster, save_raster};
use gridfr::recon::{reconstruct, ImageGrid, Method, ModeBox, PlanOptions, ReconPlan};
use gridfr::sampling::{add_noise, load_samples, samples_raster_file, save_samples};
use gridfr::{Error, Result};

#[derive(Parser)]
#[command(name = "gridfr", version, about = "Gridding and frame reconstructions from non-uniform Fourier data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the raster of a preset or config and write it as CSV.
    GenRaster {
        #[command(flatten)]
        source: Source,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the config's scene on a raster file.
    Sample {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        raster: PathBuf,
        /// SNR in dB, or `inf`.
        #[arg(long, default_value = "inf")]
        snr: String,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct an image from a raster and its samples.
    Reconstruct {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        samples: PathBuf,
        /// Raster file; defaults to the one named in the samples header.
        #[arg(long)]
        raster: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        band: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a reconstruction CSV with a reference CSV.
    Metrics {
        #[arg(long)]
        recon: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        /// Optional directory for the log-error map.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a preset or config experiment end to end.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        band: Option<usize>,
        /// Restrict to one method.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// SNR in dB, or `inf`.
        #[arg(long)]
        snr: Option<String>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// One-dimensional error sweep over raster size or band.
    Sweep {
        #[arg(long, value_enum, default_value = "n")]
        axis: AxisArg,
        /// Sweep config JSON; defaults to the built-in sweep for the axis.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Band for the `n` axis: a number, `log` or `full`.
        #[arg(long)]
        band: Option<String>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Source {
    /// Experiment config JSON.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment: noisy-grid, asterisk or sas-wedge.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Source {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut c = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(name)) => ExperimentConfig::preset(name)?,
            (None, None) => return Err(Error::Config("either --config or --preset is required".into())),
        };
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        Ok(c)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Cg,
    Frame,
    Ftcg,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Cg => Method::Cg,
            MethodArg::Frame => Method::Frame,
            MethodArg::Ftcg => Method::Ftcg,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    N,
    R,
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenRaster { source, out } => {
            let c = source.load()?;
            let raster = c.raster.generate(c.seed)?;
            save_raster(&raster, &out)?;
            println!("{} points -> {}", raster.len(), out.display());
        }
        Command::Sample {
            source,
            raster,
            snr,
            out,
        } => {
            let c = source.load()?;
            let r = load_raster(&raster, None)?;
            let clean = sample_scene(&c.scene, &r)?;
            let samples = add_noise(&clean, Snr::parse(&snr)?.0, gridfr::harness::noise_seed(c.seed))?;
            let name = raster.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            save_samples(&samples, &r, &name, &out)?;
            println!("{} samples -> {}", samples.len(), out.display());
        }
        Command::Reconstruct {
            source,
            samples,
            raster,
            method,
            band,
            out,
        } => {
            let c = source.load()?;
            let raster_path = match raster {
                Some(p) => p,
                None => samples
                    .parent()
                    .unwrap_or(Path::new("."))
                    .join(samples_raster_file(&samples)?),
            };
            let r = load_raster(&raster_path, Some(c.modes.len()))?;
            let s = load_samples(&samples, &r)?;
            let method = Method::from(method);
            let window = c.window_spec(r.dim())?;
            let modes = ModeBox::symmetric(&c.modes)?;
            let band = BandSpec::new(band.or(c.band).unwrap_or_else(|| BandSpec::log_heuristic(c.modes[0]).r()))?;
            let opts = PlanOptions {
                quad_nodes: c.quad_nodes,
                rtol: c.rtol,
            };
            let plan = ReconPlan::build(&r, &window, &modes, &[method], Some(band), opts)?;
            let grid = c.grid.unwrap_or_else(|| gridfr::recon::default_grid_size(&modes));
            let img = reconstruct(method, &s, &plan, grid)?;
            create_dir(&out)?;
            img.write_csv(out.join(format!("{method}.csv")))?;
            img.write_magnitude_pgm(out.join(format!("{method}.pgm")), img.peak())?;
            println!("{method} image {:?} -> {}", img.size(), out.display());
        }
        Command::Metrics { recon, reference, out } => {
            let a = ImageGrid::read_csv(&recon)?;
            let b = ImageGrid::read_csv(&reference)?;
            let p = psnr(&a, &b)?;
            println!("# {METRIC_NOTE}");
            println!("psnr_db,l2_rel,linf");
            let p = if p.is_infinite() { "inf".to_string() } else { format!("{p:.6}") };
            println!("{p},{:.6e},{:.6e}", relative_l2(&a, &b)?, max_abs_error(&a, &b)?);
            if let Some(dir) = out {
                create_dir(&dir)?;
                let map = error_maps(&a, &b)?;
                map.write_csv(dir.join("logerr.csv"))?;
                map.write_real_pgm(dir.join("logerr.pgm"), gridfr::harness::LOG_ERROR_FLOOR, 0.0)?;
            }
        }
        Command::Run {
            source,
            band,
            method,
            snr,
            out,
        } => {
            let mut c = source.load()?;
            if let Some(b) = band {
                c.band = Some(b);
            }
            if let Some(m) = method {
                c.methods = vec![m.into()];
            }
            if let Some(s) = snr {
                c.snr = Snr::parse(&s)?;
            }
            c.out = Some(out.clone());
            let outcome = run_experiment(&c)?;
            print!("{}", outcome.report.to_csv());
            if let Some(w) = &outcome.report.quadrature_warning {
                eprintln!("warning: {w}");
            }
            println!("artifacts -> {}", out.display());
        }
        Command::Sweep { axis, config, band, out } => {
            let axis = match axis {
                AxisArg::N => SweepAxis::N,
                AxisArg::R => SweepAxis::R,
            };
            let mut c = match config {
                Some(p) => SweepConfig::load(p)?,
                None => SweepConfig::new(axis),
            };
            c.axis = axis;
            if let Some(b) = band {
                c.band = BandSetting::parse(&b)?;
            }
            let table = run_sweep(&c)?;
            create_dir(&out)?;
            write(&out.join("sweep.csv"), &table.to_csv())?;
            print!("{}", table.to_csv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
