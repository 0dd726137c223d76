//! Metrics, experiment configs and presets, runs and sweeps.

mod config;
mod metrics;
mod run;
mod sweep;

pub use config::{ExperimentConfig, RasterConfig, Snr, PRESETS, RECONSTRUCTED_SETUP};
pub use metrics::{
    error_maps, max_abs_error, psnr, relative_l2, MethodMetrics, MetricsReport, LOG_ERROR_FLOOR, METRIC_NOTE,
};
pub use run::{noise_seed, run_experiment, sample_scene, ExperimentOutcome};
pub use sweep::{run_sweep, BandSetting, SweepAxis, SweepConfig, SweepTable};
