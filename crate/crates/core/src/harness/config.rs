use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numerics::default_rtol;
use crate::raster::{asterisk, jittered_grid_range, load_raster, sas_wedge, IndexRange, Raster};
use crate::recon::{default_grid_size, default_quad_nodes, Method, ModeBox};
use crate::sampling::Scene;
use crate::window::{WindowParams, WindowSpec};
use crate::{BandSpec, Error, Result};

/// Label attached to presets whose unstated parameters were pinned by us.
pub const RECONSTRUCTED_SETUP: &str = "reconstructed setup";

pub const PRESETS: [&str; 3] = ["noisy-grid", "asterisk", "sas-wedge"];

/// Signal-to-noise ratio in dB; serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snr(pub f64);

impl Snr {
    pub const NOISELESS: Snr = Snr(f64::INFINITY);

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(Self::NOISELESS),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|x| !x.is_nan())
                .map(Snr)
                .ok_or_else(|| Error::param("snr", format!("expected dB value or `inf`, got `{v}`"))),
        }
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Snr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Snr(v)),
            Raw::Text(t) => Snr::parse(&t).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RasterConfig {
    /// Per-axis inclusive index ranges `[lo, hi]`.
    JitteredGrid { ranges: Vec<[i64; 2]>, jitter: f64 },
    Asterisk {
        spokes: usize,
        radial_count: usize,
        max_radius: f64,
    },
    SasWedge {
        k_min: f64,
        k_max: f64,
        k_count: usize,
        ku_max: f64,
        ku_count: usize,
        /// Half extents of the box the wedge is mapped onto.
        rescale_to: Vec<f64>,
    },
    File { path: PathBuf },
}

impl RasterConfig {
    pub fn generate(&self, seed: u64) -> Result<Raster> {
        match self {
            RasterConfig::JitteredGrid { ranges, jitter } => {
                let ranges = ranges
                    .iter()
                    .map(|[lo, hi]| IndexRange::new(*lo, *hi))
                    .collect::<Result<Vec<_>>>()?;
                jittered_grid_range(&ranges, *jitter, seed)
            }
            RasterConfig::Asterisk {
                spokes,
                radial_count,
                max_radius,
            } => asterisk(*spokes, *radial_count, *max_radius),
            RasterConfig::SasWedge {
                k_min,
                k_max,
                k_count,
                ku_max,
                ku_count,
                rescale_to,
            } => sas_wedge(*k_min, *k_max, *k_count, *ku_max, *ku_count)?.rescaled_to_box(rescale_to),
            RasterConfig::File { path } => load_raster(path, None),
        }
    }
}

/// One experiment. Optional fields are filled by [`ExperimentConfig::resolve`],
/// whose output has no implicit defaults left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setup: Option<String>,
    pub scene: Scene,
    pub raster: RasterConfig,
    #[serde(default)]
    pub window: WindowParams,
    /// Output mode half-extents `M` per axis.
    pub modes: Vec<usize>,
    #[serde(default = "all_methods")]
    pub methods: Vec<Method>,
    /// FTCG half-band `r`; default `⌈ln(2M₁+1)⌉`.
    #[serde(default)]
    pub band: Option<usize>,
    /// Synthesis grid points per axis; default `4(2M+1)` rounded up to a power of two.
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default = "noiseless")]
    pub snr: Snr,
    #[serde(default)]
    pub seed: u64,
    /// Gauss–Legendre nodes for `Ψ`; default `8(M + max|λ|)`.
    #[serde(default)]
    pub quad_nodes: Option<usize>,
    /// Relative singular-value cut-off; default `1e-10·max(rows, cols)`.
    #[serde(default)]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn all_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn noiseless() -> Snr {
    Snr::NOISELESS
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn preset(name: &str) -> Result<Self> {
        let window = WindowParams {
            sigma: 1.0 / 6.0,
            trunc_eps: 1e-12,
        };
        let base = |raster, modes, band| ExperimentConfig {
            name: name.to_string(),
            setup: Some(RECONSTRUCTED_SETUP.to_string()),
            scene: Scene::PaperTestFn,
            raster,
            window,
            modes,
            methods: all_methods(),
            band: Some(band),
            grid: None,
            snr: Snr::NOISELESS,
            seed: 1,
            quad_nodes: None,
            rtol: None,
            out: None,
        };
        match name {
            // 30×30 jittered grid: T is 900×900
            "noisy-grid" => Ok(base(
                RasterConfig::JitteredGrid {
                    ranges: vec![[-15, 14], [-15, 14]],
                    jitter: 0.25,
                },
                vec![14, 14],
                8,
            )),
            "asterisk" => Ok(base(
                RasterConfig::Asterisk {
                    spokes: 16,
                    radial_count: 7,
                    max_radius: 7.0,
                },
                vec![6, 6],
                12,
            )),
            "sas-wedge" => Ok(base(
                RasterConfig::SasWedge {
                    k_min: 1.0,
                    k_max: 2.0,
                    k_count: 20,
                    ku_max: 1.5,
                    ku_count: 50,
                    rescale_to: vec![15.0, 15.0],
                },
                vec![15, 15],
                8,
            )),
            other => Err(Error::Config(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            ))),
        }
    }

    pub fn mode_box(&self) -> Result<ModeBox> {
        ModeBox::symmetric(&self.modes)
    }

    pub fn window_spec(&self, dim: usize) -> Result<WindowSpec> {
        WindowSpec::from_params(self.window, dim)
    }

    /// Generates the raster and fills every optional field.
    pub fn resolve(&self) -> Result<(ExperimentConfig, Raster)> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods requested".into()));
        }
        let raster = self.raster.generate(self.seed)?;
        if self.modes.len() != raster.dim() {
            return Err(Error::Config(format!(
                "{} mode extents for a {}-D raster",
                self.modes.len(),
                raster.dim()
            )));
        }
        self.window_spec(raster.dim())?;
        self.scene.validate(raster.dim())?;
        let modes = self.mode_box()?;
        let mut r = self.clone();
        r.band = Some(
            self.band
                .unwrap_or_else(|| BandSpec::log_heuristic(self.modes[0]).r()),
        );
        BandSpec::new(r.band.unwrap())?;
        r.grid = Some(self.grid.unwrap_or_else(|| default_grid_size(&modes)));
        r.quad_nodes = Some(self.quad_nodes.unwrap_or_else(|| default_quad_nodes(&raster, &modes)));
        r.rtol = Some(self.rtol.unwrap_or_else(|| default_rtol(raster.len(), modes.len())));
        Ok((r, raster))
    }
}
