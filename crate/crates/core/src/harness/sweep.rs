use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::{ExperimentConfig, RasterConfig, Snr};
use super::run::run_experiment;
use crate::numerics::BandSpec;
use crate::recon::Method;
use crate::sampling::Scene;
use crate::window::WindowParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Raster half-size `N` (with `M = N`).
    N,
    /// FTCG half-band `r` at fixed `N`.
    R,
}

/// FTCG band choice; serialized as `"log"`, `"full"` or a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandSetting {
    /// `⌈ln(2N+1)⌉`
    Log,
    /// The whole order of `ΨΩ`.
    Full,
    Fixed(usize),
}

impl BandSetting {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "log" => Ok(BandSetting::Log),
            "full" => Ok(BandSetting::Full),
            v => v
                .parse()
                .map(BandSetting::Fixed)
                .map_err(|_| Error::param("band", format!("expected a number, `log` or `full`, got `{v}`"))),
        }
    }

    /// Half-band for a 1-D raster of `2n + 1` points.
    pub fn resolve(&self, n: usize) -> usize {
        match self {
            BandSetting::Log => BandSpec::log_heuristic(n).r(),
            BandSetting::Full => 2 * n + 1,
            BandSetting::Fixed(r) => *r,
        }
    }
}

impl fmt::Display for BandSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandSetting::Log => f.write_str("log"),
            BandSetting::Full => f.write_str("full"),
            BandSetting::Fixed(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for BandSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BandSetting::Fixed(r) => s.serialize_u64(*r as u64),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for BandSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(r) => Ok(BandSetting::Fixed(r)),
            Raw::Text(t) => BandSetting::parse(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// 1-D sweep over raster size or band, on jittered grids `|n| ≤ N` with `M = N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    /// Raster half-sizes for the `n` axis.
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    /// Band used along the `n` axis.
    #[serde(default = "default_band")]
    pub band: BandSetting,
    /// Fixed raster half-size for the `r` axis.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Bands for the `r` axis.
    #[serde(default = "default_bands")]
    pub bands: Vec<BandSetting>,
    #[serde(default = "default_jitter")]
    pub jitter: f64,
    #[serde(default)]
    pub window: WindowParams,
    #[serde(default = "default_scene")]
    pub scene: Scene,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
}

fn default_n_values() -> Vec<usize> {
    vec![8, 16, 32, 64]
}
fn default_band() -> BandSetting {
    BandSetting::Log
}
fn default_n() -> usize {
    16
}
fn default_bands() -> Vec<BandSetting> {
    vec![
        BandSetting::Fixed(2),
        BandSetting::Fixed(4),
        BandSetting::Fixed(8),
        BandSetting::Full,
    ]
}
fn default_jitter() -> f64 {
    0.25
}
fn default_scene() -> Scene {
    Scene::PaperTestFn
}
fn default_seeds() -> Vec<u64> {
    (1..=5).collect()
}
fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

impl SweepConfig {
    pub fn new(axis: SweepAxis) -> Self {
        Self {
            axis,
            n_values: default_n_values(),
            band: default_band(),
            n: default_n(),
            bands: default_bands(),
            jitter: default_jitter(),
            window: WindowParams::default(),
            scene: default_scene(),
            seeds: default_seeds(),
            methods: default_methods(),
        }
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn points(&self) -> Vec<(String, usize, usize)> {
        match self.axis {
            SweepAxis::N => self
                .n_values
                .iter()
                .map(|&n| (n.to_string(), n, self.band.resolve(n)))
                .collect(),
            SweepAxis::R => self
                .bands
                .iter()
                .map(|b| (b.to_string(), self.n, b.resolve(self.n)))
                .collect(),
        }
    }

    fn experiment(&self, n: usize, band: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            name: format!("sweep-n{n}-r{band}"),
            setup: None,
            scene: self.scene.clone(),
            raster: RasterConfig::JitteredGrid {
                ranges: vec![[-(n as i64), n as i64]],
                jitter: self.jitter,
            },
            window: self.window,
            modes: vec![n],
            methods: self.methods.clone(),
            band: Some(band),
            grid: None,
            snr: Snr::NOISELESS,
            seed,
            quad_nodes: None,
            rtol: None,
            out: None,
        }
    }
}

/// Median relative ℓ2 error per method and sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub columns: Vec<String>,
    pub rows: Vec<(Method, Vec<f64>)>,
}

impl SweepTable {
    pub fn row(&self, m: Method) -> Option<&[f64]> {
        self.rows.iter().find(|(x, _)| *x == m).map(|(_, v)| v.as_slice())
    }

    pub fn to_csv(&self) -> String {
        let axis = match self.axis {
            SweepAxis::N => "n",
            SweepAxis::R => "r",
        };
        let mut out = format!("# median relative l2 error against the windowed partial sum; columns are {axis}\n");
        out.push_str(&format!("method,{}\n", self.columns.join(",")));
        for (m, vals) in &self.rows {
            let v: Vec<String> = vals.iter().map(|x| format!("{x:.12e}")).collect();
            out.push_str(&format!("{m},{}\n", v.join(",")));
        }
        out
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    if config.seeds.is_empty() || config.methods.is_empty() {
        return Err(Error::Config("sweep needs at least one seed and one method".into()));
    }
    let points = config.points();
    if points.is_empty() {
        return Err(Error::Config("sweep has no values".into()));
    }
    let mut errors: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); points.len()]; config.methods.len()];
    for (j, (_, n, band)) in points.iter().enumerate() {
        for &seed in &config.seeds {
            let report = run_experiment(&config.experiment(*n, *band, seed))?.report;
            for (i, m) in config.methods.iter().enumerate() {
                errors[i][j].push(report.method(*m).expect("method was run").l2_rel);
            }
        }
    }
    Ok(SweepTable {
        axis: config.axis,
        columns: points.into_iter().map(|(label, _, _)| label).collect(),
        rows: config
            .methods
            .iter()
            .zip(errors)
            .map(|(&m, per_value)| (m, per_value.into_iter().map(median).collect()))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_settings() {
        assert_eq!(BandSetting::parse("full").unwrap().resolve(16), 33);
        assert_eq!(BandSetting::parse("log").unwrap().resolve(16), 4);
        assert_eq!(BandSetting::parse("7").unwrap(), BandSetting::Fixed(7));
        assert!(BandSetting::parse("wide").is_err());
        let c = SweepConfig::new(SweepAxis::R);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<SweepConfig>(&json).unwrap(), c);
    }

    #[test]
    fn small_sweep_shape() {
        let mut c = SweepConfig::new(SweepAxis::N);
        c.n_values = vec![4, 6];
        c.seeds = vec![1, 2, 3];
        let t = run_sweep(&c).unwrap();
        assert_eq!(t.columns, vec!["4", "6"]);
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().all(|(_, v)| v.len() == 2 && v.iter().all(|x| x.is_finite())));
        assert_eq!(t.to_csv().lines().count(), 5);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
