//! Non-uniform sampling geometries in wavenumber space.
//!
//! Rasters are immutable. Generated point order is deterministic: jittered
//! grids are row-major over the multi-index (last axis fastest), asterisks list
//! the origin and then each spoke from `-R` to `R`, and SAS wedges list one range
//! line (all range wavenumbers) per along-track wavenumber.
//!
//! Random jitter uses ChaCha8 seeded through `SeedableRng::seed_from_u64`, so a
//! seed reproduces the same raster on every platform.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RasterKind {
    JitteredGrid,
    Asterisk,
    SasWedge,
    Custom,
}

impl fmt::Display for RasterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RasterKind::JitteredGrid => "jittered_grid",
            RasterKind::Asterisk => "asterisk",
            RasterKind::SasWedge => "sas_wedge",
            RasterKind::Custom => "custom",
        })
    }
}

impl FromStr for RasterKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "jittered_grid" => Ok(RasterKind::JitteredGrid),
            "asterisk" => Ok(RasterKind::Asterisk),
            "sas_wedge" => Ok(RasterKind::SasWedge),
            "custom" => Ok(RasterKind::Custom),
            other => Err(format!("unknown raster kind `{other}`")),
        }
    }
}

/// Inclusive integer index range along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexRange {
    pub lo: i64,
    pub hi: i64,
}

impl IndexRange {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::param("extents", format!("empty index range {lo}..={hi}")));
        }
        Ok(Self { lo, hi })
    }

    /// `-n ..= n`
    pub fn symmetric(n: usize) -> Self {
        Self {
            lo: -(n as i64),
            hi: n as i64,
        }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    pub fn max_abs(&self) -> i64 {
        self.lo.abs().max(self.hi.abs())
    }
}

impl fmt::Display for IndexRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// Per-axis affine map `x ↦ scale·x + offset` applied to a raster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineRescale {
    pub scale: Vec<f64>,
    pub offset: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    dim: usize,
    coords: Vec<f64>,
    kind: RasterKind,
    seed: Option<u64>,
    extents: Option<Vec<IndexRange>>,
    rescale: Option<AffineRescale>,
}

impl Raster {
    /// Arbitrary point set; rejects non-finite and duplicate points.
    pub fn custom(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::param("dim", format!("must be 1 or 2, got {dim}")));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::Dimension(format!(
                    "{dim}-D raster given a point with {} coordinates",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::build(dim, coords, RasterKind::Custom, None, None)
    }

    fn build(
        dim: usize,
        coords: Vec<f64>,
        kind: RasterKind,
        seed: Option<u64>,
        extents: Option<Vec<IndexRange>>,
    ) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::param("points", "raster is empty"));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("points", "non-finite coordinate"));
        }
        let r = Self {
            dim,
            coords,
            kind,
            seed,
            extents,
            rescale: None,
        };
        if let Some((i, j)) = r.find_duplicate() {
            return Err(Error::param(
                "points",
                format!("points {i} and {j} coincide within {DUPLICATE_TOL}"),
            ));
        }
        Ok(r)
    }

    fn find_duplicate(&self) -> Option<(usize, usize)> {
        let n = self.len();
        for i in 0..n {
            let p = self.point(i);
            for j in i + 1..n {
                let q = self.point(j);
                if p.iter().zip(q).all(|(a, b)| (a - b).abs() <= DUPLICATE_TOL) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Coordinate `axis` of every point.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        self.points().map(|p| p[axis]).collect()
    }

    pub fn kind(&self) -> RasterKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn extents(&self) -> Option<&[IndexRange]> {
        self.extents.as_deref()
    }

    pub fn rescale(&self) -> Option<&AffineRescale> {
        self.rescale.as_ref()
    }

    /// Largest `|λ|` over all points and axes.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Stable identifier of the point set and metadata.
    pub fn fingerprint(&self) -> String {
        let mut h = DefaultHasher::new();
        self.dim.hash(&mut h);
        self.kind.hash(&mut h);
        self.seed.hash(&mut h);
        for v in &self.coords {
            v.to_bits().hash(&mut h);
        }
        format!("{}-{}-{:016x}", self.kind, self.len(), h.finish())
    }

    /// Maps the bounding box of the points affinely onto `[-h_a, h_a]` per axis.
    pub fn rescaled_to_box(&self, half_extents: &[f64]) -> Result<Self> {
        if half_extents.len() != self.dim {
            return Err(Error::Dimension(format!(
                "{} half extents for a {}-D raster",
                half_extents.len(),
                self.dim
            )));
        }
        let mut scale = Vec::with_capacity(self.dim);
        let mut offset = Vec::with_capacity(self.dim);
        for (a, &h) in half_extents.iter().enumerate() {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::param("rescale", format!("half extent must be positive, got {h}")));
            }
            let xs = self.axis(a);
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                let s = 2.0 * h / (hi - lo);
                scale.push(s);
                offset.push(-h - s * lo);
            } else {
                scale.push(1.0);
                offset.push(-lo);
            }
        }
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().enumerate().map(|(a, &v)| scale[a] * v + offset[a]).collect::<Vec<_>>())
            .collect();
        let mut out = Self::build(self.dim, coords, self.kind, self.seed, None)?;
        out.rescale = Some(AffineRescale { scale, offset });
        Ok(out)
    }
}

/// Jittered grid over `|n_i| ≤ N_i`.
pub fn jittered_grid(extents: &[usize], jitter: f64, seed: u64) -> Result<Raster> {
    let ranges: Vec<IndexRange> = extents.iter().map(|&n| IndexRange::symmetric(n)).collect();
    jittered_grid_range(&ranges, jitter, seed)
}

/// Jittered grid over arbitrary per-axis index ranges: `λ_n = n + u`, with
/// every `u_i` uniform on `[-jitter, jitter]`.
pub fn jittered_grid_range(ranges: &[IndexRange], jitter: f64, seed: u64) -> Result<Raster> {
    let dim = ranges.len();
    if dim != 1 && dim != 2 {
        return Err(Error::param("extents", format!("need 1 or 2 axes, got {dim}")));
    }
    if !(0.0..0.5).contains(&jitter) {
        return Err(Error::param(
            "jitter",
            format!("must lie in [0, 1/2), got {jitter}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::new();
    let mut push = |n: i64, rng: &mut ChaCha8Rng| {
        let u = if jitter > 0.0 {
            rng.gen_range(-jitter..=jitter)
        } else {
            0.0
        };
        coords.push(n as f64 + u);
    };
    match ranges {
        [a] => a.iter().for_each(|n| push(n, &mut rng)),
        [a, b] => {
            for n1 in a.iter() {
                for n2 in b.iter() {
                    push(n1, &mut rng);
                    push(n2, &mut rng);
                }
            }
        }
        _ => unreachable!(),
    }
    Raster::build(dim, coords, RasterKind::JitteredGrid, Some(seed), Some(ranges.to_vec()))
}

/// `S` spokes at angles `πs/S` with `J` points on each side of the origin,
/// at radii `jR/J`, plus the origin: `2SJ + 1` points.
pub fn asterisk(spokes: usize, radial_count: usize, max_radius: f64) -> Result<Raster> {
    if spokes < 2 {
        return Err(Error::param("spokes", format!("need at least 2, got {spokes}")));
    }
    if radial_count == 0 {
        return Err(Error::param("radial_count", "must be at least 1"));
    }
    if !(max_radius.is_finite() && max_radius > 0.0) {
        return Err(Error::param("max_radius", format!("must be positive, got {max_radius}")));
    }
    let j_max = radial_count as i64;
    let mut coords = vec![0.0, 0.0];
    for s in 0..spokes {
        let theta = std::f64::consts::PI * s as f64 / spokes as f64;
        let (sin, cos) = theta.sin_cos();
        for j in (-j_max..=j_max).filter(|&j| j != 0) {
            let r = j as f64 * max_radius / radial_count as f64;
            coords.push(snap(r * cos));
            coords.push(snap(r * sin));
        }
    }
    Raster::build(2, coords, RasterKind::Asterisk, None, None)
}

// cos(π/2) is 6e-17, not 0
fn snap(v: f64) -> f64 {
    if v.abs() < 1e-14 {
        0.0
    } else {
        v
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Side-scan wavenumber coverage: `(k_u, sqrt(4k² - k_u²))` for `k` on a
/// uniform grid over `[k_min, k_max]` and `k_u` on a uniform grid over
/// `[-ku_max, ku_max]`. A single `k` sample sits at `k_min`; a single `k_u`
/// sample sits at 0.
pub fn sas_wedge(k_min: f64, k_max: f64, k_count: usize, ku_max: f64, ku_count: usize) -> Result<Raster> {
    if !(k_min.is_finite() && k_min > 0.0) {
        return Err(Error::param("k_min", format!("must be positive, got {k_min}")));
    }
    if !(k_max.is_finite() && (k_max > k_min || (k_count == 1 && k_max >= k_min))) {
        return Err(Error::param("k_max", format!("must exceed k_min = {k_min}, got {k_max}")));
    }
    if k_count == 0 || ku_count == 0 {
        return Err(Error::param("k_count", "sample counts must be positive"));
    }
    if !(ku_max.is_finite() && ku_max >= 0.0) {
        return Err(Error::param("ku_max", format!("must be non-negative, got {ku_max}")));
    }
    if ku_max >= 2.0 * k_min {
        return Err(Error::param(
            "ku_max",
            format!("{ku_max} ≥ 2·k_min = {} gives imaginary k_y", 2.0 * k_min),
        ));
    }
    let ks = grid(k_min, k_max, k_count);
    let kus = if ku_count == 1 {
        vec![0.0]
    } else {
        grid(-ku_max, ku_max, ku_count)
    };
    let mut coords = Vec::with_capacity(2 * ks.len() * kus.len());
    for &ku in &kus {
        for &k in &ks {
            coords.push(ku);
            coords.push((4.0 * k * k - ku * ku).sqrt());
        }
    }
    Raster::build(2, coords, RasterKind::SasWedge, None, None)
}

const RASTER_MAGIC: &str = "gridfr-raster v1";

/// Writes the raster CSV: a header line, optional metadata comments, then one
/// point per line with 17 significant digits.
pub fn save_raster(raster: &Raster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let seed = raster.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    out.push_str(&format!(
        "# {RASTER_MAGIC}, dim={}, kind={}, seed={seed}\n",
        raster.dim, raster.kind
    ));
    if let Some(ext) = &raster.extents {
        let parts: Vec<String> = ext.iter().map(|r| r.to_string()).collect();
        out.push_str(&format!("# extents={}\n", parts.join(",")));
    }
    if let Some(rs) = &raster.rescale {
        let parts: Vec<String> = rs
            .scale
            .iter()
            .zip(&rs.offset)
            .map(|(s, o)| format!("{s:.16e}:{o:.16e}"))
            .collect();
        out.push_str(&format!("# rescale={}\n", parts.join(",")));
    }
    for p in raster.points() {
        let cols: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads a raster CSV. With `expected_dim`, a raster of another dimension is
/// a [`Error::Dimension`].
pub fn load_raster(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<Raster> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_raster(&text, path, expected_dim)
}

pub(crate) fn parse_raster(text: &str, path: &Path, expected_dim: Option<usize>) -> Result<Raster> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields = header
        .strip_prefix('#')
        .map(str::trim)
        .and_then(|h| h.strip_prefix(RASTER_MAGIC))
        .ok_or_else(|| err(1, format!("expected `# {RASTER_MAGIC}` header")))?;
    let (mut dim, mut kind, mut seed) = (None, None, None);
    for kv in fields.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| err(1, format!("malformed field `{kv}`")))?;
        match k {
            "dim" => dim = Some(v.parse::<usize>().map_err(|e| err(1, format!("dim: {e}")))?),
            "kind" => kind = Some(v.parse::<RasterKind>().map_err(|e| err(1, e))?),
            "seed" => {
                seed = if v == "none" {
                    None
                } else {
                    Some(v.parse::<u64>().map_err(|e| err(1, format!("seed: {e}")))?)
                }
            }
            other => return Err(err(1, format!("unknown header field `{other}`"))),
        }
    }
    let dim = dim.ok_or_else(|| err(1, "missing dim".into()))?;
    let kind = kind.ok_or_else(|| err(1, "missing kind".into()))?;
    if dim != 1 && dim != 2 {
        return Err(err(1, format!("dim must be 1 or 2, got {dim}")));
    }
    if let Some(want) = expected_dim {
        if want != dim {
            return Err(Error::Dimension(format!(
                "{}: file holds a {dim}-D raster, expected {want}-D",
                path.display()
            )));
        }
    }

    let mut extents = None;
    let mut rescale = None;
    let mut coords = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            if let Some(v) = meta.strip_prefix("extents=") {
                let ranges = v
                    .split(',')
                    .map(|r| {
                        let (lo, hi) = r.split_once(':').ok_or_else(|| err(lineno, format!("bad range `{r}`")))?;
                        let lo = lo.parse().map_err(|e| err(lineno, format!("{e}")))?;
                        let hi = hi.parse().map_err(|e| err(lineno, format!("{e}")))?;
                        IndexRange::new(lo, hi).map_err(|e| err(lineno, e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                extents = Some(ranges);
            } else if let Some(v) = meta.strip_prefix("rescale=") {
                let mut rs = AffineRescale {
                    scale: vec![],
                    offset: vec![],
                };
                for part in v.split(',') {
                    let (s, o) = part.split_once(':').ok_or_else(|| err(lineno, format!("bad rescale `{part}`")))?;
                    rs.scale.push(parse_finite(s, lineno, &err)?);
                    rs.offset.push(parse_finite(o, lineno, &err)?);
                }
                rescale = Some(rs);
            }
            continue;
        }
        let vals: Vec<&str> = line.split(',').map(str::trim).collect();
        if vals.len() != dim {
            return Err(err(lineno, format!("expected {dim} columns, found {}", vals.len())));
        }
        for v in vals {
            coords.push(parse_finite(v, lineno, &err)?);
        }
    }
    let mut r = Raster::build(dim, coords, kind, seed, extents).map_err(|e| err(0, e.to_string()))?;
    r.rescale = rescale;
    Ok(r)
}

pub(crate) fn parse_finite(s: &str, line: usize, err: &impl Fn(usize, String) -> Error) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|e| err(line, format!("`{s}`: {e}")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite value `{s}`")));
    }
    Ok(v)
}
