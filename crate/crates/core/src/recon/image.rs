//! Images on the uniform grid `x_g = g/G` and their synthesis from modes.

use std::io::Write;
use std::path::Path;

use rustfft::FftPlanner;

use super::ModeBox;
use crate::numerics::quadrature::UnitRule;
use crate::sampling::{tabulate, transform_at, Scene};
use crate::window::{Window, WindowSpec};
use crate::{Complex, Error, Result};

/// Complex values on `[0,1)^d` sampled at `x_g = g/G`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    size: Vec<usize>,
    values: Vec<Complex>,
    pub label: String,
    pub plan_ref: String,
}

impl ImageGrid {
    pub fn new(size: Vec<usize>, values: Vec<Complex>, label: impl Into<String>) -> Result<Self> {
        if size.is_empty() || size.len() > 2 || size.iter().any(|&g| g == 0) {
            return Err(Error::param("grid", format!("invalid grid size {size:?}")));
        }
        if size.iter().product::<usize>() != values.len() {
            return Err(Error::Dimension(format!(
                "{} values for a {size:?} grid",
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Numerical("non-finite image value".into()));
        }
        Ok(Self {
            size,
            values,
            label: label.into(),
            plan_ref: String::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.size.len()
    }

    pub fn size(&self) -> &[usize] {
        &self.size
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid coordinates of flat index `i`.
    pub fn coords(&self, i: usize) -> Vec<f64> {
        match self.size.as_slice() {
            [g] => vec![i as f64 / *g as f64],
            [g1, g2] => vec![(i / g2) as f64 / *g1 as f64, (i % g2) as f64 / *g2 as f64],
            _ => unreachable!(),
        }
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.size != other.size {
            return Err(Error::Dimension(format!(
                "grid {:?} compared with grid {:?}",
                self.size, other.size
            )));
        }
        Ok(())
    }

    /// Real and imaginary parts; one grid row per line, `re,im` interleaved.
    pub fn to_csv(&self) -> String {
        let cols = *self.size.last().unwrap();
        let mut out = format!(
            "# gridfr-image v1, size={}, label={}, columns=re/im interleaved\n",
            self.size.iter().map(|g| g.to_string()).collect::<Vec<_>>().join("x"),
            self.label
        );
        for row in self.values.chunks(cols) {
            let line: Vec<String> = row
                .iter()
                .map(|v| format!("{:.16e},{:.16e}", v.re, v.im))
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), self.to_csv().as_bytes())
    }

    /// Inverse of [`ImageGrid::write_csv`].
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        let fields = header
            .strip_prefix("# gridfr-image v1")
            .ok_or_else(|| err(1, "expected `# gridfr-image v1` header".into()))?;
        let mut size = None;
        let mut label = String::new();
        for kv in fields.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match kv.split_once('=') {
                Some(("size", v)) => {
                    size = Some(
                        v.split('x')
                            .map(|g| g.parse::<usize>().map_err(|e| err(1, format!("size: {e}"))))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                Some(("label", v)) => label = v.to_string(),
                _ => {}
            }
        }
        let size = size.ok_or_else(|| err(1, "missing size".into()))?;
        let mut values = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums = line
                .split(',')
                .map(|v| crate::raster::parse_finite(v, i + 1, &err))
                .collect::<Result<Vec<_>>>()?;
            if nums.len() % 2 != 0 {
                return Err(err(i + 1, "odd number of columns".into()));
            }
            values.extend(nums.chunks_exact(2).map(|c| Complex::new(c[0], c[1])));
        }
        Self::new(size, values, label)
    }

    /// 8-bit graymap of `|value| / peak`, clamped to `[0,1]`.
    pub fn write_magnitude_pgm(&self, path: impl AsRef<Path>, peak: f64) -> Result<()> {
        let peak = if peak > 0.0 { peak } else { 1.0 };
        let (rows, cols) = self.raster_shape();
        let bytes = self.values.iter().map(|v| to_byte(v.norm() / peak)).collect();
        write_pgm(path.as_ref(), rows, cols, bytes)
    }

    /// 8-bit graymap of the real parts mapped linearly from `[lo, hi]`.
    pub fn write_real_pgm(&self, path: impl AsRef<Path>, lo: f64, hi: f64) -> Result<()> {
        let span = if hi > lo { hi - lo } else { 1.0 };
        let (rows, cols) = self.raster_shape();
        let bytes = self.values.iter().map(|v| to_byte((v.re - lo) / span)).collect();
        write_pgm(path.as_ref(), rows, cols, bytes)
    }

    fn raster_shape(&self) -> (usize, usize) {
        match self.size.as_slice() {
            [g] => (1, *g),
            [g1, g2] => (*g1, *g2),
            _ => unreachable!(),
        }
    }
}

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

/// Binary (P5) portable graymap.
pub fn write_pgm(path: &Path, rows: usize, cols: usize, pixels: Vec<u8>) -> Result<()> {
    let mut bytes = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    bytes.extend(pixels);
    write_file(path, &bytes)
}

/// `4(2M+1)` rounded up to a power of two.
pub fn default_grid_size(modes: &ModeBox) -> usize {
    (4 * (2 * modes.max_abs() as usize + 1)).next_power_of_two()
}

/// `Σ_m c_m e^{2πi⟨m,x⟩} / w(x)` on the uniform grid by zero-padded inverse FFT.
pub fn synthesize_modes(coeffs: &[Complex], modes: &ModeBox, window: &WindowSpec, grid: usize) -> Result<ImageGrid> {
    if coeffs.len() != modes.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} modes",
            coeffs.len(),
            modes.len()
        )));
    }
    let need = 2 * modes.max_abs() as usize + 1;
    if grid < need {
        return Err(Error::Aliasing { grid, modes: need });
    }
    let d = modes.dim();
    let total = grid.pow(d as u32);
    let mut buf = vec![Complex::new(0.0, 0.0); total];
    let wrap = |m: i64| m.rem_euclid(grid as i64) as usize;
    for (k, &c) in coeffs.iter().enumerate() {
        let m = modes.mode(k);
        let idx = m.iter().fold(0, |acc, &mi| acc * grid + wrap(mi));
        buf[idx] += c;
    }
    let fft = FftPlanner::new().plan_fft_inverse(grid);
    // rows, then columns
    fft.process(&mut buf);
    if d == 2 {
        let mut col = vec![Complex::new(0.0, 0.0); grid];
        for j in 0..grid {
            for i in 0..grid {
                col[i] = buf[i * grid + j];
            }
            fft.process(&mut col);
            for i in 0..grid {
                buf[i * grid + j] = col[i];
            }
        }
    }
    let w: Vec<f64> = (0..grid).map(|g| window.value(g as f64 / grid as f64)).collect();
    for (i, v) in buf.iter_mut().enumerate() {
        let wx = if d == 1 { w[i] } else { w[i / grid] * w[i % grid] };
        *v /= wx;
    }
    ImageGrid::new(vec![grid; d], buf, "synthesis")
}

/// Windowed Fourier partial sum of the scene: the coefficients
/// `ĝ(m) = ∫ f(x) w(x) e^{-2πi⟨m,x⟩} dx` over the mode box, synthesized like
/// a reconstruction. This is the yardstick for all image metrics.
pub fn windowed_reference(
    scene: &Scene,
    modes: &ModeBox,
    window: &WindowSpec,
    grid: usize,
    quad_nodes: Option<usize>,
) -> Result<ImageGrid> {
    scene.validate(modes.dim())?;
    let nodes = quad_nodes
        .unwrap_or_else(|| (8.0 * (modes.max_abs() as f64 + scene.bandwidth())).ceil() as usize)
        .max(256);
    let rule = UnitRule::new(nodes)?;
    let wf = |x: &[f64]| scene.eval(x) * window.eval_window(x).unwrap_or(0.0);
    let tab = tabulate(modes.dim(), &rule, wf);
    let coeffs: Vec<Complex> = modes
        .iter()
        .map(|m| {
            let lam: Vec<f64> = m.iter().map(|&v| v as f64).collect();
            transform_at(&tab, &rule, modes.dim(), &lam)
        })
        .collect();
    let mut img = synthesize_modes(&coeffs, modes, window, grid)?;
    img.label = "reference".into();
    Ok(img)
}

/// The scene itself sampled on the grid.
pub fn scene_image(scene: &Scene, dim: usize, grid: usize) -> Result<ImageGrid> {
    scene.validate(dim)?;
    let size = vec![grid; dim];
    let probe = ImageGrid::new(size.clone(), vec![Complex::new(0.0, 0.0); grid.pow(dim as u32)], "")?;
    let values = (0..probe.len()).map(|i| scene.eval(&probe.coords(i))).collect();
    ImageGrid::new(size, values, "scene")
}
