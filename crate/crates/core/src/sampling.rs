//! Fourier data `f̂(λ) = ∫_{[0,1]^d} f(x) e^{-2πi⟨λ,x⟩} dx` for test scenes.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::numerics::quadrature::UnitRule;
use crate::raster::{parse_finite, Raster};
use crate::{Complex, Error, Result};

/// Scene on `[0,1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scene {
    /// `sin(4πx₁)·sin(2πx₂)` in 2-D, `sin(4πx)` in 1-D.
    PaperTestFn,
    /// `Σ c_k e^{2πi⟨k,x⟩}` over integer frequency vectors `k`.
    TrigPoly { terms: Vec<TrigTerm> },
    /// Piecewise-constant pixels, row-major with `size[0]` rows.
    GridImage { size: Vec<usize>, pixels: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

impl TrigTerm {
    pub fn new(freq: Vec<i64>, coeff: Complex) -> Self {
        Self {
            freq,
            re: coeff.re,
            im: coeff.im,
        }
    }

    pub fn coeff(&self) -> Complex {
        Complex::new(self.re, self.im)
    }
}

impl Scene {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Scene::PaperTestFn => Ok(()),
            Scene::TrigPoly { terms } => {
                for t in terms {
                    if t.freq.len() != dim {
                        return Err(Error::Dimension(format!(
                            "trig term {:?} used on a {dim}-D raster",
                            t.freq
                        )));
                    }
                    if !(t.re.is_finite() && t.im.is_finite()) {
                        return Err(Error::param("scene", "non-finite trig coefficient"));
                    }
                }
                Ok(())
            }
            Scene::GridImage { size, pixels } => {
                if size.len() != dim {
                    return Err(Error::Dimension(format!(
                        "{}-D image used on a {dim}-D raster",
                        size.len()
                    )));
                }
                if size.iter().any(|&s| s == 0) || size.iter().product::<usize>() != pixels.len() {
                    return Err(Error::param("scene", "image size does not match pixel count"));
                }
                if pixels.iter().any(|p| !p.is_finite()) {
                    return Err(Error::param("scene", "non-finite pixel"));
                }
                Ok(())
            }
        }
    }

    /// Highest frequency content per axis, in cycles per unit length.
    pub fn bandwidth(&self) -> f64 {
        match self {
            Scene::PaperTestFn => 2.0,
            Scene::TrigPoly { terms } => terms
                .iter()
                .flat_map(|t| t.freq.iter())
                .fold(0.0, |m, &k| m.max(k.unsigned_abs() as f64)),
            Scene::GridImage { size, .. } => size.iter().copied().max().unwrap_or(1) as f64 / 2.0,
        }
    }

    /// `f(x)`; callers guarantee `x ∈ [0,1]^d`.
    pub fn eval(&self, x: &[f64]) -> Complex {
        match self {
            Scene::PaperTestFn => {
                let mut v = (4.0 * PI * x[0]).sin();
                if x.len() > 1 {
                    v *= (2.0 * PI * x[1]).sin();
                }
                Complex::new(v, 0.0)
            }
            Scene::TrigPoly { terms } => terms
                .iter()
                .map(|t| {
                    let phase: f64 = t.freq.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
                    t.coeff() * Complex::from_polar(1.0, 2.0 * PI * phase)
                })
                .sum(),
            Scene::GridImage { size, pixels } => {
                let mut idx = 0;
                for (a, &s) in size.iter().enumerate() {
                    let i = ((x[a] * s as f64).floor() as usize).min(s - 1);
                    idx = idx * s + i;
                }
                Complex::new(pixels[idx], 0.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Quadrature,
    File,
}

/// Fourier data bound to a raster.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub raster_ref: String,
    pub values: Vec<Complex>,
    pub provenance: Provenance,
    pub noise_seed: Option<u64>,
    /// Set when the quadrature node count was below the resolution rule.
    pub under_resolved: bool,
}

impl SampleSet {
    pub fn new(raster: &Raster, values: Vec<Complex>, provenance: Provenance) -> Result<Self> {
        if values.len() != raster.len() {
            return Err(Error::Dimension(format!(
                "{} values for a raster of {} points",
                values.len(),
                raster.len()
            )));
        }
        Ok(Self {
            raster_ref: raster.fingerprint(),
            values,
            provenance,
            noise_seed: None,
            under_resolved: false,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `∫₀¹ e^{2πitx} dx`.
pub fn unit_exp_integral(t: f64) -> Complex {
    if t == 0.0 {
        return Complex::new(1.0, 0.0);
    }
    let z = Complex::new(0.0, 2.0 * PI * t);
    if t.abs() < 1e-6 {
        // series avoids cancellation in (e^z - 1)/z
        return Complex::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    }
    (z.exp() - 1.0) / z
}

/// `∫₀¹ sin(aπx) e^{-2πiλx} dx`.
pub fn sine_coeff(lambda: f64, a: f64) -> Complex {
    (unit_exp_integral(a / 2.0 - lambda) - unit_exp_integral(-a / 2.0 - lambda)) / Complex::new(0.0, 2.0)
}

/// Closed-form coefficients for `PaperTestFn` and `TrigPoly` scenes.
pub fn analytic_coeffs(scene: &Scene, raster: &Raster) -> Result<SampleSet> {
    scene.validate(raster.dim())?;
    let values = match scene {
        Scene::PaperTestFn => raster
            .points()
            .map(|p| {
                let mut v = sine_coeff(p[0], 4.0);
                if p.len() > 1 {
                    v *= sine_coeff(p[1], 2.0);
                }
                v
            })
            .collect(),
        Scene::TrigPoly { terms } => raster
            .points()
            .map(|p| {
                terms
                    .iter()
                    .map(|t| {
                        t.freq
                            .iter()
                            .zip(p)
                            .map(|(&k, &l)| unit_exp_integral(k as f64 - l))
                            .product::<Complex>()
                            * t.coeff()
                    })
                    .sum()
            })
            .collect(),
        Scene::GridImage { .. } => {
            return Err(Error::param(
                "scene",
                "grid_image has no closed form; use quadrature coefficients",
            ))
        }
    };
    SampleSet::new(raster, values, Provenance::Analytic)
}

/// Node count below which [`quadrature_coeffs`] flags its output.
pub fn min_quadrature_nodes(scene: &Scene, raster: &Raster) -> usize {
    (4.0 * (raster.max_abs() + scene.bandwidth())).ceil() as usize
}

/// Gauss–Legendre quadrature of the Fourier integral with `nodes_per_axis`
/// nodes on each axis. For smooth scenes the error decays geometrically in
/// the node count once it exceeds the oscillation count.
pub fn quadrature_coeffs(scene: &Scene, raster: &Raster, nodes_per_axis: usize) -> Result<SampleSet> {
    scene.validate(raster.dim())?;
    let rule = UnitRule::new(nodes_per_axis)?;
    let tabulated = tabulate(raster.dim(), &rule, |x| scene.eval(x));
    let values = raster
        .points()
        .map(|p| transform_at(&tabulated, &rule, raster.dim(), p))
        .collect();
    let mut s = SampleSet::new(raster, values, Provenance::Quadrature)?;
    if nodes_per_axis < min_quadrature_nodes(scene, raster) {
        log::warn!(
            "quadrature with {nodes_per_axis} nodes per axis is under-resolved (need {})",
            min_quadrature_nodes(scene, raster)
        );
        s.under_resolved = true;
    }
    Ok(s)
}

/// Values of `f` on the tensor node grid, row-major.
pub(crate) fn tabulate(dim: usize, rule: &UnitRule, f: impl Fn(&[f64]) -> Complex) -> Vec<Complex> {
    let xs = rule.nodes();
    match dim {
        1 => xs.iter().map(|&x| f(&[x])).collect(),
        _ => xs
            .iter()
            .flat_map(|&x1| xs.iter().map(move |&x2| [x1, x2]))
            .map(|x| f(&x))
            .collect(),
    }
}

fn weighted_phases(rule: &UnitRule, lambda: f64) -> Vec<Complex> {
    rule.iter()
        .map(|(x, w)| Complex::from_polar(w, -2.0 * PI * lambda * x))
        .collect()
}

/// `Σ_q w_q F(x_q) e^{-2πi⟨λ,x_q⟩}` over the tensor rule.
pub(crate) fn transform_at(tabulated: &[Complex], rule: &UnitRule, dim: usize, lambda: &[f64]) -> Complex {
    let a = weighted_phases(rule, lambda[0]);
    if dim == 1 {
        return a.iter().zip(tabulated).map(|(a, f)| a * f).sum();
    }
    let b = weighted_phases(rule, lambda[1]);
    let n = rule.len();
    a.iter()
        .enumerate()
        .map(|(i, ai)| {
            let row = &tabulated[i * n..(i + 1) * n];
            ai * b.iter().zip(row).map(|(b, f)| b * f).sum::<Complex>()
        })
        .sum()
}

/// Adds circular complex Gaussian noise at the requested SNR in dB.
/// `snr_db = +∞` returns the input unchanged.
pub fn add_noise(samples: &SampleSet, snr_db: f64, seed: u64) -> Result<SampleSet> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::param("snr", format!("invalid SNR {snr_db}")));
    }
    if snr_db == f64::INFINITY {
        return Ok(samples.clone());
    }
    if samples.is_empty() {
        return Err(Error::param("samples", "cannot add noise to an empty sample set"));
    }
    let power = samples.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / samples.len() as f64;
    if power == 0.0 {
        return Err(Error::param("samples", "signal is identically zero; SNR undefined"));
    }
    let noise_power = power / 10f64.powf(snr_db / 10.0);
    let normal = Normal::new(0.0, (noise_power / 2.0).sqrt())
        .map_err(|e| Error::param("snr", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = samples.clone();
    for v in &mut out.values {
        *v += Complex::new(normal.sample(&mut rng), normal.sample(&mut rng));
    }
    out.noise_seed = Some(seed);
    Ok(out)
}

const SAMPLES_MAGIC: &str = "gridfr-samples v1";

/// Writes `# gridfr-samples v1, raster=<file>` followed by `kx[,ky],re,im` rows.
pub fn save_samples(samples: &SampleSet, raster: &Raster, raster_file: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if samples.raster_ref != raster.fingerprint() {
        return Err(Error::RasterMismatch {
            samples: samples.raster_ref.clone(),
            plan: raster.fingerprint(),
        });
    }
    let mut out = format!("# {SAMPLES_MAGIC}, raster={raster_file}\n");
    for (p, v) in raster.points().zip(&samples.values) {
        for c in p {
            out.push_str(&format!("{c:.16e},"));
        }
        out.push_str(&format!("{:.16e},{:.16e}\n", v.re, v.im));
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Raster file name recorded in a sample CSV header.
pub fn samples_raster_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header = text.lines().next().unwrap_or("");
    parse_header(header).ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: format!("expected `# {SAMPLES_MAGIC}, raster=<file>` header"),
    })
}

fn parse_header(line: &str) -> Option<String> {
    let rest = line.strip_prefix('#')?.trim().strip_prefix(SAMPLES_MAGIC)?;
    let rest = rest.trim_start_matches(',').trim();
    Some(rest.strip_prefix("raster=")?.trim().to_string())
}

/// Reads a sample CSV and binds it to `raster`; the coordinates in the file
/// must match the raster points.
pub fn load_samples(path: impl AsRef<Path>, raster: &Raster) -> Result<SampleSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    parse_header(header).ok_or_else(|| err(1, format!("expected `# {SAMPLES_MAGIC}` header")))?;
    let d = raster.dim();
    let mut values = Vec::with_capacity(raster.len());
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != d + 2 {
            return Err(err(lineno, format!("expected {} columns, found {}", d + 2, cols.len())));
        }
        let k = values.len();
        if k >= raster.len() {
            return Err(err(lineno, format!("more rows than the {} raster points", raster.len())));
        }
        for a in 0..d {
            let c = parse_finite(cols[a], lineno, &err)?;
            if (c - raster.point(k)[a]).abs() > 1e-12 * (1.0 + c.abs()) {
                return Err(err(lineno, format!("coordinate {c} does not match raster point {k}")));
            }
        }
        let re = parse_finite(cols[d], lineno, &err)?;
        let im = parse_finite(cols[d + 1], lineno, &err)?;
        values.push(Complex::new(re, im));
    }
    if values.len() != raster.len() {
        return Err(Error::Dimension(format!(
            "{}: {} rows for a raster of {} points",
            path.display(),
            values.len(),
            raster.len()
        )));
    }
    SampleSet::new(raster, values, Provenance::File)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{jittered_grid, Raster};
    use proptest::prelude::*;

    fn pts2(points: &[[f64; 2]]) -> Raster {
        Raster::custom(2, points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn paper_fn_examples() {
        let r = pts2(&[[2.0, 1.0], [0.0, 0.0], [-2.0, -1.0]]);
        let s = analytic_coeffs(&Scene::PaperTestFn, &r).unwrap();
        assert!((s.values[0] - Complex::new(-0.25, 0.0)).norm() < 1e-15);
        assert!(s.values[1].norm() < 1e-15);
        assert!((s.values[2] - s.values[0].conj()).norm() < 1e-15);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let r = pts2(&[[2.0, 1.0], [0.3, -1.7], [5.25, 2.5]]);
        let a = analytic_coeffs(&Scene::PaperTestFn, &r).unwrap();
        let q = quadrature_coeffs(&Scene::PaperTestFn, &r, 256).unwrap();
        for (x, y) in a.values.iter().zip(&q.values) {
            assert!((x - y).norm() < 1e-10);
        }
        assert!(!q.under_resolved);
        assert!(quadrature_coeffs(&Scene::PaperTestFn, &r, 8).unwrap().under_resolved);
    }

    #[test]
    fn zero_and_constant_scenes() {
        let r = pts2(&[[1.0, 0.0], [2.0, -3.0], [0.0, 4.0]]);
        let zero = Scene::TrigPoly { terms: vec![] };
        assert!(quadrature_coeffs(&zero, &r, 64).unwrap().values.iter().all(|v| v.norm() == 0.0));
        let one = Scene::GridImage {
            size: vec![1, 1],
            pixels: vec![1.0],
        };
        for v in quadrature_coeffs(&one, &r, 64).unwrap().values {
            assert!(v.norm() < 1e-12);
        }
        assert!(analytic_coeffs(&one, &r).is_err());
    }

    #[test]
    fn trig_poly_integer_lookup() {
        let scene = Scene::TrigPoly {
            terms: vec![TrigTerm::new(vec![3], Complex::new(2.0, -1.0))],
        };
        let r = Raster::custom(1, vec![vec![3.0], vec![1.0]]).unwrap();
        let s = analytic_coeffs(&scene, &r).unwrap();
        assert_eq!(s.values[0], Complex::new(2.0, -1.0));
        assert!(s.values[1].norm() < 1e-15);
    }

    #[test]
    fn noise_examples() {
        let r = jittered_grid(&[5000], 0.25, 3).unwrap();
        let s = analytic_coeffs(&Scene::PaperTestFn, &r).unwrap();
        assert_eq!(add_noise(&s, f64::INFINITY, 1).unwrap(), s);
        let noisy = add_noise(&s, 0.0, 9).unwrap();
        assert_eq!(noisy, add_noise(&s, 0.0, 9).unwrap());
        let p_sig: f64 = s.values.iter().map(|v| v.norm_sqr()).sum();
        let p_noise: f64 = noisy.values.iter().zip(&s.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!((p_noise / p_sig - 1.0).abs() < 0.05, "{}", p_noise / p_sig);

        let zero = SampleSet::new(&r, vec![Complex::new(0.0, 0.0); r.len()], Provenance::Analytic).unwrap();
        assert!(add_noise(&zero, 10.0, 0).is_err());
        assert_eq!(add_noise(&zero, f64::INFINITY, 0).unwrap(), zero);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let r = jittered_grid(&[3, 2], 0.2, 1).unwrap();
        let s = analytic_coeffs(&Scene::PaperTestFn, &r).unwrap();
        let path = dir.path().join("s.csv");
        save_samples(&s, &r, "r.csv", &path).unwrap();
        assert_eq!(samples_raster_file(&path).unwrap(), "r.csv");
        let back = load_samples(&path, &r).unwrap();
        assert_eq!(back.values, s.values);
        assert_eq!(back.provenance, Provenance::File);
        let other = jittered_grid(&[3, 2], 0.2, 2).unwrap();
        assert!(load_samples(&path, &other).is_err());
    }

    proptest! {
        #[test]
        fn conjugate_symmetry(l1 in -20.0f64..20.0, l2 in -20.0f64..20.0) {
            prop_assume!(l1.abs() > 1e-6 || l2.abs() > 1e-6);
            let r = pts2(&[[l1, l2], [-l1, -l2]]);
            let s = analytic_coeffs(&Scene::PaperTestFn, &r).unwrap();
            prop_assert!((s.values[1] - s.values[0].conj()).norm() < 1e-10);
        }

        #[test]
        fn trig_poly_linearity(
            k1 in -6i64..6, k2 in -6i64..6,
            a in -3.0f64..3.0, b in -3.0f64..3.0,
            lam in -10.0f64..10.0,
        ) {
            let f = vec![TrigTerm::new(vec![k1], Complex::new(1.0, 0.5))];
            let g = vec![TrigTerm::new(vec![k2], Complex::new(-0.25, 2.0))];
            let combo: Vec<TrigTerm> = f.iter().map(|t| TrigTerm::new(t.freq.clone(), t.coeff() * a))
                .chain(g.iter().map(|t| TrigTerm::new(t.freq.clone(), t.coeff() * b)))
                .collect();
            let r = Raster::custom(1, vec![vec![lam]]).unwrap();
            let cf = analytic_coeffs(&Scene::TrigPoly { terms: f }, &r).unwrap().values[0];
            let cg = analytic_coeffs(&Scene::TrigPoly { terms: g }, &r).unwrap().values[0];
            let cc = analytic_coeffs(&Scene::TrigPoly { terms: combo }, &r).unwrap().values[0];
            prop_assert!((cc - (cf * a + cg * b)).norm() <= 1e-12 * (1.0 + cc.norm()));
        }
    }
}
