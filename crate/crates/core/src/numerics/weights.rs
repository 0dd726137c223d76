use std::collections::HashMap;

use crate::raster::{Raster, RasterKind};

/// Density-compensation weights for convolutional gridding.
///
/// * 1-D: trapezoid-type weights on the sorted raster, `(λ_{n+1} - λ_{n-1})/2`
///   in the interior and the one-sided gap at the two ends.
/// * 2-D grid-indexed rasters: product over axes of the same rule applied to
///   each point's neighbours along that axis.
/// * 2-D unstructured rasters: each unit cell of the integer lattice (points
///   rounded to the nearest lattice site) has area 1, shared equally among the
///   points that fall in it.
pub fn density_weights(raster: &Raster) -> Vec<f64> {
    match (raster.dim(), raster.kind(), raster.extents()) {
        (1, _, _) => weights_1d(&raster.axis(0)),
        (2, RasterKind::JitteredGrid, Some(ext)) => {
            let (n1, n2) = (ext[0].len(), ext[1].len());
            let at = |i: usize, j: usize, a: usize| raster.point(i * n2 + j)[a];
            let mut w = vec![1.0; raster.len()];
            for i in 0..n1 {
                let line: Vec<f64> = (0..n2).map(|j| at(i, j, 1)).collect();
                for (j, v) in weights_ordered(&line).into_iter().enumerate() {
                    w[i * n2 + j] *= v;
                }
            }
            for j in 0..n2 {
                let line: Vec<f64> = (0..n1).map(|i| at(i, j, 0)).collect();
                for (i, v) in weights_ordered(&line).into_iter().enumerate() {
                    w[i * n2 + j] *= v;
                }
            }
            w
        }
        _ => {
            let cell = |p: &[f64]| (p[0].round() as i64, p[1].round() as i64);
            let mut counts: HashMap<(i64, i64), usize> = HashMap::new();
            for p in raster.points() {
                *counts.entry(cell(p)).or_default() += 1;
            }
            raster.points().map(|p| 1.0 / counts[&cell(p)] as f64).collect()
        }
    }
}

fn weights_1d(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let ws = weights_ordered(&sorted);
    let mut out = vec![0.0; xs.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = ws[k];
    }
    out
}

// weights for increasing positions
fn weights_ordered(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    match n {
        0 => vec![],
        1 => vec![1.0],
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    x[1] - x[0]
                } else if i == n - 1 {
                    x[n - 1] - x[n - 2]
                } else {
                    0.5 * (x[i + 1] - x[i - 1])
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{asterisk, jittered_grid};

    #[test]
    fn uniform_is_unit() {
        let r = jittered_grid(&[5], 0.0, 0).unwrap();
        assert!(density_weights(&r).iter().all(|&w| w == 1.0));
        let r = jittered_grid(&[3, 2], 0.0, 0).unwrap();
        assert!(density_weights(&r).iter().all(|&w| w == 1.0));
    }

    #[test]
    fn trapezoid_arithmetic() {
        let r = Raster::custom(1, vec![vec![3.0], vec![0.0], vec![1.0]]).unwrap();
        // interior point gets the half-gap sum; ends get their one-sided gap
        assert_eq!(density_weights(&r), vec![2.0, 1.0, 1.5]);
    }

    #[test]
    fn jittered_bounds() {
        for seed in 0..5 {
            let r = jittered_grid(&[10], 0.25, seed).unwrap();
            assert!(density_weights(&r).iter().all(|&w| (0.5..=1.5).contains(&w)));
            let r = jittered_grid(&[4, 4], 0.25, seed).unwrap();
            assert!(density_weights(&r).iter().all(|&w| (0.25..=2.25).contains(&w)));
        }
    }

    #[test]
    fn unstructured_shares_cells() {
        let r = asterisk(4, 2, 1.0).unwrap();
        let w = density_weights(&r);
        assert_eq!(w.len(), r.len());
        // total mass equals the number of occupied cells
        let total: f64 = w.iter().sum();
        assert!((total - total.round()).abs() < 1e-12);
    }
}
