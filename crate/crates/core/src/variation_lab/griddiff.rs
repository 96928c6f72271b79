//! Differentiation of nodal values on a polar tensor grid: spectral in φ,
//! Lagrange polynomial in r.

use nalgebra::DMatrix;

use crate::geometry::{Grid, RadialRule};

/// Differentiation matrices for one grid.
#[derive(Debug, Clone)]
pub struct GridDiff {
    /// `n_r × n_r`, acts on values along one ray.
    pub dr: DMatrix<f64>,
    /// `n_φ × n_φ`, acts on values around one ring.
    pub dphi: DMatrix<f64>,
}

/// Lagrange differentiation matrix on arbitrary distinct nodes, using
/// barycentric weights.
pub fn lagrange_diff_matrix(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let w: Vec<f64> = (0..n)
        .map(|j| 1.0 / (0..n).filter(|&k| k != j).map(|k| x[j] - x[k]).product::<f64>())
        .collect();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = w[j] / w[i] / (x[i] - x[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        d[(i, i)] = diag;
    }
    d
}

/// Local Lagrange differentiation with a sliding stencil of `width` nodes.
pub fn local_diff_matrix(x: &[f64], width: usize) -> DMatrix<f64> {
    let n = x.len();
    let width = width.min(n);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let start = i.saturating_sub(width / 2).min(n - width);
        let local = lagrange_diff_matrix(&x[start..start + width]);
        for j in 0..width {
            d[(i, start + j)] = local[(i - start, j)];
        }
    }
    d
}

/// Periodic spectral differentiation on `n` equispaced points of `[0, 2π)`.
pub fn periodic_diff_matrix(n: usize) -> DMatrix<f64> {
    let h = std::f64::consts::TAU / n as f64;
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let k = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            d[(i, j)] = if n % 2 == 0 {
                0.5 * sign / (0.5 * k * h).tan()
            } else {
                0.5 * sign / (0.5 * k * h).sin()
            };
        }
    }
    d
}

impl GridDiff {
    pub fn new(grid: &Grid) -> Self {
        let dr = match grid.spec.radial_rule {
            RadialRule::Spectral => lagrange_diff_matrix(&grid.radii),
            RadialRule::Uniform => local_diff_matrix(&grid.radii, 7),
        };
        GridDiff { dr, dphi: periodic_diff_matrix(grid.n_phi()) }
    }

    /// `(∂_r f, ∂_φ f)` per node.
    pub fn polar(&self, grid: &Grid, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (nr, np) = (grid.n_r(), grid.n_phi());
        let mut fr = vec![0.0; f.len()];
        let mut fp = vec![0.0; f.len()];
        for j in 0..nr {
            for k in 0..np {
                let mut a = 0.0;
                for m in 0..nr {
                    a += self.dr[(j, m)] * f[m * np + k];
                }
                fr[j * np + k] = a;
                let mut b = 0.0;
                for m in 0..np {
                    b += self.dphi[(k, m)] * f[j * np + m];
                }
                fp[j * np + k] = b;
            }
        }
        (fr, fp)
    }

    /// `(∂_x f, ∂_y f)` per node.
    pub fn cartesian(&self, grid: &Grid, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (fr, fp) = self.polar(grid, f);
        let mut fx = vec![0.0; f.len()];
        let mut fy = vec![0.0; f.len()];
        for (i, &[x, y]) in grid.coords.iter().enumerate() {
            let r = x.hypot(y);
            let (c, s) = (x / r, y / r);
            fx[i] = c * fr[i] - s * fp[i] / r;
            fy[i] = s * fr[i] + c * fp[i] / r;
        }
        (fx, fy)
    }
}

/// Convenience wrapper building the matrices once.
pub fn gradient_xy(grid: &Grid, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    GridDiff::new(grid).cartesian(grid, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, GridSpec};

    #[test]
    fn differentiates_smooth_function() {
        for spec in [GridSpec::disk(16, 32), GridSpec::disk(16, 32).with_r0(0.05), GridSpec::annulus(12, 32, 0.4)] {
            let grid = build_grid(&spec).unwrap();
            let f: Vec<f64> = grid.coords.iter().map(|&[x, y]| (x * y).sin() + x * x * x).collect();
            let (fx, fy) = gradient_xy(&grid, &f);
            for (i, &[x, y]) in grid.coords.iter().enumerate() {
                assert!((fx[i] - (y * (x * y).cos() + 3.0 * x * x)).abs() < 1e-9);
                assert!((fy[i] - x * (x * y).cos()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn odd_periodic_matrix() {
        let d = periodic_diff_matrix(9);
        let h = std::f64::consts::TAU / 9.0;
        let f: Vec<f64> = (0..9).map(|k| (2.0 * k as f64 * h).sin()).collect();
        for i in 0..9 {
            let v: f64 = (0..9).map(|j| d[(i, j)] * f[j]).sum();
            assert!((v - 2.0 * (2.0 * i as f64 * h).cos()).abs() < 1e-12);
        }
    }
}
