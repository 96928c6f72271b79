use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ambient::AmbientRegion;
use super::chart::{ImmersionChart, V3};
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::quadrature::ksum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub boundary: f64,
    pub frame: f64,
    pub metric: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { boundary: 1e-9, frame: 1e-8, metric: 1e-12 }
    }
}

/// Which side the unit normal ν points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalOrientation {
    /// ν chosen so that the total mean curvature is non-negative.
    #[default]
    MeanCurvatureInward,
    /// ν = u_x × u_y / |u_x × u_y|.
    Parametric,
    /// ν = −u_x × u_y / |u_x × u_y|.
    Reversed,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleOptions {
    pub orientation: NormalOrientation,
    pub tolerances: Tolerances,
}

/// Pointwise data at one grid node.
#[derive(Debug, Clone, Copy)]
pub struct NodeGeometry {
    pub u: V3,
    pub ux: V3,
    pub uy: V3,
    pub uxx: V3,
    pub uxy: V3,
    pub uyy: V3,
    /// Induced metric `[g11, g12, g22]`.
    pub metric: [f64; 3],
    /// Area density `√det g`; equals `e^{2λ}` for conformal charts.
    pub e2l: f64,
    pub lambda: f64,
    pub nu: V3,
    pub nu_x: V3,
    pub nu_y: V3,
    /// `⟨u_{x_i x_j}, ν⟩` as `[b11, b12, b22]`.
    pub b: [f64; 3],
    /// `⟨A(e_i, e_j), ν⟩` with `e_i = e^{-λ} u_{x_i}`.
    pub a: [[f64; 2]; 2],
    pub h_sc: f64,
    /// `e^{-2λ} ⟨Δu, ν⟩`.
    pub h_laplacian: f64,
    pub a_norm2: f64,
}

impl NodeGeometry {
    pub fn metric_matrix(&self) -> Matrix2<f64> {
        let [g11, g12, g22] = self.metric;
        Matrix2::new(g11, g12, g12, g22)
    }

    pub fn inverse_metric(&self) -> Matrix2<f64> {
        let [g11, g12, g22] = self.metric;
        let det = g11 * g22 - g12 * g12;
        Matrix2::new(g22, -g12, -g12, g11) / det
    }

    /// Coordinates of a tangent vector in the basis `(u_x, u_y)`.
    pub fn tangent_coords(&self, x: &V3) -> Vector2<f64> {
        self.inverse_metric() * Vector2::new(x.dot(&self.ux), x.dot(&self.uy))
    }

    /// `⟨A(X, Y), ν⟩` for tangent `X, Y`.
    pub fn second_form(&self, x: &V3, y: &V3) -> f64 {
        let [b11, b12, b22] = self.b;
        let (p, q) = (self.tangent_coords(x), self.tangent_coords(y));
        p[0] * (b11 * q[0] + b12 * q[1]) + p[1] * (b12 * q[0] + b22 * q[1])
    }

    /// Tangential projection.
    pub fn tangential(&self, x: &V3) -> V3 {
        x - self.nu * x.dot(&self.nu)
    }
}

/// Frame and curvature data at one boundary node.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryGeometry {
    pub node: usize,
    /// +1 on an outer ring, −1 on an inner ring.
    pub ring_sign: f64,
    pub gamma_dot: V3,
    pub n: V3,
    pub nu_hat: V3,
    pub big_n: V3,
    pub alpha: f64,
    pub cos_alpha: f64,
    pub sin_alpha: f64,
    /// `⟨A(n,n),ν⟩`, `⟨A(γ̇,γ̇),ν⟩`, `⟨A(γ̇,n),ν⟩`.
    pub a_nn: f64,
    pub a_tt: f64,
    pub a_tn: f64,
    /// `⟨A^{∂M}(ν̂,ν̂),N⟩`, `⟨A^{∂M}(γ̇,γ̇),N⟩`, `⟨A^{∂M}(γ̇,ν̂),N⟩`.
    pub am_nn: f64,
    pub am_tt: f64,
    pub am_tn: f64,
    /// Arc-length quadrature weight `|u_φ| dφ`.
    pub ds: f64,
    /// `sign⟨u_φ, γ̇⟩`: +1 when γ̇ runs with increasing φ.
    pub tau_sign: f64,
}

impl BoundaryGeometry {
    /// `⟨A^{∂M}(X, Y), N⟩` from the stored frame values, for `X, Y ∈ T∂M`.
    pub fn ambient_form(&self, x: &V3, y: &V3) -> f64 {
        let (x1, x2) = (x.dot(&self.gamma_dot), x.dot(&self.nu_hat));
        let (y1, y2) = (y.dot(&self.gamma_dot), y.dot(&self.nu_hat));
        x1 * y1 * self.am_tt + (x1 * y2 + x2 * y1) * self.am_tn + x2 * y2 * self.am_nn
    }
}

#[derive(Debug, Clone)]
pub struct GeometryField {
    pub grid: Grid,
    pub chart: ImmersionChart,
    pub ambient: AmbientRegion,
    pub options: SampleOptions,
    /// `sign⟨u_x × u_y, ν⟩`.
    pub orientation: f64,
    pub nodes: Vec<NodeGeometry>,
    pub boundary: Vec<BoundaryGeometry>,
    /// Sup over the boundary of the largest |eigenvalue| of `A^{∂M}`.
    pub b_sup: f64,
    /// Ambient curvature constant; zero in flat space.
    pub j: f64,
    /// `max |⟨u_z,u_z⟩| / e^{2λ}`.
    pub conformality_residual: f64,
    /// `max |H_sc − e^{-2λ}⟨Δu,ν⟩|`.
    pub mean_curvature_residual: f64,
    /// `max |Φ(u)|` over boundary nodes.
    pub boundary_residual: f64,
    /// Largest deviation in the boundary frame identities.
    pub frame_residual: f64,
}

fn unit(v: V3) -> V3 {
    v / v.norm()
}

/// Pointwise geometry of `chart` at parameter `(x, y)`; `sign` multiplies
/// the parametric normal.
pub fn point_geometry(chart: &ImmersionChart, x: f64, y: f64, sign: f64) -> NodeGeometry {
    let s = chart.sample(x, y);
    let metric = [s.ux.dot(&s.ux), s.ux.dot(&s.uy), s.uy.dot(&s.uy)];
    let cross = s.ux.cross(&s.uy);
    let e2l = cross.norm();
    let nu = cross * (sign / e2l);
    let b = [s.uxx.dot(&nu), s.uxy.dot(&nu), s.uyy.dot(&nu)];
    let ginv = Matrix2::new(metric[2], -metric[1], -metric[1], metric[0]) / (e2l * e2l);
    let shape = ginv * Matrix2::new(b[0], b[1], b[1], b[2]);
    let nu_x = -(s.ux * shape[(0, 0)] + s.uy * shape[(1, 0)]);
    let nu_y = -(s.ux * shape[(0, 1)] + s.uy * shape[(1, 1)]);
    let a = [[b[0] / e2l, b[1] / e2l], [b[1] / e2l, b[2] / e2l]];
    NodeGeometry {
        u: s.u,
        ux: s.ux,
        uy: s.uy,
        uxx: s.uxx,
        uxy: s.uxy,
        uyy: s.uyy,
        metric,
        e2l,
        lambda: 0.5 * e2l.ln(),
        nu,
        nu_x,
        nu_y,
        b,
        a,
        h_sc: shape.trace(),
        h_laplacian: (s.uxx + s.uyy).dot(&nu) / e2l,
        a_norm2: (shape * shape).trace(),
    }
}

/// Sample a chart on a grid with the default orientation and tolerances.
pub fn sample_geometry(
    chart: &ImmersionChart,
    grid: &Grid,
    ambient: &AmbientRegion,
) -> Result<GeometryField> {
    sample_geometry_with(chart, grid, ambient, SampleOptions::default())
}

pub fn sample_geometry_with(
    chart: &ImmersionChart,
    grid: &Grid,
    ambient: &AmbientRegion,
    options: SampleOptions,
) -> Result<GeometryField> {
    let tol = options.tolerances;
    if ambient.has_boundary() {
        let mut worst = (0usize, 0.0f64);
        for (node, _) in grid.boundary_nodes() {
            let [x, y] = grid.coords[node];
            let r = ambient.level(&chart.position(x, y)).abs();
            if r > worst.1 {
                worst = (node, r);
            }
        }
        if worst.1 > tol.boundary {
            return Err(Error::BoundaryOffAmbient { node: worst.0, residual: worst.1 });
        }
    }

    let parametric: Vec<NodeGeometry> = grid
        .coords
        .par_iter()
        .map(|&[x, y]| point_geometry(chart, x, y, 1.0))
        .collect();
    for (i, g) in parametric.iter().enumerate() {
        if !(g.e2l >= tol.metric) {
            return Err(Error::DegenerateMetric { node: i, value: g.e2l });
        }
    }
    let sign = match options.orientation {
        NormalOrientation::Parametric => 1.0,
        NormalOrientation::Reversed => -1.0,
        NormalOrientation::MeanCurvatureInward => {
            let total = ksum(parametric.iter().zip(&grid.weights).map(|(g, w)| g.h_sc * g.e2l * w));
            let area = ksum(parametric.iter().zip(&grid.weights).map(|(g, w)| g.e2l * w));
            if total < -1e-12 * area {
                -1.0
            } else {
                1.0
            }
        }
    };
    let nodes: Vec<NodeGeometry> = if sign > 0.0 {
        parametric
    } else {
        grid.coords.par_iter().map(|&[x, y]| point_geometry(chart, x, y, -1.0)).collect()
    };

    let conformality_residual = nodes
        .iter()
        .map(|g| {
            let [g11, g12, g22] = g.metric;
            0.25 * ((g11 - g22).powi(2) + 4.0 * g12 * g12).sqrt() / g.e2l
        })
        .fold(0.0, f64::max);
    let mean_curvature_residual =
        nodes.iter().map(|g| (g.h_sc - g.h_laplacian).abs()).fold(0.0, f64::max);

    let mut boundary = Vec::new();
    let mut frame_residual = 0.0f64;
    let mut boundary_residual = 0.0f64;
    let mut b_sup = 0.0f64;
    for (node, ring_sign) in grid.boundary_nodes() {
        let g = &nodes[node];
        let [x, y] = grid.coords[node];
        let u_phi = g.uy * x - g.ux * y;
        let t = unit(u_phi);
        let u_r = (g.ux * x + g.uy * y) * ring_sign;
        let n = unit(u_r - t * u_r.dot(&t));
        let gamma_dot = n.cross(&g.nu);
        let tau_sign = u_phi.dot(&gamma_dot).signum();
        let ds = u_phi.norm() * grid.dphi();
        let a_nn = g.second_form(&n, &n);
        let a_tt = g.second_form(&gamma_dot, &gamma_dot);
        let a_tn = g.second_form(&gamma_dot, &n);

        let mut frame_err = (g.nu.norm() - 1.0)
            .abs()
            .max(g.nu.dot(&g.ux).abs() / g.ux.norm())
            .max(g.nu.dot(&g.uy).abs() / g.uy.norm())
            .max((gamma_dot.cross(&n) - g.nu).norm());
        let (big_n, nu_hat, cos_alpha, sin_alpha, am) = if ambient.has_boundary() {
            boundary_residual = boundary_residual.max(ambient.level(&g.u).abs());
            let big_n = ambient.normal(&g.u);
            let raw = big_n.cross(&gamma_dot);
            frame_err = frame_err.max((raw.norm() - 1.0).abs());
            let nu_hat = unit(raw);
            let det = gamma_dot.dot(&nu_hat.cross(&big_n));
            frame_err = frame_err.max((det - 1.0).abs());
            let cos_alpha = nu_hat.dot(&n);
            if cos_alpha.abs() > 1.0 + tol.frame {
                return Err(Error::FrameInconsistency { node, value: cos_alpha });
            }
            let sin_alpha = n.dot(&big_n);
            let am = [
                ambient.second_fundamental_form(&g.u, &nu_hat, &nu_hat),
                ambient.second_fundamental_form(&g.u, &gamma_dot, &gamma_dot),
                ambient.second_fundamental_form(&g.u, &gamma_dot, &nu_hat),
            ];
            let (p, q, r) = (am[1], am[0], am[2]);
            let eig = 0.5 * (p + q).abs() + (0.25 * (p - q).powi(2) + r * r).sqrt();
            b_sup = b_sup.max(eig);
            (big_n, nu_hat, cos_alpha.clamp(-1.0, 1.0), sin_alpha, am)
        } else {
            (V3::zeros(), V3::zeros(), f64::NAN, f64::NAN, [0.0; 3])
        };
        if frame_err > tol.frame {
            return Err(Error::FrameOrientation {
                node,
                what: format!("boundary frame identity off by {frame_err:.3e}"),
            });
        }
        frame_residual = frame_residual.max(frame_err);
        boundary.push(BoundaryGeometry {
            node,
            ring_sign,
            gamma_dot,
            n,
            nu_hat,
            big_n,
            alpha: cos_alpha.acos(),
            cos_alpha,
            sin_alpha,
            a_nn,
            a_tt,
            a_tn,
            am_nn: am[0],
            am_tt: am[1],
            am_tn: am[2],
            ds,
            tau_sign,
        });
    }

    Ok(GeometryField {
        grid: grid.clone(),
        chart: chart.clone(),
        ambient: ambient.clone(),
        options,
        orientation: sign,
        nodes,
        boundary,
        b_sup,
        j: 0.0,
        conformality_residual,
        mean_curvature_residual,
        boundary_residual,
        frame_residual,
    })
}

impl GeometryField {
    /// `∫ f dΣ` with `f` given per node.
    /// Geometry at an arbitrary parameter point, with this field's normal.
    pub fn at(&self, x: f64, y: f64) -> NodeGeometry {
        point_geometry(&self.chart, x, y, self.orientation)
    }

    pub fn integrate(&self, f: impl Fn(usize, &NodeGeometry) -> f64) -> f64 {
        ksum(self.nodes.iter().enumerate().map(|(i, g)| f(i, g) * g.e2l * self.grid.weights[i]))
    }

    /// `∮ f dτ` over all boundary rings.
    pub fn integrate_boundary(&self, f: impl Fn(&BoundaryGeometry) -> f64) -> f64 {
        ksum(self.boundary.iter().map(|b| f(b) * b.ds))
    }

    pub fn area(&self) -> f64 {
        self.integrate(|_, _| 1.0)
    }

    pub fn boundary_length(&self) -> f64 {
        self.integrate_boundary(|_| 1.0)
    }

    /// Area-weighted mean of `H_sc`.
    pub fn mean_h(&self) -> f64 {
        self.integrate(|_, g| g.h_sc) / self.area()
    }
}

/// Contact angle α per boundary node, `cos α = ⟨ν̂, n⟩`.
pub fn contact_angle(geom: &GeometryField) -> Result<Vec<f64>> {
    if !geom.ambient.has_boundary() {
        return Err(Error::Precondition("contact angle needs an ambient boundary".into()));
    }
    Ok(geom.boundary.iter().map(|b| b.alpha).collect())
}

/// Max deviation of α from a configured θ.
pub fn contact_angle_deviation(geom: &GeometryField, theta: f64) -> Result<f64> {
    Ok(contact_angle(geom)?.iter().map(|a| (a - theta).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::{build_grid, GridSpec};
    use std::f64::consts::PI;

    fn cap(theta: f64) -> GeometryField {
        let grid = build_grid(&GridSpec::disk(24, 48)).unwrap();
        sample_geometry(
            &ImmersionChart::SphericalCap { theta_c: theta, radius: 1.0 },
            &grid,
            &AmbientRegion::half_space(),
        )
        .unwrap()
    }

    #[test]
    fn cap_area_curvature_and_angle() {
        let g = cap(PI / 3.0);
        assert!((g.area() - PI).abs() < 1e-10);
        for n in &g.nodes {
            assert!((n.a_norm2 - 2.0).abs() < 1e-10);
            assert!((n.h_sc - 2.0).abs() < 1e-10);
        }
        assert_eq!(g.b_sup, 0.0);
        assert!(contact_angle_deviation(&g, PI / 3.0).unwrap() < 1e-8);
        assert!(g.conformality_residual < 1e-10);
        assert!((g.boundary_length() - 2.0 * PI * (PI / 3.0).sin()).abs() < 1e-10);
    }

    #[test]
    fn cap_shallow_angle() {
        let g = cap(PI / 6.0);
        assert!(contact_angle_deviation(&g, PI / 6.0).unwrap() < 1e-8);
    }

    #[test]
    fn disk_in_cylinder() {
        let grid = build_grid(&GridSpec::disk(12, 32)).unwrap();
        let g = sample_geometry(
            &ImmersionChart::FlatDisk { radius: 1.0, height: 0.0 },
            &grid,
            &AmbientRegion::SolidCylinder { radius: 1.0 },
        )
        .unwrap();
        assert!(g.nodes.iter().all(|n| n.h_sc.abs() < 1e-14));
        for b in &g.boundary {
            assert!((b.alpha - PI / 2.0).abs() < 1e-12);
            assert!((b.am_tt + 1.0).abs() < 1e-12);
            assert!(b.am_nn.abs() < 1e-12);
        }
        assert!((g.b_sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disk_off_boundary_is_rejected() {
        let grid = build_grid(&GridSpec::disk(8, 16)).unwrap();
        let err = sample_geometry(
            &ImmersionChart::FlatDisk { radius: 1.0, height: 0.0 },
            &grid,
            &AmbientRegion::HalfSpace { height: 1.0, rho_max: 10.0 },
        )
        .unwrap_err();
        assert!(err.to_string().contains("boundary node off"));
    }

    #[test]
    fn orientation_override_flips_sign() {
        let grid = build_grid(&GridSpec::disk(8, 16)).unwrap();
        let chart = ImmersionChart::SphericalCap { theta_c: PI / 3.0, radius: 1.0 };
        let amb = AmbientRegion::half_space();
        let opts = |o| SampleOptions { orientation: o, ..Default::default() };
        let p = sample_geometry_with(&chart, &grid, &amb, opts(NormalOrientation::Parametric)).unwrap();
        let r = sample_geometry_with(&chart, &grid, &amb, opts(NormalOrientation::Reversed)).unwrap();
        assert!((p.mean_h() + r.mean_h()).abs() < 1e-12);
        assert!(cap(PI / 3.0).mean_h() > 0.0);
    }
}
