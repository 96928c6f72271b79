use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::jet::Jet;

pub type V3 = Vector3<f64>;

/// Analytic immersion of the parameter domain into ℝ³.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ImmersionChart {
    /// Cap of a sphere of `radius` centred on the axis below the plane
    /// `z = 0`, meeting it at angle `theta_c`; inverse stereographic
    /// parametrization, so conformal.
    SphericalCap {
        theta_c: f64,
        #[serde(default = "one")]
        radius: f64,
    },
    /// `(R x, R y, height)`.
    FlatDisk {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        height: f64,
    },
    /// Graph `(x, y, Σ c x^i y^j)`; not conformal.
    GraphPerturbation { terms: Vec<(u32, u32, f64)> },
    /// `(a x, b y, 0)`; conformal only when `|a| = |b|`.
    LinearMap { a: f64, b: f64 },
    /// Cylinder `R (x/r, y/r, ln r)` over an annulus; conformal.
    CylinderBridge {
        #[serde(default = "one")]
        radius: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// Position and parameter derivatives up to order two at one point.
#[derive(Debug, Clone, Copy)]
pub struct ChartSample {
    pub u: V3,
    pub ux: V3,
    pub uy: V3,
    pub uxx: V3,
    pub uxy: V3,
    pub uyy: V3,
}

impl ImmersionChart {
    pub fn name(&self) -> &'static str {
        match self {
            ImmersionChart::SphericalCap { .. } => "spherical-cap",
            ImmersionChart::FlatDisk { .. } => "flat-disk",
            ImmersionChart::GraphPerturbation { .. } => "graph-perturbation",
            ImmersionChart::LinearMap { .. } => "linear-map",
            ImmersionChart::CylinderBridge { .. } => "cylinder-bridge",
        }
    }

    pub fn is_conformal(&self) -> bool {
        match self {
            ImmersionChart::SphericalCap { .. }
            | ImmersionChart::FlatDisk { .. }
            | ImmersionChart::CylinderBridge { .. } => true,
            ImmersionChart::GraphPerturbation { terms } => terms.is_empty(),
            ImmersionChart::LinearMap { a, b } => (a.abs() - b.abs()).abs() < 1e-15,
        }
    }

    /// Characteristic length used to scale finite-difference steps.
    pub fn scale(&self) -> f64 {
        match self {
            ImmersionChart::SphericalCap { radius, .. }
            | ImmersionChart::FlatDisk { radius, .. }
            | ImmersionChart::CylinderBridge { radius } => *radius,
            ImmersionChart::GraphPerturbation { .. } => 1.0,
            ImmersionChart::LinearMap { a, b } => a.abs().max(b.abs()),
        }
    }

    pub fn eval_jet(&self, x: f64, y: f64) -> [Jet; 3] {
        let (x, y) = (Jet::var_x(x), Jet::var_y(y));
        match *self {
            ImmersionChart::SphericalCap { theta_c, radius } => {
                let k = (0.5 * theta_c).tan();
                let (a, b) = (x * k, y * k);
                let q = a * a + b * b + 1.0;
                let qi = q.recip();
                [
                    (a * 2.0 * qi) * radius,
                    (b * 2.0 * qi) * radius,
                    (qi * 2.0 - 1.0 - theta_c.cos()) * radius,
                ]
            }
            ImmersionChart::FlatDisk { radius, height } => {
                [x * radius, y * radius, Jet::constant(height)]
            }
            ImmersionChart::GraphPerturbation { ref terms } => {
                let mut z = Jet::constant(0.0);
                for &(i, j, c) in terms {
                    z = z + x.powi(i as i32) * y.powi(j as i32) * c;
                }
                [x, y, z]
            }
            ImmersionChart::LinearMap { a, b } => [x * a, y * b, Jet::constant(0.0)],
            ImmersionChart::CylinderBridge { radius } => {
                let r2 = x * x + y * y;
                let r = r2.sqrt();
                [x / r * radius, y / r * radius, r2.ln() * (0.5 * radius)]
            }
        }
    }

    pub fn sample(&self, x: f64, y: f64) -> ChartSample {
        let j = self.eval_jet(x, y);
        let pick = |f: fn(&Jet) -> f64| V3::new(f(&j[0]), f(&j[1]), f(&j[2]));
        ChartSample {
            u: pick(|j| j.v),
            ux: pick(|j| j.dx),
            uy: pick(|j| j.dy),
            uxx: pick(|j| j.dxx),
            uxy: pick(|j| j.dxy),
            uyy: pick(|j| j.dyy),
        }
    }

    pub fn position(&self, x: f64, y: f64) -> V3 {
        self.sample(x, y).u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn charts() -> Vec<(ImmersionChart, f64, f64)> {
        vec![
            (ImmersionChart::SphericalCap { theta_c: 1.0, radius: 1.0 }, 0.3, -0.5),
            (ImmersionChart::FlatDisk { radius: 2.0, height: 0.5 }, 0.1, 0.2),
            (ImmersionChart::GraphPerturbation { terms: vec![(2, 1, 0.3), (0, 3, -0.2)] }, 0.4, 0.6),
            (ImmersionChart::LinearMap { a: 2.0, b: 1.0 }, 0.4, 0.6),
            (ImmersionChart::CylinderBridge { radius: 1.5 }, 0.5, 0.45),
        ]
    }

    #[test]
    fn derivatives_agree_with_fourth_order_differences() {
        let h = 1e-3;
        for (c, x, y) in charts() {
            let s = c.sample(x, y);
            let d = |f: &dyn Fn(f64) -> V3| {
                (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
            };
            let ux = d(&|t| c.position(x + t, y));
            let uy = d(&|t| c.position(x, y + t));
            let uxx = d(&|t| c.sample(x + t, y).ux);
            let uxy = d(&|t| c.sample(x, y + t).ux);
            let uyy = d(&|t| c.sample(x, y + t).uy);
            for (a, b) in [(s.ux, ux), (s.uy, uy), (s.uxx, uxx), (s.uxy, uxy), (s.uyy, uyy)] {
                assert!((a - b).norm() < 1e-9, "{}: {a} vs {b}", c.name());
            }
        }
    }

    #[test]
    fn cap_boundary_lies_on_plane_at_contact_radius() {
        let theta: f64 = std::f64::consts::FRAC_PI_3;
        let c = ImmersionChart::SphericalCap { theta_c: theta, radius: 1.0 };
        let p = c.position(0.6, 0.8);
        assert!(p.z.abs() < 1e-15);
        assert!((p.xy().norm() - theta.sin()).abs() < 1e-15);
        assert!((c.position(0.0, 0.0).z - (1.0 - theta.cos())).abs() < 1e-15);
    }

    #[test]
    fn conformal_charts_have_isotropic_metric() {
        for (c, x, y) in charts() {
            let s = c.sample(x, y);
            let defect = (s.ux.norm_squared() - s.uy.norm_squared()).abs() + s.ux.dot(&s.uy).abs();
            assert_eq!(c.is_conformal(), defect < 1e-12, "{}", c.name());
        }
    }
}
