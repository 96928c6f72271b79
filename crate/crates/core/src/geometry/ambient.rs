use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::chart::V3;

pub const DEFAULT_RHO_MAX: f64 = 10.0;

/// Flat ambient region `M = {Φ ≤ 0}` with boundary `∂M = {Φ = 0}`.
///
/// Each level-set function is normalised so that `|∇Φ| = 1` on `∂M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "kebab-case")]
pub enum AmbientRegion {
    /// `{z ≥ height}`; outward normal `-e₃`.
    HalfSpace {
        #[serde(default)]
        height: f64,
        #[serde(default = "rho_max")]
        rho_max: f64,
    },
    /// Ball of `radius` about the origin.
    UnitBall {
        #[serde(default = "one")]
        radius: f64,
    },
    /// `{x² + y² ≤ R²}`.
    SolidCylinder {
        #[serde(default = "one")]
        radius: f64,
    },
    /// `{lower ≤ z ≤ upper}`.
    Slab { lower: f64, upper: f64 },
    /// All of ℝ³; no boundary data is produced.
    FreeSpace,
}

fn one() -> f64 {
    1.0
}

fn rho_max() -> f64 {
    DEFAULT_RHO_MAX
}

fn e3() -> V3 {
    V3::new(0.0, 0.0, 1.0)
}

impl AmbientRegion {
    pub fn half_space() -> Self {
        AmbientRegion::HalfSpace { height: 0.0, rho_max: DEFAULT_RHO_MAX }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AmbientRegion::HalfSpace { .. } => "half-space",
            AmbientRegion::UnitBall { .. } => "unit-ball",
            AmbientRegion::SolidCylinder { .. } => "solid-cylinder",
            AmbientRegion::Slab { .. } => "slab",
            AmbientRegion::FreeSpace => "free-space",
        }
    }

    pub fn has_boundary(&self) -> bool {
        !matches!(self, AmbientRegion::FreeSpace)
    }

    pub fn level(&self, p: &V3) -> f64 {
        match *self {
            AmbientRegion::HalfSpace { height, .. } => height - p.z,
            AmbientRegion::UnitBall { radius } => (p.norm_squared() - radius * radius) / (2.0 * radius),
            AmbientRegion::SolidCylinder { radius } => {
                (p.x * p.x + p.y * p.y - radius * radius) / (2.0 * radius)
            }
            AmbientRegion::Slab { lower, upper } => {
                let (m, w) = (0.5 * (lower + upper), 0.5 * (upper - lower));
                ((p.z - m).powi(2) - w * w) / (2.0 * w)
            }
            AmbientRegion::FreeSpace => -1.0,
        }
    }

    pub fn gradient(&self, p: &V3) -> V3 {
        match *self {
            AmbientRegion::HalfSpace { .. } => -e3(),
            AmbientRegion::UnitBall { radius } => p / radius,
            AmbientRegion::SolidCylinder { radius } => V3::new(p.x, p.y, 0.0) / radius,
            AmbientRegion::Slab { lower, upper } => {
                let (m, w) = (0.5 * (lower + upper), 0.5 * (upper - lower));
                e3() * ((p.z - m) / w)
            }
            AmbientRegion::FreeSpace => V3::zeros(),
        }
    }

    pub fn hessian(&self, _p: &V3) -> Matrix3<f64> {
        match *self {
            AmbientRegion::HalfSpace { .. } | AmbientRegion::FreeSpace => Matrix3::zeros(),
            AmbientRegion::UnitBall { radius } => Matrix3::identity() / radius,
            AmbientRegion::SolidCylinder { radius } => {
                Matrix3::from_diagonal(&V3::new(1.0, 1.0, 0.0)) / radius
            }
            AmbientRegion::Slab { lower, upper } => {
                Matrix3::from_diagonal(&V3::new(0.0, 0.0, 2.0 / (upper - lower)))
            }
        }
    }

    /// Outward unit normal `N = ∇Φ / |∇Φ|`.
    pub fn normal(&self, p: &V3) -> V3 {
        let g = self.gradient(p);
        let n = g.norm();
        if n > 0.0 {
            g / n
        } else {
            g
        }
    }

    /// `⟨A^{∂M}(X, Y), N⟩ = ⟨∇_X Y, N⟩` for `X, Y` tangent to `∂M` at `p`.
    pub fn second_fundamental_form(&self, p: &V3, x: &V3, y: &V3) -> f64 {
        -(x.transpose() * self.hessian(p) * y)[0] / self.gradient(p).norm()
    }

    /// Focal radius; `None` when unbounded.
    pub fn focal_radius(&self) -> Option<f64> {
        match *self {
            AmbientRegion::HalfSpace { .. } | AmbientRegion::FreeSpace => None,
            AmbientRegion::UnitBall { radius } | AmbientRegion::SolidCylinder { radius } => {
                Some(radius)
            }
            AmbientRegion::Slab { lower, upper } => Some(0.5 * (upper - lower)),
        }
    }

    /// Focal radius with unbounded regions capped at their `rho_max`.
    pub fn rho(&self) -> f64 {
        match *self {
            AmbientRegion::HalfSpace { rho_max, .. } => rho_max,
            AmbientRegion::FreeSpace => DEFAULT_RHO_MAX,
            _ => self.focal_radius().unwrap(),
        }
    }

    /// Sup over `∂M` of the largest |principal curvature|.
    pub fn boundary_curvature_bound(&self) -> f64 {
        match *self {
            AmbientRegion::UnitBall { radius } | AmbientRegion::SolidCylinder { radius } => {
                1.0 / radius
            }
            _ => 0.0,
        }
    }

    /// Distance from an interior point to `∂M` (negative outside).
    pub fn depth(&self, p: &V3) -> f64 {
        match *self {
            AmbientRegion::HalfSpace { height, .. } => p.z - height,
            AmbientRegion::UnitBall { radius } => radius - p.norm(),
            AmbientRegion::SolidCylinder { radius } => radius - p.xy().norm(),
            AmbientRegion::Slab { lower, upper } => (p.z - lower).min(upper - p.z),
            AmbientRegion::FreeSpace => f64::INFINITY,
        }
    }

    /// Nearest-point retraction onto `∂M`.
    pub fn project(&self, p: &V3) -> V3 {
        match *self {
            AmbientRegion::HalfSpace { height, .. } => V3::new(p.x, p.y, height),
            AmbientRegion::UnitBall { radius } => p * (radius / p.norm()),
            AmbientRegion::SolidCylinder { radius } => {
                let s = radius / p.xy().norm();
                V3::new(p.x * s, p.y * s, p.z)
            }
            AmbientRegion::Slab { lower, upper } => {
                let z = if (p.z - lower).abs() <= (upper - p.z).abs() { lower } else { upper };
                V3::new(p.x, p.y, z)
            }
            AmbientRegion::FreeSpace => *p,
        }
    }

    /// Jacobian of [`Self::project`] at `p`.
    pub fn project_jacobian(&self, p: &V3) -> Matrix3<f64> {
        match *self {
            AmbientRegion::HalfSpace { .. } | AmbientRegion::Slab { .. } => {
                Matrix3::from_diagonal(&V3::new(1.0, 1.0, 0.0))
            }
            AmbientRegion::UnitBall { radius } => {
                let r = p.norm();
                let q = p / r;
                (Matrix3::identity() - q * q.transpose()) * (radius / r)
            }
            AmbientRegion::SolidCylinder { radius } => {
                let r = p.xy().norm();
                let q = V3::new(p.x / r, p.y / r, 0.0);
                let mut m = (Matrix3::from_diagonal(&V3::new(1.0, 1.0, 0.0)) - q * q.transpose())
                    * (radius / r);
                m[(2, 2)] = 1.0;
                m
            }
            AmbientRegion::FreeSpace => Matrix3::identity(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regions() -> Vec<(AmbientRegion, V3)> {
        vec![
            (AmbientRegion::half_space(), V3::new(0.3, -0.2, 0.0)),
            (AmbientRegion::UnitBall { radius: 1.0 }, V3::new(0.6, 0.0, 0.8)),
            (AmbientRegion::SolidCylinder { radius: 2.0 }, V3::new(0.0, 2.0, 0.7)),
            (AmbientRegion::Slab { lower: -1.0, upper: 0.5 }, V3::new(1.0, 1.0, 0.5)),
        ]
    }

    #[test]
    fn unit_normal_and_level_on_boundary() {
        for (r, p) in regions() {
            assert!(r.level(&p).abs() < 1e-15, "{}", r.name());
            assert!((r.normal(&p).norm() - 1.0).abs() < 1e-15);
            assert!((r.gradient(&p).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn focal_radii() {
        assert_eq!(AmbientRegion::UnitBall { radius: 1.0 }.rho(), 1.0);
        assert_eq!(AmbientRegion::SolidCylinder { radius: 3.0 }.rho(), 3.0);
        assert_eq!(AmbientRegion::half_space().rho(), DEFAULT_RHO_MAX);
        assert_eq!(AmbientRegion::half_space().focal_radius(), None);
    }

    #[test]
    fn cylinder_circumferential_curvature_is_negative() {
        let c = AmbientRegion::SolidCylinder { radius: 1.0 };
        let p = V3::new(1.0, 0.0, 0.0);
        let t = V3::new(0.0, 1.0, 0.0);
        assert!((c.second_fundamental_form(&p, &t, &t) + 1.0).abs() < 1e-15);
        let z = V3::new(0.0, 0.0, 1.0);
        assert_eq!(c.second_fundamental_form(&p, &z, &z), 0.0);
    }

    #[test]
    fn projection_jacobian_matches_differences() {
        for (r, p) in regions() {
            let q = p * 1.1 + V3::new(0.01, -0.02, 0.03);
            let jac = r.project_jacobian(&q);
            let h = 1e-6;
            for i in 0..3 {
                let mut e = V3::zeros();
                e[i] = h;
                let d = (r.project(&(q + e)) - r.project(&(q - e))) / (2.0 * h);
                assert!((jac.column(i) - d).norm() < 1e-8, "{}", r.name());
            }
            assert!(r.level(&r.project(&q)).abs() < 1e-14);
        }
    }
}
