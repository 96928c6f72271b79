use serde::{Deserialize, Serialize};

use super::field::{make_variation, FieldRecipe, VariationField};
use crate::error::{Error, Result};
use crate::geometry::{GeometryField, V3};

/// Time profile of a family `Φ(t) = u + a(t) v + b(t) w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `a = t`, `b = 0`.
    #[default]
    Linear,
    /// `a = sin t`, `b = 1 − cos t`; same velocity, nonzero acceleration `w`.
    Cosine,
}

/// Retraction of boundary rows back onto `∂M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Retraction {
    None,
    /// Nearest-point projection: vertical for planes, radial for spheres
    /// and cylinders.
    #[default]
    Radial,
}

#[derive(Debug, Clone)]
pub struct VariationFamily<'a> {
    pub geom: &'a GeometryField,
    pub v: VariationField,
    /// Acceleration field of the cosine profile.
    pub w: VariationField,
    pub profile: Profile,
    pub retraction: Retraction,
    /// Largest admissible |t|.
    pub radius: f64,
}

/// Position, parameter derivatives and velocity of `Φ` at one node.
#[derive(Debug, Clone, Copy)]
pub struct FamilyPoint {
    pub p: V3,
    pub px: V3,
    pub py: V3,
    pub pt: V3,
}

/// Default acceleration field used by the cosine profile.
pub fn default_acceleration(geom: &GeometryField, scale: f64) -> VariationField {
    let w = make_variation(&FieldRecipe::RandomSmooth { seed: 0x0c05, modes: 3, amplitude: 1.0 }, geom);
    let m = w.max_norm();
    if m > 0.0 {
        w.scaled(scale / m)
    } else {
        w
    }
}

impl<'a> VariationFamily<'a> {
    pub fn new(geom: &'a GeometryField, v: VariationField, profile: Profile) -> Self {
        let scale = v.max_norm();
        let w = match profile {
            Profile::Linear => VariationField::zero(geom),
            Profile::Cosine => default_acceleration(geom, scale),
        };
        Self::with_acceleration(geom, v, w, profile)
    }

    pub fn with_acceleration(
        geom: &'a GeometryField,
        v: VariationField,
        w: VariationField,
        profile: Profile,
    ) -> Self {
        let m = v.max_norm().max(w.max_norm());
        let radius = if m > 0.0 { 0.25 * geom.chart.scale() / m } else { 1.0 };
        VariationFamily { geom, v, w, profile, retraction: Retraction::Radial, radius }
    }

    pub fn with_retraction(mut self, r: Retraction) -> Self {
        self.retraction = r;
        self
    }

    /// `(a, a', b, b')` at `t`.
    pub fn coefficients(&self, t: f64) -> (f64, f64, f64, f64) {
        match self.profile {
            Profile::Linear => (t, 1.0, 0.0, 0.0),
            Profile::Cosine => (t.sin(), t.cos(), 1.0 - t.cos(), t.sin()),
        }
    }

    pub fn check_range(&self, t: f64) -> Result<()> {
        if t.abs() > self.radius {
            return Err(Error::FamilyOutOfRange(format!(
                "|t| = {:.3e} exceeds validity radius {:.3e}",
                t.abs(),
                self.radius
            )));
        }
        Ok(())
    }

    pub fn point(&self, i: usize, t: f64) -> FamilyPoint {
        let (a, da, b, db) = self.coefficients(t);
        let g = &self.geom.nodes[i];
        let (v, w) = (&self.v, &self.w);
        FamilyPoint {
            p: g.u + v.v[i] * a + w.v[i] * b,
            px: g.ux + v.vx[i] * a + w.vx[i] * b,
            py: g.uy + v.vy[i] * a + w.vy[i] * b,
            pt: v.v[i] * da + w.v[i] * db,
        }
    }

    /// `Φ''(0)` per node.
    pub fn acceleration(&self) -> &VariationField {
        &self.w
    }

    /// Boundary curve `Γ = R∘Φ` at a boundary node: `(Γ, Γ_t, Γ_φ)`.
    pub fn boundary_point(&self, node: usize, t: f64) -> (V3, V3, V3) {
        let fp = self.point(node, t);
        let [x, y] = self.geom.grid.coords[node];
        let p_phi = fp.py * x - fp.px * y;
        match self.retraction {
            Retraction::None => (fp.p, fp.pt, p_phi),
            Retraction::Radial => {
                let amb = &self.geom.ambient;
                let jac = amb.project_jacobian(&fp.p);
                (amb.project(&fp.p), jac * fp.pt, jac * p_phi)
            }
        }
    }

    /// Checks that the boundary curve stays on `∂M` at time `t`.
    pub fn check_boundary(&self, t: f64) -> Result<()> {
        let amb = &self.geom.ambient;
        if !amb.has_boundary() {
            return Ok(());
        }
        let tol = self.geom.options.tolerances.boundary;
        for b in &self.geom.boundary {
            let (p, _, _) = self.boundary_point(b.node, t);
            let r = amb.level(&p).abs();
            if r > tol {
                return Err(Error::FamilyOutOfRange(format!(
                    "family leaves M: boundary node {} off by {r:.3e} at t = {t:.3e}",
                    b.node
                )));
            }
        }
        Ok(())
    }
}
