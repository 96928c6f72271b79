//! Area, Dirichlet energy, enclosed volume and wetting functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometryField;
use crate::quadrature::{gauss_legendre, ksum, KahanSum};
use crate::variation_lab::{VariationFamily, VariationField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FunctionalTag {
    Area,
    Energy,
    VolumeH,
    WettingTheta,
    AreaMod,
    EnergyMod,
}

/// A functional together with its weights `h` and `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalId {
    pub tag: FunctionalTag,
    #[serde(default)]
    pub h: f64,
    #[serde(default = "right_angle")]
    pub theta: f64,
}

fn right_angle() -> f64 {
    std::f64::consts::FRAC_PI_2
}

impl FunctionalId {
    pub fn new(tag: FunctionalTag, h: f64, theta: f64) -> Self {
        FunctionalId { tag, h, theta }
    }

    pub fn area() -> Self {
        Self::new(FunctionalTag::Area, 0.0, right_angle())
    }

    pub fn energy() -> Self {
        Self::new(FunctionalTag::Energy, 0.0, right_angle())
    }

    pub fn volume(h: f64) -> Self {
        Self::new(FunctionalTag::VolumeH, h, right_angle())
    }

    pub fn wetting(theta: f64) -> Self {
        Self::new(FunctionalTag::WettingTheta, 0.0, theta)
    }

    pub fn area_mod(h: f64, theta: f64) -> Self {
        Self::new(FunctionalTag::AreaMod, h, theta)
    }

    pub fn energy_mod(h: f64, theta: f64) -> Self {
        Self::new(FunctionalTag::EnergyMod, h, theta)
    }

    /// Validates the weights; returns warnings for admitted edge cases.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if !self.h.is_finite() || self.h < 0.0 {
            return Err(Error::InvalidParameter(format!("h = {} must be finite and ≥ 0", self.h)));
        }
        if self.tag == FunctionalTag::VolumeH && self.h == 0.0 {
            return Err(Error::InvalidParameter("VOLUME_H needs h > 0".into()));
        }
        let uses_theta = matches!(
            self.tag,
            FunctionalTag::WettingTheta | FunctionalTag::AreaMod | FunctionalTag::EnergyMod
        );
        if uses_theta {
            if !(self.theta > 0.0 && self.theta <= right_angle() + 1e-15) {
                return Err(Error::InvalidParameter(format!(
                    "theta = {} outside (0, π/2]",
                    self.theta
                )));
            }
            if (self.theta - right_angle()).abs() <= 1e-15 {
                warnings.push("theta = π/2 admitted at the edge of (0, π/2)".into());
            }
        }
        Ok(warnings)
    }

    fn parts(&self) -> (bool, bool, bool, bool) {
        use FunctionalTag::*;
        match self.tag {
            Area => (true, false, false, false),
            Energy => (false, true, false, false),
            VolumeH => (false, false, true, false),
            WettingTheta => (false, false, false, true),
            AreaMod => (true, false, true, true),
            EnergyMod => (false, true, true, true),
        }
    }
}

pub fn area(geom: &GeometryField) -> f64 {
    geom.area()
}

/// `½ ∫ (|u_x|² + |u_y|²) dx dy`.
pub fn dirichlet_energy(geom: &GeometryField) -> f64 {
    ksum(
        geom.nodes
            .iter()
            .zip(&geom.grid.weights)
            .map(|(g, w)| 0.5 * (g.metric[0] + g.metric[2]) * w),
    )
}

const TIME_NODES: usize = 8;

fn time_rule(t: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(TIME_NODES);
    x.iter().zip(&w).map(|(xi, wi)| (0.5 * t * (xi + 1.0), 0.5 * t * wi)).collect()
}

fn area_at(family: &VariationFamily, t: f64) -> f64 {
    let g = family.geom;
    ksum((0..g.nodes.len()).map(|i| {
        let p = family.point(i, t);
        p.px.cross(&p.py).norm() * g.grid.weights[i]
    }))
}

fn energy_at(family: &VariationFamily, t: f64) -> f64 {
    let g = family.geom;
    ksum((0..g.nodes.len()).map(|i| {
        let p = family.point(i, t);
        0.5 * (p.px.norm_squared() + p.py.norm_squared()) * g.grid.weights[i]
    }))
}

/// `∫₀ᵗ ∫ h det[Φ_t, Φ_x, Φ_y]` oriented so that its derivative is `∫⟨v, hν⟩`.
fn volume_along(family: &VariationFamily, h: f64, t: f64) -> f64 {
    let g = family.geom;
    let mut acc = KahanSum::new();
    for (s, ws) in time_rule(t) {
        for i in 0..g.nodes.len() {
            let p = family.point(i, s);
            acc.add(ws * g.grid.weights[i] * p.pt.dot(&p.px.cross(&p.py)));
        }
    }
    h * g.orientation * acc.value()
}

/// `∫₀ᵗ ∮ cos θ det[Γ_t, Γ_τ, N]` along the retracted boundary curve.
fn wetting_along(family: &VariationFamily, theta: f64, t: f64) -> f64 {
    let g = family.geom;
    if !g.ambient.has_boundary() {
        return 0.0;
    }
    let dphi = g.grid.dphi();
    let mut acc = KahanSum::new();
    for (s, ws) in time_rule(t) {
        for b in &g.boundary {
            let (p, pt, pphi) = family.boundary_point(b.node, s);
            let n = g.ambient.normal(&p);
            acc.add(ws * dphi * b.tau_sign * pt.dot(&pphi.cross(&n)));
        }
    }
    theta.cos() * acc.value()
}

/// Value of `F` at `Φ(t)`; volume and wetting are integrated from `t = 0`.
pub fn functional_along_family(f: &FunctionalId, family: &VariationFamily, t: f64) -> Result<f64> {
    f.validate()?;
    family.check_range(t)?;
    let (a, e, v, w) = f.parts();
    if w {
        family.check_boundary(t)?;
    }
    let mut total = 0.0;
    if a {
        total += area_at(family, t);
    }
    if e {
        total += energy_at(family, t);
    }
    if v {
        total += volume_along(family, f.h, t);
    }
    if w {
        total += wetting_along(family, f.theta, t);
    }
    Ok(total)
}

/// Criticality residuals of a capillary surface for given `h`, `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalityResiduals {
    /// `∫ |H − hν| dΣ`.
    pub mean_curvature: f64,
    /// `max |cos α − cos θ|`.
    pub contact_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstVariation {
    pub value: f64,
    pub criticality: Option<CriticalityResiduals>,
}

pub fn criticality_residuals(geom: &GeometryField, h: f64, theta: f64) -> CriticalityResiduals {
    CriticalityResiduals {
        mean_curvature: geom.integrate(|_, g| (g.h_sc - h).abs()),
        contact_angle: geom
            .boundary
            .iter()
            .map(|b| (b.cos_alpha - theta.cos()).abs())
            .fold(0.0, f64::max),
    }
}

/// `−∫⟨v, H⟩ + ∮⟨v, n⟩`.
pub fn first_variation_area(geom: &GeometryField, v: &VariationField) -> f64 {
    -geom.integrate(|i, g| g.h_sc * v.v[i].dot(&g.nu))
        + geom.integrate_boundary(|b| v.v[b.node].dot(&b.n))
}

/// `∫ ⟨v_x, u_x⟩ + ⟨v_y, u_y⟩ dx dy`.
pub fn first_variation_energy(geom: &GeometryField, v: &VariationField) -> f64 {
    ksum(geom.nodes.iter().enumerate().map(|(i, g)| {
        (v.vx[i].dot(&g.ux) + v.vy[i].dot(&g.uy)) * geom.grid.weights[i]
    }))
}

/// `∫ ⟨v, hν⟩`.
pub fn first_variation_volume(geom: &GeometryField, v: &VariationField, h: f64) -> f64 {
    h * geom.integrate(|i, g| v.v[i].dot(&g.nu))
}

/// `−∮ cos θ ⟨v, ν̂⟩`.
pub fn first_variation_wetting(geom: &GeometryField, v: &VariationField, theta: f64) -> f64 {
    -theta.cos() * geom.integrate_boundary(|b| v.v[b.node].dot(&b.nu_hat))
}

pub fn first_variation(
    f: &FunctionalId,
    geom: &GeometryField,
    v: &VariationField,
) -> Result<FirstVariation> {
    f.validate()?;
    let (a, e, vol, w) = f.parts();
    if w && v.tangency_residual > geom.options.tolerances.boundary {
        return Err(Error::TangencyViolation(v.tangency_residual));
    }
    let mut value = 0.0;
    if a {
        value += first_variation_area(geom, v);
    }
    if e {
        value += first_variation_energy(geom, v);
    }
    if vol {
        value += first_variation_volume(geom, v, f.h);
    }
    if w {
        value += first_variation_wetting(geom, v, f.theta);
    }
    let criticality = (f.tag == FunctionalTag::AreaMod || f.tag == FunctionalTag::EnergyMod)
        .then(|| criticality_residuals(geom, f.h, f.theta));
    Ok(FirstVariation { value, criticality })
}
