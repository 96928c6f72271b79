use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AmbientRegion, V3};

/// Cutoff along the normal geodesics: a linear ramp from 1 at `∂M` to 0 at
/// depth `ρ − ε`, with its corner rounded over `width` and renormalised to
/// equal 1 on `∂M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub reach: f64,
    pub width: f64,
}

impl CutoffProfile {
    pub fn new(rho: f64, eps: f64) -> Self {
        CutoffProfile { reach: rho - eps, width: 1e-3 * rho }
    }

    fn ramp(&self, x: f64) -> f64 {
        let w = self.width;
        if x <= 0.0 {
            0.0
        } else if x < w {
            x * x / (2.0 * w)
        } else {
            x - 0.5 * w
        }
    }

    pub fn value(&self, depth: f64) -> f64 {
        self.ramp(self.reach - depth) / self.ramp(self.reach)
    }

    /// Largest `|φ'|`.
    pub fn max_slope(&self) -> f64 {
        1.0 / self.ramp(self.reach)
    }
}

/// `X_ε(p) = φ(depth p) · N(π(p))`.
pub fn extension_field(ambient: &AmbientRegion, profile: &CutoffProfile, p: &V3) -> V3 {
    let phi = profile.value(ambient.depth(p));
    if phi == 0.0 {
        return V3::zeros();
    }
    ambient.normal(&ambient.project(p)) * phi
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionRecord {
    pub ambient: String,
    pub eps: f64,
    pub rho: f64,
    pub profile: CutoffProfile,
    pub probes: usize,
    pub sup_norm: f64,
    /// Largest operator norm of the finite-difference Jacobian.
    pub sup_grad: f64,
    /// `1 / (ρ − ε)`
    pub grad_limit: f64,
    /// Largest `|X|` at probes deeper than `ρ − ε`.
    pub sup_beyond_reach: f64,
    pub beyond_reach_probes: usize,
    pub norm_ok: bool,
    pub grad_ok: bool,
}

fn probe_box(ambient: &AmbientRegion) -> Result<(V3, V3)> {
    Ok(match *ambient {
        AmbientRegion::HalfSpace { height, rho_max } => {
            (V3::new(-2.0, -2.0, height), V3::new(2.0, 2.0, height + 1.2 * rho_max))
        }
        AmbientRegion::UnitBall { radius } => (V3::repeat(-radius), V3::repeat(radius)),
        AmbientRegion::SolidCylinder { radius } => {
            (V3::new(-radius, -radius, -1.0), V3::new(radius, radius, 1.0))
        }
        AmbientRegion::Slab { lower, upper } => (V3::new(-1.0, -1.0, lower), V3::new(1.0, 1.0, upper)),
        AmbientRegion::FreeSpace => {
            return Err(Error::InvalidParameter("free space has no boundary to extend from".into()))
        }
    })
}

/// Samples `X_ε` on an `n³` lattice over a box covering `M`, keeping the
/// probes inside `M`.
pub fn normal_extension(ambient: &AmbientRegion, eps: f64, n: usize) -> Result<ExtensionRecord> {
    let rho = ambient.rho();
    if !(eps > 0.0 && eps < rho) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside (0, ρ = {rho})")));
    }
    if n < 2 {
        return Err(Error::ResolutionTooSmall(format!("probe lattice {n}")));
    }
    let (lo, hi) = probe_box(ambient)?;
    let profile = CutoffProfile::new(rho, eps);
    let step = 1e-6 * rho;
    let x = |p: &V3| extension_field(ambient, &profile, p);

    let mut rec = ExtensionRecord {
        ambient: ambient.name().to_string(),
        eps,
        rho,
        profile,
        probes: 0,
        sup_norm: 0.0,
        sup_grad: 0.0,
        grad_limit: 1.0 / (rho - eps),
        sup_beyond_reach: 0.0,
        beyond_reach_probes: 0,
        norm_ok: false,
        grad_ok: false,
    };
    let t = |i: usize| i as f64 / (n - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let p = lo + (hi - lo).component_mul(&V3::new(t(i), t(j), t(k)));
                let depth = ambient.depth(&p);
                // stay clear of the focal set, where the projection is singular
                if depth < 0.0 || depth > rho - 1e-9 * rho {
                    continue;
                }
                rec.probes += 1;
                let v = x(&p).norm();
                rec.sup_norm = rec.sup_norm.max(v);
                if depth > profile.reach {
                    rec.beyond_reach_probes += 1;
                    rec.sup_beyond_reach = rec.sup_beyond_reach.max(v);
                }
                let mut jac = Matrix3::zeros();
                for c in 0..3 {
                    let mut e = V3::zeros();
                    e[c] = step;
                    jac.set_column(c, &((x(&(p + e)) - x(&(p - e))) / (2.0 * step)));
                }
                let g = jac.singular_values().max();
                rec.sup_grad = rec.sup_grad.max(g);
            }
        }
    }
    rec.norm_ok = rec.sup_norm <= 1.0 + 1e-12;
    rec.grad_ok = rec.sup_grad <= rec.grad_limit * (1.0 + 1e-2);
    Ok(rec)
}
