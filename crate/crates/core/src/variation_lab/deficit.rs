use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::family::{Profile, VariationFamily};
use super::fd::{default_step, fd_scalar};
use super::field::VariationField;
use crate::error::{Error, Result};
use crate::functionals::{functional_along_family, FunctionalId};
use crate::geometry::GeometryField;

/// Infinitesimal conformal deficit of a variation.
#[derive(Debug, Clone)]
pub struct DeficitField {
    /// `η = c u_z̄` is stored through its coefficient
    /// `c = ½[(a₁₁ − a₂₂) − i(a₁₂ + a₂₁)]`, `a_ij = e^{-2λ}⟨v_{x_i}, u_{x_j}⟩`.
    pub eta: Vec<Complex64>,
    /// `4∫|μ|² = 4∫|c|² dΣ`.
    pub value: f64,
}

pub fn conformal_deficit(geom: &GeometryField, v: &VariationField) -> DeficitField {
    let eta: Vec<Complex64> = geom
        .nodes
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let a11 = v.vx[i].dot(&g.ux) / g.e2l;
            let a12 = v.vx[i].dot(&g.uy) / g.e2l;
            let a21 = v.vy[i].dot(&g.ux) / g.e2l;
            let a22 = v.vy[i].dot(&g.uy) / g.e2l;
            Complex64::new(0.5 * (a11 - a22), -0.5 * (a12 + a21))
        })
        .collect();
    let value = 4.0 * geom.integrate(|i, _| eta[i].norm_sqr());
    DeficitField { eta, value }
}

impl DeficitField {
    /// CSV with columns `node,x,y,re_eta,im_eta`.
    pub fn write_csv<W: Write>(&self, geom: &GeometryField, mut out: W) -> Result<()> {
        writeln!(out, "node,x,y,re_eta,im_eta")?;
        for (i, e) in self.eta.iter().enumerate() {
            let [x, y] = geom.grid.coords[i];
            writeln!(out, "{i},{x:.15e},{y:.15e},{:.15e},{:.15e}", e.re, e.im)?;
        }
        Ok(())
    }
}

/// Both sides of the energy–area comparison identity for one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    /// `(ℰ − 𝒜)''(0)` along the linear family.
    pub fd_linear: f64,
    /// `(ℰ − 𝒜)''(0)` along the cosine family.
    pub fd_cosine: f64,
    pub fd_error: f64,
    /// `4∫|μ|²`.
    pub deficit: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    /// `𝒜''(0)` along each family; these may differ.
    pub area_linear: f64,
    pub area_cosine: f64,
    /// Relative spread of `(ℰ − 𝒜)''` across the two families.
    pub family_spread: f64,
}

impl ComparisonRecord {
    /// `|FD − deficit| ≤ max(1e−6, 1e−4 |deficit|)`.
    pub fn passes(&self) -> bool {
        self.abs_residual <= 1e-6f64.max(1e-4 * self.deficit.abs())
    }
}

pub fn verify_comparison(geom: &GeometryField, v: &VariationField) -> Result<ComparisonRecord> {
    if geom.conformality_residual > 1e-8 {
        return Err(Error::Precondition(format!(
            "non-conformal base chart (residual {:.3e})",
            geom.conformality_residual
        )));
    }
    if v.tangency_residual > geom.options.tolerances.boundary {
        return Err(Error::TangencyViolation(v.tangency_residual));
    }
    let deficit = conformal_deficit(geom, v).value;
    let run = |profile: Profile| -> Result<(f64, f64, f64)> {
        let fam = VariationFamily::new(geom, v.clone(), profile);
        let t0 = default_step(&fam);
        let (e, a) = (FunctionalId::energy(), FunctionalId::area());
        let gap = fd_scalar(
            |t| Ok(functional_along_family(&e, &fam, t)? - functional_along_family(&a, &fam, t)?),
            t0,
            2,
        )?;
        let area = fd_scalar(|t| functional_along_family(&a, &fam, t), t0, 2)?;
        Ok((gap.value, gap.error, area.value))
    };
    let (fd_linear, err_l, area_linear) = run(Profile::Linear)?;
    let (fd_cosine, err_c, area_cosine) = run(Profile::Cosine)?;
    let abs_residual = (fd_linear - deficit).abs().max((fd_cosine - deficit).abs());
    let scale = deficit.abs().max(fd_linear.abs());
    Ok(ComparisonRecord {
        fd_linear,
        fd_cosine,
        fd_error: err_l.max(err_c),
        deficit,
        abs_residual,
        rel_residual: if scale > 0.0 { abs_residual / scale } else { 0.0 },
        area_linear,
        area_cosine,
        family_spread: if scale > 0.0 { (fd_linear - fd_cosine).abs() / scale } else { 0.0 },
    })
}
