use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometryField;
use crate::quadrature::ksum;
use crate::variation_lab::griddiff::GridDiff;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevRecord {
    pub theta: f64,
    pub rho: f64,
    /// `√(2π) (∫ f²)^{1/2}`
    pub lhs: f64,
    pub grad_term: f64,
    pub curvature_term: f64,
    /// `2/(ρ sin θ) ∫ |f|`
    pub rho_term: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Right side with the `ρ` term dropped (`ρ → ∞`).
    pub rhs_unbounded: f64,
    pub margin_unbounded: f64,
}

/// Both sides of the capillary Sobolev inequality for nodal values `f`.
pub fn sobolev_check(geom: &GeometryField, f: &[f64], theta: f64, rho: f64) -> Result<SobolevRecord> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("ρ = {rho} must be positive")));
    }
    if !(theta > 0.0 && theta <= PI / 2.0 + 1e-15) {
        return Err(Error::InvalidParameter(format!("θ = {theta} outside (0, π/2]")));
    }
    let grid = &geom.grid;
    if f.len() != grid.n_nodes() {
        return Err(Error::InvalidParameter(format!("{} values for {} nodes", f.len(), grid.n_nodes())));
    }
    let (fx, fy) = GridDiff::new(grid).cartesian(grid, f);
    let da = |i: usize| geom.nodes[i].e2l * grid.weights[i];
    let n = grid.n_nodes();
    let l2 = ksum((0..n).map(|i| f[i] * f[i] * da(i)));
    // |∇f|_g = e^{-λ} |∇₀f|
    let grad = ksum((0..n).map(|i| fx[i].hypot(fy[i]) * geom.nodes[i].e2l.sqrt() * grid.weights[i]));
    let curv = ksum((0..n).map(|i| (f[i] * geom.nodes[i].h_sc).abs() * da(i)));
    let l1 = ksum((0..n).map(|i| f[i].abs() * da(i)));

    let s = theta.sin();
    let lhs = (2.0 * PI).sqrt() * l2.sqrt();
    let c = 1.0 + 1.0 / s;
    let rho_term = 2.0 / (rho * s) * l1;
    let rhs_unbounded = c * grad + c * curv;
    let rhs = rhs_unbounded + rho_term;
    Ok(SobolevRecord {
        theta,
        rho,
        lhs,
        grad_term: c * grad,
        curvature_term: c * curv,
        rho_term,
        rhs,
        margin: rhs - lhs,
        rhs_unbounded,
        margin_unbounded: rhs_unbounded - lhs,
    })
}
