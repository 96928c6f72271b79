use serde::{Deserialize, Serialize};

use super::family::VariationFamily;
use crate::error::{Error, Result};
use crate::functionals::{functional_along_family, FunctionalId};

/// Richardson-extrapolated finite-difference derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    pub value: f64,
    /// `|D(t₀/2) − D(t₀)| / 3`.
    pub error: f64,
    pub step: f64,
}

/// Default first step `1e−3 · scale / max|v|`.
pub fn default_step(family: &VariationFamily) -> f64 {
    let m = family.v.max_norm();
    let scale = family.geom.chart.scale();
    if m > 0.0 {
        1e-3 * scale / m
    } else {
        1e-3 * scale
    }
}

pub fn fd_derivative(f: &FunctionalId, family: &VariationFamily, order: u8) -> Result<FdEstimate> {
    fd_derivative_with_step(f, family, order, default_step(family))
}

pub fn fd_derivative_with_step(
    f: &FunctionalId,
    family: &VariationFamily,
    order: u8,
    t0: f64,
) -> Result<FdEstimate> {
    family.check_range(t0)?;
    fd_scalar(|t| functional_along_family(f, family, t), t0, order)
}

/// Centered differences at `t₀` and `t₀/2` with Richardson extrapolation.
pub fn fd_scalar<F>(eval: F, t0: f64, order: u8) -> Result<FdEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(t0 > 1e-12) {
        return Err(Error::StepUnderflow(t0));
    }
    let f0 = if order == 2 { eval(0.0)? } else { 0.0 };
    let diff = |t: f64| -> Result<f64> {
        let (p, m) = (eval(t)?, eval(-t)?);
        Ok(match order {
            1 => (p - m) / (2.0 * t),
            2 => (p - 2.0 * f0 + m) / (t * t),
            _ => return Err(Error::InvalidParameter(format!("derivative order {order}"))),
        })
    };
    let coarse = diff(t0)?;
    let fine = diff(0.5 * t0)?;
    Ok(FdEstimate {
        value: fine + (fine - coarse) / 3.0,
        error: (fine - coarse).abs() / 3.0,
        step: t0,
    })
}
