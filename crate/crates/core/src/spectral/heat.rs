//! Heat traces from computed spectra and the eigenvalue counting bound.

use serde::{Deserialize, Serialize};

use super::eigen::SpectrumReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatTrace {
    pub t: f64,
    /// `Σ e^{−λ_i t}` over the computed eigenvalues.
    pub partial: f64,
    /// Weyl-law estimate of the omitted part,
    /// `(density / t) e^{−λ_max t}`; zero for a complete spectrum.
    pub tail: f64,
    pub value: f64,
}

/// `Σ e^{−λ_i t}` with a tail estimate when the spectrum is truncated.
pub fn heat_trace(spectrum: &SpectrumReport, t: f64) -> Result<HeatTrace> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("heat trace at t = {t}")));
    }
    if spectrum.eigenvalues.is_empty() {
        return Err(Error::Precondition("empty spectrum".into()));
    }
    let partial: f64 = spectrum.eigenvalues.iter().map(|l| (-l * t).exp()).sum();
    let tail = if spectrum.complete {
        0.0
    } else if spectrum.weyl_density > 0.0 {
        let top = *spectrum.eigenvalues.last().unwrap();
        spectrum.weyl_density / t * (-top * t).exp()
    } else {
        return Err(Error::Precondition("incomplete spectrum without a tail model".into()));
    };
    Ok(HeatTrace { t, partial, tail, value: partial + tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingCheck {
    pub c: f64,
    pub t: f64,
    /// `#{λ_i ≤ c}` with multiplicity.
    pub count: usize,
    /// `e^{ct} · trace(t)`.
    pub bound: f64,
    pub holds: bool,
    /// The count may be incomplete: `c` exceeds the largest computed
    /// eigenvalue of a truncated spectrum.
    pub count_truncated: bool,
}

pub fn counting_check(spectrum: &SpectrumReport, c: f64, t: f64) -> Result<CountingCheck> {
    let trace = heat_trace(spectrum, t)?;
    let count = spectrum.eigenvalues.iter().filter(|&&l| l <= c).count();
    let top = *spectrum.eigenvalues.last().unwrap();
    let bound = (c * t).exp() * trace.value;
    Ok(CountingCheck {
        c,
        t,
        count,
        bound,
        holds: count as f64 <= bound,
        count_truncated: !spectrum.complete && c >= top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(values: Vec<f64>, complete: bool) -> SpectrumReport {
        SpectrumReport {
            residuals: vec![0.0; values.len()],
            eigenvalues: values,
            index: 0,
            nullity: 1,
            tol_null: 1e-9,
            complete,
            method: "test".into(),
            iterations: 0,
            weyl_density: 0.25,
            convergence_delta: None,
            boundary_case: false,
            vectors: vec![],
        }
    }

    #[test]
    fn trace_tends_to_kernel_dimension() {
        let r = report(vec![0.0, 3.39, 3.39, 9.33], true);
        let big = heat_trace(&r, 50.0).unwrap();
        assert!((big.value - 1.0).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for t in [0.01, 0.1, 1.0, 10.0] {
            let v = heat_trace(&r, t).unwrap().value;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn truncated_spectrum_needs_tail() {
        let mut r = report(vec![-1.0, 2.0], false);
        assert!(heat_trace(&r, 0.1).unwrap().tail > 0.0);
        r.weyl_density = 0.0;
        assert!(heat_trace(&r, 0.1).is_err());
        assert!(heat_trace(&report(vec![1.0], true), 0.0).is_err());
    }

    #[test]
    fn counting_inequality() {
        let r = report(vec![-2.0, 0.5, 1.0, 4.0], true);
        for t in [0.01, 0.1, 1.0] {
            let c = counting_check(&r, 1.0, t).unwrap();
            assert_eq!(c.count, 3);
            assert!(c.holds);
        }
    }
}
