use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub theta: f64,
    pub h: f64,
    /// Sup of the second fundamental form of `M ↪ ℝ^d`.
    pub j: f64,
    /// Sup of the second fundamental form of `∂M`.
    pub b: f64,
    pub area: f64,
    pub rho: f64,
    pub r: i64,
    /// Search interval for `δ`.
    pub delta_range: (f64, f64),
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= PI / 2.0 + 1e-15) {
            return Err(Error::InvalidParameter(format!("θ = {} outside (0, π/2]", self.theta)));
        }
        if self.h < 0.0 || self.j < 0.0 || self.b < 0.0 || self.area < 0.0 {
            return Err(Error::InvalidParameter("curvature scalars and area must be ≥ 0".into()));
        }
        if !(self.rho > 0.0) {
            return Err(Error::InvalidParameter(format!("ρ = {}", self.rho)));
        }
        let (lo, hi) = self.delta_range;
        if !(lo > 0.0 && hi >= lo) {
            return Err(Error::InvalidParameter(format!("empty δ range [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// `L = √(h² + 4J²) + 2 / (ρ (sin θ + 1))`.
    pub fn l(&self) -> f64 {
        (self.h * self.h + 4.0 * self.j * self.j).sqrt() + 2.0 / (self.rho * (self.theta.sin() + 1.0))
    }

    /// `α = ½ L² δ (δ + 1)`.
    pub fn alpha(&self, delta: f64) -> f64 {
        0.5 * self.l().powi(2) * delta * (delta + 1.0)
    }

    /// `β = 2J² + h² + B²`.
    pub fn beta(&self) -> f64 {
        2.0 * self.j * self.j + self.h * self.h + self.b * self.b
    }
}

/// `e^{(α+β)t} / (e^{αt} − 1)`.
pub fn trace_profile(alpha: f64, beta: f64, t: f64) -> f64 {
    ((alpha + beta) * t).exp() / (alpha * t).exp_m1()
}

/// Minimiser `t₀ = ln(1 + α/β) / α` and minimum `(β/α)(α/β + 1)^{1+β/α}`;
/// for `β = 0` the infimum 1 is approached as `t → ∞`.
pub fn profile_minimum(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("α = {alpha} must be positive")));
    }
    if beta == 0.0 {
        return Ok((f64::INFINITY, 1.0));
    }
    let u = beta / alpha;
    let t0 = (1.0 + 1.0 / u).ln() / alpha;
    // (1+u)(1+1/u)^u, evaluated in logs
    let value = ((1.0 + u).ln() + u * (1.0 / u).ln_1p()).exp();
    Ok((t0, value))
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (1.0 + c.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Numeric minimum of the trace profile: log grid, then golden section in `ln t`.
pub fn profile_minimum_numeric(alpha: f64, beta: f64) -> (f64, f64) {
    let f = |s: f64| trace_profile(alpha, beta, s.exp());
    let (lo, hi) = ((1e-6 / (alpha + beta)).ln(), (50.0 / alpha).ln());
    let n = 400;
    let step = (hi - lo) / n as f64;
    let mut best = (lo, f(lo));
    for i in 1..=n {
        let s = lo + i as f64 * step;
        let v = f(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    let (s, v) = golden_min(f, best.0 - step, best.0 + step, 1e-12);
    (s.exp(), v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub inputs: BoundInputs,
    pub l: f64,
    pub beta: f64,
    pub delta_opt: f64,
    pub alpha_opt: f64,
    pub t_opt: f64,
    /// `f(t₀)` at `δ_opt` from the closed form.
    pub profile_closed_form: f64,
    /// Numeric minimum over `t` at `δ_opt`.
    pub profile_numeric: f64,
    pub profile_agreement: f64,
    /// Bound on `i_ℰ + n_ℰ`.
    pub energy_bound: f64,
    /// `energy_bound + r`, the explicit bound on `i_Σ`.
    pub bound: f64,
    /// `β = 0`: the minimum over `t` is the limit `t → ∞`.
    pub degenerate: bool,
}

impl BoundRecord {
    /// `C (1 + 1/sin θ)² (J² + B² + h²) 𝒜 + r` for a caller-chosen `C`.
    pub fn paper_shaped(&self, c: f64) -> f64 {
        let i = &self.inputs;
        let s = 1.0 + 1.0 / i.theta.sin();
        c * s * s * (i.j * i.j + i.b * i.b + i.h * i.h) * i.area + i.r as f64
    }
}

fn energy_bound_at(inputs: &BoundInputs, delta: f64) -> Result<f64> {
    let (_, fmin) = profile_minimum(inputs.alpha(delta), inputs.beta())?;
    let s = 1.0 + 1.0 / inputs.theta.sin();
    Ok(s * s * (delta + 1.0).powi(2) * inputs.l().powi(2) * fmin * fmin * inputs.area / (2.0 * PI))
}

pub fn index_bound(inputs: &BoundInputs) -> Result<BoundRecord> {
    inputs.validate()?;
    let (lo, hi) = inputs.delta_range;
    let g = |s: f64| energy_bound_at(inputs, s.exp()).unwrap_or(f64::INFINITY);
    let (a, b) = (lo.ln(), hi.ln());
    let n = 200;
    let mut best = (a, g(a));
    for i in 1..=n {
        let s = a + (b - a) * i as f64 / n as f64;
        let v = g(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    let step = (b - a) / n as f64;
    let (s, _) = if b > a { golden_min(g, (best.0 - step).max(a), (best.0 + step).min(b), 1e-12) } else { best };
    let delta = s.exp();
    let alpha = inputs.alpha(delta);
    let beta = inputs.beta();
    let (t0, closed) = profile_minimum(alpha, beta)?;
    let degenerate = beta == 0.0;
    let numeric = if degenerate { 1.0 } else { profile_minimum_numeric(alpha, beta).1 };
    let energy_bound = energy_bound_at(inputs, delta)?;
    Ok(BoundRecord {
        inputs: *inputs,
        l: inputs.l(),
        beta,
        delta_opt: delta,
        alpha_opt: alpha,
        t_opt: t0,
        profile_closed_form: closed,
        profile_numeric: numeric,
        profile_agreement: (closed - numeric).abs() / closed,
        energy_bound,
        bound: energy_bound + inputs.r as f64,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_minimum() {
        let (t0, v) = profile_minimum(1.0, 2.0).unwrap();
        assert!((v - 6.75).abs() < 1e-12);
        assert!((t0 - 1.5f64.ln()).abs() < 1e-15);
        let (_, n) = profile_minimum_numeric(1.0, 2.0);
        assert!((n - 6.75).abs() < 1e-6);
        assert_eq!(profile_minimum(1.0, 0.0).unwrap().1, 1.0);
        assert!(profile_minimum(0.0, 1.0).is_err());
    }

    #[test]
    fn cap_bound_exceeds_index() {
        let rec = index_bound(&BoundInputs {
            theta: PI / 3.0,
            h: 2.0,
            j: 0.0,
            b: 0.0,
            area: PI,
            rho: 10.0,
            r: 0,
            delta_range: (1e-3, 1e2),
        })
        .unwrap();
        assert!(rec.bound >= 1.0);
        assert!(rec.profile_agreement < 1e-6);
    }
}
