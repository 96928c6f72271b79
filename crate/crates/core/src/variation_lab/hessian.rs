use serde::{Deserialize, Serialize};

use super::family::{Profile, VariationFamily};
use super::fd::{default_step, fd_scalar};
use super::field::VariationField;
use super::griddiff::periodic_diff_matrix;
use crate::error::{Error, Result};
use crate::functionals::{
    criticality_residuals, first_variation_area, first_variation_energy, first_variation_volume,
    first_variation_wetting, functional_along_family, FunctionalId,
};
use crate::geometry::{GeometryField, V3};
use crate::quadrature::KahanSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HessianFormula {
    Area,
    Volume,
    Wetting,
    Combined,
    CmcCap,
    EnergyMod,
}

impl HessianFormula {
    pub const ALL: [HessianFormula; 6] = [
        HessianFormula::Area,
        HessianFormula::Volume,
        HessianFormula::Wetting,
        HessianFormula::Combined,
        HessianFormula::CmcCap,
        HessianFormula::EnergyMod,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            HessianFormula::Area => "AREA",
            HessianFormula::Volume => "VOLUME",
            HessianFormula::Wetting => "WETTING",
            HessianFormula::Combined => "COMBINED",
            HessianFormula::CmcCap => "CMC_CAP",
            HessianFormula::EnergyMod => "ENERGY_MOD",
        }
    }
}

/// Weights and optional non-constant data (defaults: constant `h`, `θ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianParams {
    pub h: f64,
    pub theta: f64,
    /// `∇_ν h`, taken constant over the surface.
    #[serde(default)]
    pub dh_normal: f64,
    /// Ambient gradient of `cos θ`, taken constant along the boundary.
    #[serde(default)]
    pub grad_cos_theta: [f64; 3],
}

impl HessianParams {
    pub fn new(h: f64, theta: f64) -> Self {
        HessianParams { h, theta, dh_normal: 0.0, grad_cos_theta: [0.0; 3] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianValue {
    pub formula: HessianFormula,
    pub value: f64,
    /// Each interior and boundary term of the formula.
    pub terms: Vec<(String, f64)>,
    /// Alternative closed forms evaluated alongside.
    pub variants: Vec<(String, f64)>,
}

/// Per-node quantities derived from the split `v = fν + σ`.
struct Split {
    f: f64,
    /// `(f_x, f_y)`.
    df: [f64; 2],
    sigma: V3,
    sigma_x: V3,
    sigma_y: V3,
    /// Coordinates of σ in `(u_x, u_y)`.
    c: [f64; 2],
}

fn split(geom: &GeometryField, v: &VariationField, i: usize) -> Split {
    let g = &geom.nodes[i];
    let f = v.v[i].dot(&g.nu);
    let fx = v.vx[i].dot(&g.nu) + v.v[i].dot(&g.nu_x);
    let fy = v.vy[i].dot(&g.nu) + v.v[i].dot(&g.nu_y);
    let sigma = v.v[i] - g.nu * f;
    let c = g.tangent_coords(&sigma);
    Split {
        f,
        df: [fx, fy],
        sigma,
        sigma_x: v.vx[i] - g.nu * fx - g.nu_x * f,
        sigma_y: v.vy[i] - g.nu * fy - g.nu_y * f,
        c: [c[0], c[1]],
    }
}

impl Split {
    fn grad_sq(&self, geom: &GeometryField, i: usize) -> f64 {
        let ginv = geom.nodes[i].inverse_metric();
        let d = nalgebra::Vector2::new(self.df[0], self.df[1]);
        (d.transpose() * ginv * d)[0]
    }

    fn df_sigma(&self) -> f64 {
        self.df[0] * self.c[0] + self.df[1] * self.c[1]
    }

    fn div_sigma(&self, geom: &GeometryField, i: usize) -> f64 {
        let g = &geom.nodes[i];
        let ginv = g.inverse_metric();
        let m = [
            [self.sigma_x.dot(&g.ux), self.sigma_x.dot(&g.uy)],
            [self.sigma_y.dot(&g.ux), self.sigma_y.dot(&g.uy)],
        ];
        ginv[(0, 0)] * m[0][0] + ginv[(0, 1)] * (m[0][1] + m[1][0]) + ginv[(1, 1)] * m[1][1]
    }

    /// Ambient derivative of σ along σ.
    fn d_sigma_sigma(&self) -> V3 {
        self.sigma_x * self.c[0] + self.sigma_y * self.c[1]
    }
}

/// `∇_γ̇ v` at a boundary node.
fn d_gamma(geom: &GeometryField, v: &VariationField, bi: usize) -> V3 {
    let b = &geom.boundary[bi];
    let [x, y] = geom.grid.coords[b.node];
    let g = &geom.nodes[b.node];
    let u_phi_norm = (g.uy * x - g.ux * y).norm();
    (v.vy[b.node] * x - v.vx[b.node] * y) * (b.tau_sign / u_phi_norm)
}

struct Terms {
    list: Vec<(String, f64)>,
}

impl Terms {
    fn new() -> Self {
        Terms { list: Vec::new() }
    }

    fn push(&mut self, name: &str, value: f64) {
        self.list.push((name.to_string(), value));
    }

    fn total(&self) -> f64 {
        let mut s = KahanSum::new();
        for (_, v) in &self.list {
            s.add(*v);
        }
        s.value()
    }
}

fn area_terms(geom: &GeometryField, v: &VariationField, h: f64, t: &mut Terms) {
    let sp: Vec<Split> = (0..geom.nodes.len()).map(|i| split(geom, v, i)).collect();
    // The pair ⟨−Δ^⊥s, s⟩ + boundary ⟨∇_n s, s⟩ is evaluated as ∫|∇^⊥s|².
    t.push("normal_gradient", geom.integrate(|i, _| sp[i].grad_sq(geom, i)));
    t.push("s_H_times_s_H_minus_h", geom.integrate(|i, g| sp[i].f * sp[i].f * g.h_sc * (g.h_sc - h)));
    t.push("A_sigma_sigma_H_minus_h", geom.integrate(|i, g| g.second_form(&sp[i].sigma, &sp[i].sigma) * (g.h_sc - h)));
    t.push("minus_s_A_squared", geom.integrate(|i, g| -sp[i].f * sp[i].f * g.a_norm2));
    t.push("grad_sigma_s_H_minus_h", geom.integrate(|i, g| 2.0 * sp[i].df_sigma() * (g.h_sc - h)));
    t.push("bdy_div_sigma_sigma_n", geom.integrate_boundary(|b| {
        let s = &sp[b.node];
        s.div_sigma(geom, b.node) * s.sigma.dot(&b.n)
    }));
    t.push("bdy_s_h_minus_2H_sigma_n", geom.integrate_boundary(|b| {
        let s = &sp[b.node];
        s.f * (h - 2.0 * geom.nodes[b.node].h_sc) * s.sigma.dot(&b.n)
    }));
    t.push("bdy_minus_2_grad_sigma_s_n", geom.integrate_boundary(|b| {
        let s = &sp[b.node];
        let g = &geom.nodes[b.node];
        let dnu = g.nu_x * s.c[0] + g.nu_y * s.c[1];
        -2.0 * s.f * dnu.dot(&b.n)
    }));
    t.push("bdy_minus_grad_sigma_sigma_n", geom.integrate_boundary(|b| {
        -sp[b.node].d_sigma_sigma().dot(&b.n)
    }));
}

fn volume_terms(geom: &GeometryField, v: &VariationField, p: &HessianParams, t: &mut Terms) {
    let h = p.h;
    let sp: Vec<Split> = (0..geom.nodes.len()).map(|i| split(geom, v, i)).collect();
    t.push("vol_dh_s_squared", geom.integrate(|i, _| p.dh_normal * sp[i].f * sp[i].f));
    t.push("vol_minus_2_grad_sigma_s_h", geom.integrate(|i, _| -2.0 * h * sp[i].df_sigma()));
    t.push("vol_minus_A_sigma_sigma_h", geom.integrate(|i, g| -h * g.second_form(&sp[i].sigma, &sp[i].sigma)));
    t.push("vol_minus_h_s_squared_H", geom.integrate(|i, g| -h * sp[i].f * sp[i].f * g.h_sc));
    t.push("vol_bdy_h_s_sigma_n", geom.integrate_boundary(|b| {
        let s = &sp[b.node];
        h * s.f * s.sigma.dot(&b.n)
    }));
}

fn wetting_tensorial(geom: &GeometryField, v: &VariationField, p: &HessianParams, t: &mut Terms) {
    let (ct, gc) = (p.theta.cos(), V3::from(p.grad_cos_theta));
    t.push("wet_grad_cos_theta", geom.integrate_boundary(|b| {
        let w = v.v[b.node];
        -gc.dot(&w) * w.dot(&b.nu_hat)
    }));
    let dg: Vec<V3> = (0..geom.boundary.len()).map(|bi| d_gamma(geom, v, bi)).collect();
    let mut a = KahanSum::new();
    let mut c = KahanSum::new();
    for (bi, b) in geom.boundary.iter().enumerate() {
        let w = v.v[b.node];
        a.add(ct * w.dot(&b.gamma_dot) * dg[bi].dot(&b.nu_hat) * b.ds);
        c.add(-ct * w.dot(&b.nu_hat) * dg[bi].dot(&b.gamma_dot) * b.ds);
    }
    t.push("wet_v_gamma_dgamma_v_nuhat", a.value());
    t.push("wet_minus_v_nuhat_dgamma_v_gamma", c.value());
}

/// Final simplified boundary form of the wetting Hessian.
fn wetting_simplified(geom: &GeometryField, v: &VariationField, p: &HessianParams) -> f64 {
    let ct = p.theta.cos();
    let gc = V3::from(p.grad_cos_theta);
    let np = geom.grid.n_phi();
    let d = periodic_diff_matrix(np);
    let mut acc = KahanSum::new();
    for ring in geom.boundary.chunks(np) {
        let ratio: Vec<f64> = ring.iter().map(|b| ct / b.cos_alpha).collect();
        for (k, b) in ring.iter().enumerate() {
            let g = &geom.nodes[b.node];
            let w = v.v[b.node];
            let sigma = w - g.nu * w.dot(&g.nu);
            let dratio: f64 = (0..np).map(|m| d[(k, m)] * ratio[m]).sum::<f64>() * b.tau_sign
                / (b.ds / geom.grid.dphi());
            let val = -gc.dot(&w) * w.dot(&b.nu_hat)
                - dratio * sigma.dot(&b.gamma_dot) * sigma.dot(&b.n)
                - ct * b.sin_alpha / b.cos_alpha * b.am_tt * w.norm_squared();
            acc.add(val * b.ds);
        }
    }
    acc.value()
}

/// `⟨A(n,n),ν⟩` for the unit normal `ν = sin α ν̂ − cos α N`, the normal in
/// which the capillary Robin coefficient is written. It is opposite to the
/// sampled ν, for which `ν = cos α N − sin α ν̂`.
pub fn capillary_frame_a_nn(b: &crate::geometry::BoundaryGeometry) -> f64 {
    -b.a_nn
}

fn cmc_cap_terms(geom: &GeometryField, v: &VariationField, p: &HessianParams, t: &mut Terms) {
    let (ct, st) = (p.theta.cos(), p.theta.sin());
    let sp: Vec<Split> = (0..geom.nodes.len()).map(|i| split(geom, v, i)).collect();
    t.push("normal_gradient", geom.integrate(|i, _| sp[i].grad_sq(geom, i)));
    t.push("minus_s_A_squared", geom.integrate(|i, g| -sp[i].f * sp[i].f * g.a_norm2));
    t.push("bdy_cot_theta_A_nn", geom.integrate_boundary(|b| {
        ct / st * capillary_frame_a_nn(b) * sp[b.node].f.powi(2)
    }));
    t.push("bdy_A_dM_nuhat_over_sin_theta", geom.integrate_boundary(|b| b.am_nn / st * sp[b.node].f.powi(2)));
}

fn energy_terms(geom: &GeometryField, v: &VariationField, h: f64, t: &mut Terms) {
    let mut grad = KahanSum::new();
    let mut vol = KahanSum::new();
    for (i, g) in geom.nodes.iter().enumerate() {
        let w = geom.grid.weights[i];
        grad.add((v.vx[i].norm_squared() + v.vy[i].norm_squared()) * w);
        let det1 = v.v[i].dot(&v.vx[i].cross(&g.uy));
        let det2 = v.v[i].dot(&g.ux.cross(&v.vy[i]));
        vol.add(h * geom.orientation * (det1 + det2) * w);
    }
    t.push("energy_gradient_v", grad.value());
    t.push("energy_h_vol", vol.value());
}

pub fn analytic_hessian(
    formula: HessianFormula,
    geom: &GeometryField,
    v: &VariationField,
    p: &HessianParams,
) -> Result<HessianValue> {
    let mut t = Terms::new();
    let mut variants = Vec::new();
    match formula {
        HessianFormula::Area => area_terms(geom, v, 0.0, &mut t),
        HessianFormula::Volume => volume_terms(geom, v, p, &mut t),
        HessianFormula::Wetting => {
            wetting_tensorial(geom, v, p, &mut t);
            variants.push(("simplified".to_string(), wetting_simplified(geom, v, p)));
        }
        HessianFormula::Combined => {
            area_terms(geom, v, p.h, &mut t);
            t.push("vol_dh_s_squared", geom.integrate(|i, g| {
                let f = v.v[i].dot(&g.nu);
                p.dh_normal * f * f
            }));
            wetting_tensorial(geom, v, p, &mut t);
        }
        HessianFormula::CmcCap => {
            let crit = criticality_residuals(geom, p.h, p.theta);
            if crit.mean_curvature > 1e-6 * geom.area().max(1.0) || crit.contact_angle > 1e-6 {
                return Err(Error::Precondition(format!(
                    "surface is not {}-cmc {}-capillary (residuals {:.2e}, {:.2e})",
                    p.h, p.theta, crit.mean_curvature, crit.contact_angle
                )));
            }
            cmc_cap_terms(geom, v, p, &mut t);
        }
        HessianFormula::EnergyMod => {
            if geom.conformality_residual > 1e-8 {
                return Err(Error::Precondition("ENERGY_MOD needs a conformal chart".into()));
            }
            energy_terms(geom, v, p.h, &mut t);
            let st = p.theta.sin();
            t.push("bdy_minus_sin_theta_A_dM_tt_v2", geom.integrate_boundary(|b| {
                -st * b.am_tt * v.v[b.node].norm_squared()
            }));
            let mut with_wetting = Terms::new();
            energy_terms(geom, v, p.h, &mut with_wetting);
            wetting_tensorial(geom, v, p, &mut with_wetting);
            variants.push(("energy_volume_wetting".to_string(), with_wetting.total()));
        }
    }
    Ok(HessianValue { formula, value: t.total(), terms: t.list, variants })
}

/// FD oracle value for one formula together with the family used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub linear: f64,
    pub cosine: f64,
    pub fd_error: f64,
}

/// `Γ''(0)` per boundary node by Richardson differences.
fn boundary_acceleration(fam: &VariationFamily, t0: f64) -> Vec<V3> {
    let second = |node: usize, t: f64| {
        let p = fam.boundary_point(node, t).0;
        let m = fam.boundary_point(node, -t).0;
        let z = fam.boundary_point(node, 0.0).0;
        (p - z * 2.0 + m) / (t * t)
    };
    fam.geom
        .boundary
        .iter()
        .map(|b| {
            let c = second(b.node, t0);
            let f = second(b.node, 0.5 * t0);
            f + (f - c) / 3.0
        })
        .collect()
}

fn oracle_for_family(
    formula: HessianFormula,
    fam: &VariationFamily,
    p: &HessianParams,
) -> Result<(f64, f64)> {
    let geom = fam.geom;
    let t0 = default_step(fam);
    let w = fam.acceleration();
    let gamma2 = boundary_acceleration(fam, t0);
    let mut x = VariationField::zero(geom);
    for (b, a) in geom.boundary.iter().zip(&gamma2) {
        x.v[b.node] = *a;
    }
    let second = |id: FunctionalId| fd_scalar(|t| functional_along_family(&id, fam, t), t0, 2);
    let mut value = 0.0;
    let mut err = 0.0;
    let mut add = |d: super::fd::FdEstimate, correction: f64| {
        value += d.value - correction;
        err += d.error;
    };
    let use_area = matches!(formula, HessianFormula::Area | HessianFormula::Combined | HessianFormula::CmcCap);
    let use_energy = formula == HessianFormula::EnergyMod;
    let use_volume = !matches!(formula, HessianFormula::Area | HessianFormula::Wetting) && p.h != 0.0;
    let use_wetting = !matches!(formula, HessianFormula::Area | HessianFormula::Volume);
    if use_area {
        add(second(FunctionalId::area())?, first_variation_area(geom, w));
    }
    if use_energy {
        add(second(FunctionalId::energy())?, first_variation_energy(geom, w));
    }
    if use_volume {
        add(second(FunctionalId::volume(p.h))?, first_variation_volume(geom, w, p.h));
    }
    if use_wetting && geom.ambient.has_boundary() {
        let id = FunctionalId::new(crate::functionals::FunctionalTag::WettingTheta, 0.0, p.theta);
        let d = fd_scalar(|t| functional_along_family(&id, fam, t), t0, 2)?;
        add(d, first_variation_wetting(geom, &x, p.theta));
    }
    if formula == HessianFormula::CmcCap {
        value += crate::quadrature::ksum(
            geom.boundary.iter().zip(&gamma2).map(|(b, a)| b.sin_alpha * a.dot(&b.big_n) * b.ds),
        );
    }
    Ok((value, err))
}

/// Hessian from finite differences of the functionals along two families
/// with velocity `v`, minus the first variation in the family's acceleration.
pub fn hessian_oracle(
    formula: HessianFormula,
    geom: &GeometryField,
    v: &VariationField,
    p: &HessianParams,
) -> Result<OracleValue> {
    let lin = VariationFamily::new(geom, v.clone(), Profile::Linear);
    let cos = VariationFamily::new(geom, v.clone(), Profile::Cosine);
    let (l, el) = oracle_for_family(formula, &lin, p)?;
    let (c, ec) = oracle_for_family(formula, &cos, p)?;
    Ok(OracleValue { linear: l, cosine: c, fd_error: el.max(ec) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianCheck {
    pub formula: HessianFormula,
    pub analytic: HessianValue,
    pub oracle: OracleValue,
    pub abs_residual: f64,
    pub rel_residual: f64,
    /// Residuals of the alternative forms against the oracle.
    pub variant_residuals: Vec<(String, f64)>,
}

impl HessianCheck {
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.rel_residual <= rel_tol
    }
}

fn rel(a: f64, o: f64, floor: f64) -> f64 {
    (a - o).abs() / o.abs().max(a.abs()).max(floor)
}

pub fn hessian_oracle_check(
    formula: HessianFormula,
    geom: &GeometryField,
    v: &VariationField,
    p: &HessianParams,
) -> Result<HessianCheck> {
    if v.tangency_residual > geom.options.tolerances.boundary {
        return Err(Error::TangencyViolation(v.tangency_residual));
    }
    let analytic = analytic_hessian(formula, geom, v, p)?;
    let oracle = hessian_oracle(formula, geom, v, p)?;
    // Residuals below this are indistinguishable from FD noise.
    let floor = 1e-6 * (1.0 + v.max_norm().powi(2) * geom.area());
    let dev = (analytic.value - oracle.linear).abs().max((analytic.value - oracle.cosine).abs());
    let scale = oracle.linear.abs().max(analytic.value.abs()).max(floor);
    let variant_residuals = analytic
        .variants
        .iter()
        .map(|(n, x)| (n.clone(), rel(*x, oracle.linear, floor)))
        .collect();
    Ok(HessianCheck {
        formula,
        abs_residual: dev,
        rel_residual: dev / scale,
        analytic,
        oracle,
        variant_residuals,
    })
}
