use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::griddiff::gradient_xy;
use crate::geometry::{GeometryField, Topology, V3};

/// Scalar function on the parameter domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalarRecipe {
    Constant { value: f64 },
    /// `Σ c x^i y^j` as `(i, j, c)`.
    Polynomial { terms: Vec<(u32, u32, f64)> },
    /// Values per node; derivatives by grid differentiation.
    Nodal { values: Vec<f64> },
}

/// Recipe for an ambient vector field along the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldRecipe {
    Zero,
    /// Component-wise polynomials in the parameters: `(component, i, j, c)`
    /// contributes `c x^i y^j e_component`.
    Polynomial { terms: Vec<(usize, u32, u32, f64)> },
    /// `f ν`.
    NormalScalar { f: ScalarRecipe },
    Translation { direction: [f64; 3] },
    /// `ω × (p − center)`.
    Rotation {
        axis: [f64; 3],
        #[serde(default)]
        center: [f64; 3],
    },
    /// Sum of seeded plane waves in ambient coordinates.
    RandomSmooth {
        seed: u64,
        #[serde(default = "default_modes")]
        modes: usize,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// The ambient gradient field `∇Φ`, equal to `N` on `∂M`.
    AmbientNormal,
}

fn default_modes() -> usize {
    4
}

fn one() -> f64 {
    1.0
}

/// Ambient vector field along the surface with its first parameter
/// derivatives and the normal/tangential split.
#[derive(Debug, Clone)]
pub struct VariationField {
    pub v: Vec<V3>,
    pub vx: Vec<V3>,
    pub vy: Vec<V3>,
    /// `⟨v, ν⟩`.
    pub s_sc: Vec<f64>,
    /// Tangential components in the orthonormal frame `(e₁, e₂)`.
    pub sigma: Vec<[f64; 2]>,
    /// `g = σ¹ − iσ²`, so `σ = Re(g) e₁ − Im(g) e₂`.
    pub g: Vec<Complex64>,
    /// `max |⟨v, N⟩|` over boundary nodes.
    pub tangency_residual: f64,
}

/// Orthonormal tangent frame `e₁ = u_x/|u_x|`, `e₂` from Gram–Schmidt.
pub fn tangent_frame(ux: &V3, uy: &V3) -> (V3, V3) {
    let e1 = ux / ux.norm();
    let e2 = uy - e1 * e1.dot(uy);
    (e1, e2 / e2.norm())
}

fn poly(terms: &[(u32, u32, f64)], x: f64, y: f64) -> [f64; 3] {
    let p = |b: f64, k: u32| if k == 0 { 1.0 } else { b.powi(k as i32) };
    let mut out = [0.0; 3];
    for &(i, j, c) in terms {
        out[0] += c * p(x, i) * p(y, j);
        if i > 0 {
            out[1] += c * i as f64 * p(x, i - 1) * p(y, j);
        }
        if j > 0 {
            out[2] += c * j as f64 * p(x, i) * p(y, j - 1);
        }
    }
    out
}

/// Ambient field value and Jacobian at `p`.
fn ambient_field(recipe: &FieldRecipe, geom: &GeometryField, p: &V3) -> Option<(V3, Matrix3<f64>)> {
    match recipe {
        FieldRecipe::Translation { direction } => Some((V3::from(*direction), Matrix3::zeros())),
        FieldRecipe::Rotation { axis, center } => {
            let w = V3::from(*axis);
            Some((w.cross(&(p - V3::from(*center))), w.cross_matrix()))
        }
        FieldRecipe::AmbientNormal => {
            Some((geom.ambient.gradient(p), geom.ambient.hessian(p)))
        }
        FieldRecipe::RandomSmooth { .. } => None,
        _ => None,
    }
}

struct Wave {
    a: V3,
    k: V3,
    phase: f64,
}

fn random_waves(seed: u64, modes: usize, amplitude: f64) -> Vec<Wave> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v3 = |lo: f64, hi: f64| {
        V3::new(rng.random_range(lo..hi), rng.random_range(lo..hi), rng.random_range(lo..hi))
    };
    let waves: Vec<(V3, V3)> = (0..modes).map(|_| (v3(-1.0, 1.0), v3(-1.5, 1.5))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    waves
        .into_iter()
        .map(|(a, k)| Wave {
            a: a * (amplitude / modes as f64),
            k,
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        })
        .collect()
}

/// Cutoff equal to one on every boundary ring, used to blend the
/// boundary projection into the interior.
fn cutoff(geom: &GeometryField, x: f64, y: f64) -> (f64, f64, f64) {
    let r = x.hypot(y);
    let (q, dq) = match geom.grid.spec.topology {
        Topology::DiskPolar => (r, 1.0),
        Topology::AnnulusCylindrical => {
            let a = geom.grid.spec.annulus_inner;
            ((2.0 * r - 1.0 - a) / (1.0 - a), 2.0 / (1.0 - a))
        }
    };
    let psi = q.powi(4);
    if r == 0.0 {
        return (psi, 0.0, 0.0);
    }
    let dpsi = 4.0 * q.powi(3) * dq / r;
    (psi, dpsi * x, dpsi * y)
}

/// Raw field values and derivatives per node, before projection.
fn raw_field(recipe: &FieldRecipe, geom: &GeometryField) -> (Vec<V3>, Vec<V3>, Vec<V3>) {
    let n = geom.nodes.len();
    let mut v = vec![V3::zeros(); n];
    let mut vx = vec![V3::zeros(); n];
    let mut vy = vec![V3::zeros(); n];
    match recipe {
        FieldRecipe::Zero => {}
        FieldRecipe::Polynomial { terms } => {
            for (i, &[x, y]) in geom.grid.coords.iter().enumerate() {
                for &(c, a, b, coef) in terms {
                    let [p, px, py] = poly(&[(a, b, coef)], x, y);
                    v[i][c] += p;
                    vx[i][c] += px;
                    vy[i][c] += py;
                }
            }
        }
        FieldRecipe::NormalScalar { f } => {
            let (fv, fx, fy) = scalar_values(f, geom);
            for (i, g) in geom.nodes.iter().enumerate() {
                v[i] = g.nu * fv[i];
                vx[i] = g.nu * fx[i] + g.nu_x * fv[i];
                vy[i] = g.nu * fy[i] + g.nu_y * fv[i];
            }
        }
        FieldRecipe::RandomSmooth { seed, modes, amplitude } => {
            let waves = random_waves(*seed, *modes, *amplitude);
            for (i, g) in geom.nodes.iter().enumerate() {
                for w in &waves {
                    let arg = w.k.dot(&g.u) + w.phase;
                    v[i] += w.a * arg.sin();
                    vx[i] += w.a * (arg.cos() * w.k.dot(&g.ux));
                    vy[i] += w.a * (arg.cos() * w.k.dot(&g.uy));
                }
            }
        }
        _ => {
            for (i, g) in geom.nodes.iter().enumerate() {
                let (val, jac) = ambient_field(recipe, geom, &g.u).expect("ambient recipe");
                v[i] = val;
                vx[i] = jac * g.ux;
                vy[i] = jac * g.uy;
            }
        }
    }
    (v, vx, vy)
}

/// Scalar values and parameter derivatives per node.
pub fn scalar_values(f: &ScalarRecipe, geom: &GeometryField) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = geom.nodes.len();
    match f {
        ScalarRecipe::Constant { value } => (vec![*value; n], vec![0.0; n], vec![0.0; n]),
        ScalarRecipe::Polynomial { terms } => {
            let mut out = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            for (i, &[x, y]) in geom.grid.coords.iter().enumerate() {
                let [p, px, py] = poly(terms, x, y);
                out.0[i] = p;
                out.1[i] = px;
                out.2[i] = py;
            }
            out
        }
        ScalarRecipe::Nodal { values } => {
            let (fx, fy) = gradient_xy(&geom.grid, values);
            (values.clone(), fx, fy)
        }
    }
}

/// Build a field from a recipe, projecting boundary rows onto `T∂M`.
pub fn make_variation(recipe: &FieldRecipe, geom: &GeometryField) -> VariationField {
    let (mut v, mut vx, mut vy) = raw_field(recipe, geom);
    if geom.ambient.has_boundary() {
        for (i, g) in geom.nodes.iter().enumerate() {
            let [x, y] = geom.grid.coords[i];
            let (psi, psi_x, psi_y) = cutoff(geom, x, y);
            let grad = geom.ambient.gradient(&g.u);
            let g2 = grad.norm_squared();
            if psi == 0.0 || g2 < 1e-300 {
                continue;
            }
            let hess = geom.ambient.hessian(&g.u);
            let vg = v[i].dot(&grad);
            let c = psi * vg / g2;
            let dc = |dpsi: f64, dv: &V3, dgrad: &V3| {
                dpsi * vg / g2 + psi * (dv.dot(&grad) + v[i].dot(dgrad)) / g2
                    - psi * vg * 2.0 * grad.dot(dgrad) / (g2 * g2)
            };
            let (gx, gy) = (hess * g.ux, hess * g.uy);
            let cx = dc(psi_x, &vx[i], &gx);
            let cy = dc(psi_y, &vy[i], &gy);
            vx[i] -= grad * cx + gx * c;
            vy[i] -= grad * cy + gy * c;
            v[i] -= grad * c;
        }
    }
    from_parts(geom, v, vx, vy)
}

/// Field from explicit values and derivatives, without projection.
pub fn from_parts(geom: &GeometryField, v: Vec<V3>, vx: Vec<V3>, vy: Vec<V3>) -> VariationField {
    let mut s_sc = Vec::with_capacity(v.len());
    let mut sigma = Vec::with_capacity(v.len());
    let mut g = Vec::with_capacity(v.len());
    for (i, node) in geom.nodes.iter().enumerate() {
        let s = v[i].dot(&node.nu);
        let (e1, e2) = tangent_frame(&node.ux, &node.uy);
        let sg = [v[i].dot(&e1), v[i].dot(&e2)];
        s_sc.push(s);
        sigma.push(sg);
        g.push(Complex64::new(sg[0], -sg[1]));
    }
    let tangency_residual = geom
        .boundary
        .iter()
        .map(|b| if geom.ambient.has_boundary() { v[b.node].dot(&b.big_n).abs() } else { 0.0 })
        .fold(0.0, f64::max);
    VariationField { v, vx, vy, s_sc, sigma, g, tangency_residual }
}

/// Field without projection.
pub fn make_variation_raw(recipe: &FieldRecipe, geom: &GeometryField) -> VariationField {
    let (v, vx, vy) = raw_field(recipe, geom);
    from_parts(geom, v, vx, vy)
}

impl VariationField {
    pub fn zero(geom: &GeometryField) -> Self {
        make_variation_raw(&FieldRecipe::Zero, geom)
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn max_norm(&self) -> f64 {
        self.v.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let m = |a: &Vec<V3>| a.iter().map(|v| v * c).collect::<Vec<_>>();
        VariationField {
            v: m(&self.v),
            vx: m(&self.vx),
            vy: m(&self.vy),
            s_sc: self.s_sc.iter().map(|s| s * c).collect(),
            sigma: self.sigma.iter().map(|s| [s[0] * c, s[1] * c]).collect(),
            g: self.g.iter().map(|g| g * c).collect(),
            tangency_residual: self.tangency_residual * c.abs(),
        }
    }

    pub fn add(&self, other: &Self, geom: &GeometryField) -> Self {
        let z = |a: &Vec<V3>, b: &Vec<V3>| a.iter().zip(b).map(|(p, q)| p + q).collect::<Vec<_>>();
        from_parts(geom, z(&self.v, &other.v), z(&self.vx, &other.vx), z(&self.vy, &other.vy))
    }

    /// Normal part `s = s_sc ν` as its own field.
    pub fn normal_part(&self, geom: &GeometryField) -> Self {
        let mut v = Vec::with_capacity(self.len());
        let mut vx = Vec::with_capacity(self.len());
        let mut vy = Vec::with_capacity(self.len());
        for (i, g) in geom.nodes.iter().enumerate() {
            let s = self.s_sc[i];
            let sx = self.vx[i].dot(&g.nu) + self.v[i].dot(&g.nu_x);
            let sy = self.vy[i].dot(&g.nu) + self.v[i].dot(&g.nu_y);
            v.push(g.nu * s);
            vx.push(g.nu * sx + g.nu_x * s);
            vy.push(g.nu * sy + g.nu_y * s);
        }
        from_parts(geom, v, vx, vy)
    }

    /// `max |⟨σ, n⟩ + cot α · s_sc|` over boundary nodes.
    pub fn cot_relation_residual(&self, geom: &GeometryField) -> f64 {
        geom.boundary
            .iter()
            .map(|b| {
                let sigma = self.v[b.node] - geom.nodes[b.node].nu * self.s_sc[b.node];
                (sigma.dot(&b.n) + b.cos_alpha / b.sin_alpha * self.s_sc[b.node]).abs()
            })
            .fold(0.0, f64::max)
    }
}
