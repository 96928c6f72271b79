//! P1 assembly of the Jacobi form `Q` and the energy form `Q_E`.

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use super::mesh::{triangle_rule, FeMesh, LinearBasis};
use super::sparse::{CsrMatrix, TripletBuilder};
use crate::error::{Error, Result};
use crate::geometry::{GeometryField, GridSpec, V3};
use crate::variation_lab::capillary_frame_a_nn;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QOptions {
    /// Include the `−|A|² f²` potential and the Robin term.
    pub curvature: bool,
    /// Added multiple of the mass matrix.
    pub shift: f64,
}

impl Default for QOptions {
    fn default() -> Self {
        QOptions { curvature: true, shift: 0.0 }
    }
}

/// Boundary treatment of `Q_E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QeVariant {
    /// `−sin θ ⟨A^{∂M}(γ̇,γ̇),N⟩ |v|²` on the boundary.
    #[default]
    Paper,
    /// Tensorial wetting line plus `sin θ ⟨A^{∂M}(v,v),N⟩`, the second
    /// derivative of `ℰ^{h,θ}` along paths that stay in `∂M`.
    Adapted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum FormKind {
    Jacobi,
    Energy { variant: QeVariant },
}

#[derive(Debug, Clone)]
pub enum DofMap {
    Scalar,
    /// Per vertex: first dof and the orthonormal directions it carries
    /// (three in the interior, `γ̇, ν̂` on `∂Σ`).
    Vector { offsets: Vec<usize>, bases: Vec<Vec<V3>> },
}

#[derive(Debug, Clone)]
pub struct AssembledForm {
    pub s: CsrMatrix,
    pub m: CsrMatrix,
    pub dofs: DofMap,
    pub mesh: FeMesh,
    pub kind: FormKind,
    /// Names of the terms that entered `S`.
    pub terms: Vec<String>,
    pub theta: f64,
    pub h: f64,
    pub grid: GridSpec,
}

impl AssembledForm {
    pub fn n(&self) -> usize {
        self.s.n
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.s.quad_form(x)
    }

    /// `‖S‖_max / ‖M‖_max`, the scale for null tolerances.
    pub fn scale(&self) -> f64 {
        self.s.max_abs() / self.m.max_abs()
    }

    /// Nodal interpolant of a scalar function of the parameters.
    pub fn interpolate_scalar(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.mesh
            .vertex_rphi
            .iter()
            .map(|&[r, p]| f(r * p.cos(), r * p.sin()))
            .collect()
    }

    /// Nodal interpolant of a vector field; boundary values are projected
    /// onto `T∂M`.
    pub fn interpolate_vector(&self, v: impl Fn(f64, f64) -> V3) -> Vec<f64> {
        let DofMap::Vector { offsets, bases } = &self.dofs else {
            return Vec::new();
        };
        let mut out = vec![0.0; self.n()];
        for (vi, &[r, p]) in self.mesh.vertex_rphi.iter().enumerate() {
            let w = v(r * p.cos(), r * p.sin());
            for (k, e) in bases[vi].iter().enumerate() {
                out[offsets[vi] + k] = w.dot(e);
            }
        }
        out
    }

    /// Ambient vector per vertex of a dof vector.
    pub fn vector_values(&self, x: &[f64]) -> Vec<V3> {
        match &self.dofs {
            DofMap::Scalar => Vec::new(),
            DofMap::Vector { offsets, bases } => bases
                .iter()
                .zip(offsets)
                .map(|(b, &o)| b.iter().enumerate().map(|(k, e)| e * x[o + k]).sum())
                .collect(),
        }
    }
}

fn check_inputs(geom: &GeometryField, theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= FRAC_PI_2 + 1e-15) {
        return Err(Error::InvalidParameter(format!("θ = {theta} outside (0, π/2]")));
    }
    if geom.conformality_residual > 1e-6 {
        return Err(Error::Precondition(format!(
            "assembly needs a conformal chart (residual {:.2e})",
            geom.conformality_residual
        )));
    }
    Ok(())
}

/// Per-element data shared by both forms.
struct Element {
    /// Distinct vertices and the summed basis of repeated corners.
    verts: Vec<usize>,
    /// `(∂_r, ∂_φ)` per distinct vertex.
    grad: Vec<[f64; 2]>,
    /// Per quadrature point: `(x, y)`, weight including `r`, basis values.
    points: Vec<([f64; 2], f64, Vec<f64>, [f64; 2])>,
    int_r: f64,
    int_inv_r: f64,
}

fn element(index: usize, tri: &super::mesh::Triangle) -> Result<Element> {
    let basis = LinearBasis::new(tri.rphi);
    if !(basis.area > 1e-14) {
        return Err(Error::DegenerateTriangle(index));
    }
    let mut verts: Vec<usize> = Vec::with_capacity(3);
    let mut slot = [0usize; 3];
    for (c, &v) in tri.v.iter().enumerate() {
        slot[c] = match verts.iter().position(|&w| w == v) {
            Some(p) => p,
            None => {
                verts.push(v);
                verts.len() - 1
            }
        };
    }
    let mut grad = vec![[0.0; 2]; verts.len()];
    for c in 0..3 {
        grad[slot[c]][0] += basis.grad[c][0];
        grad[slot[c]][1] += basis.grad[c][1];
    }
    let points = triangle_rule()
        .iter()
        .map(|(l, w)| {
            let [r, p] = basis.point(*l);
            let mut vals = vec![0.0; verts.len()];
            for c in 0..3 {
                vals[slot[c]] += l[c];
            }
            ([r * p.cos(), r * p.sin()], w * basis.area * r, vals, [r, p])
        })
        .collect();
    let merged = verts.len() < 3;
    Ok(Element {
        int_r: basis.int_r(),
        // Repeated pole corners make every ∂_φ vanish; the 1/r weight never enters.
        int_inv_r: if merged { 0.0 } else { basis.int_inv_r() },
        verts,
        grad,
        points,
    })
}

type Local = Vec<(usize, usize, f64)>;

fn par_elements<F>(mesh: &FeMesh, f: F) -> Result<(Local, Local)>
where
    F: Fn(&Element) -> (Local, Local) + Sync,
{
    let parts: Vec<Result<(Local, Local)>> = mesh
        .triangles
        .par_iter()
        .enumerate()
        .map(|(i, t)| element(i, t).map(|e| f(&e)))
        .collect();
    let mut s = Vec::new();
    let mut m = Vec::new();
    for p in parts {
        let (a, b) = p?;
        s.extend(a);
        m.extend(b);
    }
    Ok((s, m))
}

fn stiffness(e: &Element, a: usize, b: usize) -> f64 {
    e.grad[a][0] * e.grad[b][0] * e.int_r + e.grad[a][1] * e.grad[b][1] * e.int_inv_r
}

/// `(∂_x, ∂_y)` of each basis function at a quadrature point.
fn cartesian(e: &Element, rp: [f64; 2]) -> Vec<[f64; 2]> {
    let (c, s) = (rp[1].cos(), rp[1].sin());
    e.grad
        .iter()
        .map(|g| [c * g[0] - s / rp[0] * g[1], s * g[0] + c / rp[0] * g[1]])
        .collect()
}

/// Consistent edge mass for a density linear in φ: `(M_ii, M_ij, M_jj)`
/// weights for `(ρ_i, ρ_j)`.
fn edge_mass(dphi: f64, rho_i: f64, rho_j: f64) -> (f64, f64, f64) {
    (
        dphi * (3.0 * rho_i + rho_j) / 12.0,
        dphi * (rho_i + rho_j) / 12.0,
        dphi * (rho_i + 3.0 * rho_j) / 12.0,
    )
}

/// Robin coefficient `cot θ ⟨A(n,n),ν⟩ + ⟨A^{∂M}(ν̂,ν̂),N⟩ / sin θ`, with
/// `ν` the capillary-frame normal.
pub fn robin_coefficient(b: &crate::geometry::BoundaryGeometry, theta: f64) -> f64 {
    theta.cos() / theta.sin() * capillary_frame_a_nn(b) + b.am_nn / theta.sin()
}

pub fn assemble_q(geom: &GeometryField, theta: f64) -> Result<AssembledForm> {
    assemble_q_with(geom, theta, QOptions::default())
}

/// `Q(f,f) = ∫|∇f|² − |A|²f² + ∮ q f²` with mass `∫f²`.
pub fn assemble_q_with(geom: &GeometryField, theta: f64, opts: QOptions) -> Result<AssembledForm> {
    check_inputs(geom, theta)?;
    let mesh = FeMesh::new(&geom.grid);
    let curvature = opts.curvature;
    let (mut s_loc, m_loc) = par_elements(&mesh, |e| {
        let nv = e.verts.len();
        let mut s = Vec::with_capacity(nv * nv);
        let mut m = Vec::with_capacity(nv * nv);
        let pts: Vec<(f64, f64)> = e
            .points
            .iter()
            .map(|(xy, w, _, _)| {
                let g = geom.at(xy[0], xy[1]);
                (w * g.e2l, w * g.e2l * g.a_norm2)
            })
            .collect();
        for a in 0..nv {
            for b in 0..nv {
                let mut mass = 0.0;
                let mut pot = 0.0;
                for ((_, _, vals, _), (wm, wp)) in e.points.iter().zip(&pts) {
                    mass += wm * vals[a] * vals[b];
                    pot += wp * vals[a] * vals[b];
                }
                let mut val = stiffness(e, a, b) + opts.shift * mass;
                if curvature {
                    val -= pot;
                }
                s.push((e.verts[a], e.verts[b], val));
                m.push((e.verts[a], e.verts[b], mass));
            }
        }
        (s, m)
    })?;
    let mut terms = vec!["gradient".to_string()];
    if curvature {
        terms.push("minus_A_squared".into());
    }
    if opts.shift != 0.0 {
        terms.push(format!("shift {}", opts.shift));
    }
    if curvature && geom.ambient.has_boundary() {
        terms.push("robin_cot_theta_A_nn".into());
        terms.push("robin_A_dM_over_sin_theta".into());
        let dphi = geom.grid.dphi();
        let rho = |bi: usize| {
            let b = &geom.boundary[bi];
            robin_coefficient(b, theta) * b.ds / dphi
        };
        for ed in &mesh.boundary_edges {
            let (mii, mij, mjj) = edge_mass(ed.dphi, rho(ed.ba), rho(ed.bb));
            s_loc.extend([(ed.a, ed.a, mii), (ed.a, ed.b, mij), (ed.b, ed.a, mij), (ed.b, ed.b, mjj)]);
        }
    }
    let n = mesh.n_vertices;
    Ok(AssembledForm {
        s: build(n, s_loc),
        m: build(n, m_loc),
        dofs: DofMap::Scalar,
        mesh,
        kind: FormKind::Jacobi,
        terms,
        theta,
        h: geom.mean_h(),
        grid: geom.grid.spec.clone(),
    })
}

fn build(n: usize, entries: Local) -> CsrMatrix {
    let mut t = TripletBuilder::new(n);
    for (i, j, v) in entries {
        t.add(i, j, v);
    }
    t.build()
}

fn skew(x: &V3) -> Matrix3<f64> {
    // C_ij = det(e_i, e_j, x)
    Matrix3::new(0.0, x[2], -x[1], -x[2], 0.0, x[0], x[1], -x[0], 0.0)
}

pub fn assemble_qe(geom: &GeometryField, h: f64, theta: f64) -> Result<AssembledForm> {
    assemble_qe_with(geom, h, theta, QeVariant::Paper)
}

/// Vector form `Q_E(v,v) = ∫|dv|² + h Vol(v,∇_{u_x}v,u_y) + h Vol(v,u_x,∇_{u_y}v)`
/// plus the boundary term of `variant`, on variations tangent to `∂M`
/// along `∂Σ`.
pub fn assemble_qe_with(
    geom: &GeometryField,
    h: f64,
    theta: f64,
    variant: QeVariant,
) -> Result<AssembledForm> {
    check_inputs(geom, theta)?;
    let mesh = FeMesh::new(&geom.grid);
    let ho = h * geom.orientation;
    // Blocks in ambient coordinates: (vertex a, vertex b, 3×3).
    let blocks: Vec<Result<(Vec<(usize, usize, Matrix3<f64>)>, Vec<(usize, usize, f64)>)>> = mesh
        .triangles
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let e = element(i, t)?;
            let nv = e.verts.len();
            let mut s = Vec::with_capacity(nv * nv);
            let mut m = Vec::with_capacity(nv * nv);
            let pts: Vec<_> = e
                .points
                .iter()
                .map(|(xy, w, vals, rp)| {
                    let g = geom.at(xy[0], xy[1]);
                    (*w, w * g.e2l, vals, cartesian(&e, *rp), skew(&g.ux), skew(&g.uy))
                })
                .collect();
            for a in 0..nv {
                for b in 0..nv {
                    let mut mass = 0.0;
                    let mut hv = Matrix3::zeros();
                    for (w, wm, vals, d, cx, cy) in &pts {
                        mass += wm * vals[a] * vals[b];
                        hv += (cy * d[b][0] - cx * d[b][1]) * (w * vals[a]);
                    }
                    let blk = Matrix3::identity() * stiffness(&e, a, b) + hv * ho;
                    s.push((e.verts[a], e.verts[b], blk));
                    m.push((e.verts[a], e.verts[b], mass));
                }
            }
            Ok((s, m))
        })
        .collect();
    let mut s_blocks = Vec::new();
    let mut m_scalar = Vec::new();
    for b in blocks {
        let (s, m) = b?;
        s_blocks.extend(s);
        m_scalar.extend(m);
    }
    let mut terms = vec!["gradient".to_string()];
    if h != 0.0 {
        terms.push("h_volume".into());
    }
    let (ct, st) = (theta.cos(), theta.sin());
    let dphi = geom.grid.dphi();
    if geom.ambient.has_boundary() {
        let tensor = |bi: usize| -> Matrix3<f64> {
            let b = &geom.boundary[bi];
            let len = b.ds / dphi;
            match variant {
                QeVariant::Paper => Matrix3::identity() * (-st * b.am_tt * len),
                QeVariant::Adapted => {
                    let (t, n) = (b.gamma_dot, b.nu_hat);
                    (t * t.transpose() * b.am_tt
                        + (t * n.transpose() + n * t.transpose()) * b.am_tn
                        + n * n.transpose() * b.am_nn)
                        * (st * len)
                }
            }
        };
        for ed in &mesh.boundary_edges {
            let (ti, tj) = (tensor(ed.ba), tensor(ed.bb));
            let w = ed.dphi / 12.0;
            s_blocks.push((ed.a, ed.a, (ti * 3.0 + tj) * w));
            s_blocks.push((ed.a, ed.b, (ti + tj) * w));
            s_blocks.push((ed.b, ed.a, (ti + tj) * w));
            s_blocks.push((ed.b, ed.b, (ti + tj * 3.0) * w));
        }
        match variant {
            QeVariant::Paper => terms.push("bdy_minus_sin_theta_A_dM_tt_v2".into()),
            QeVariant::Adapted => {
                terms.push("bdy_sin_theta_A_dM_v_v".into());
                terms.push("wetting_tensorial".into());
                // cos θ ∮ ⟨v,γ̇⟩⟨∇_γ̇v,ν̂⟩ − ⟨v,ν̂⟩⟨∇_γ̇v,γ̇⟩, trapezoidal per edge
                for ed in &mesh.boundary_edges {
                    let ends = [(ed.a, ed.ba), (ed.b, ed.bb)];
                    for &(vx, bi) in &ends {
                        let b = &geom.boundary[bi];
                        let (t, n) = (b.gamma_dot, b.nu_hat);
                        // v_e (vertex vx) paired with D = (v_b − v_a) tau / dφ
                        let k = t * n.transpose() - n * t.transpose();
                        let c = ct * b.tau_sign * 0.5;
                        s_blocks.push((vx, ed.b, k * c));
                        s_blocks.push((vx, ed.a, -k * c));
                    }
                }
            }
        }
    }
    // Dof layout
    let boundary_vertex: Vec<Option<usize>> = {
        let mut bv = vec![None; mesh.n_vertices];
        if geom.ambient.has_boundary() {
            for (bi, b) in geom.boundary.iter().enumerate() {
                bv[mesh.vertex_of(b.node)] = Some(bi);
            }
        }
        bv
    };
    let mut offsets = Vec::with_capacity(mesh.n_vertices);
    let mut bases = Vec::with_capacity(mesh.n_vertices);
    let mut n = 0;
    for bv in &boundary_vertex {
        offsets.push(n);
        let basis = match bv {
            Some(bi) => vec![geom.boundary[*bi].gamma_dot, geom.boundary[*bi].nu_hat],
            None => vec![V3::x(), V3::y(), V3::z()],
        };
        n += basis.len();
        bases.push(basis);
    }
    let mut st_b = TripletBuilder::new(n);
    // Entering each block and its transpose with weight ½ makes S exactly symmetric.
    for (a, b, blk) in s_blocks {
        for (p, ea) in bases[a].iter().enumerate() {
            for (q, eb) in bases[b].iter().enumerate() {
                let v = 0.5 * ea.dot(&(blk * eb));
                st_b.add(offsets[a] + p, offsets[b] + q, v);
                st_b.add(offsets[b] + q, offsets[a] + p, v);
            }
        }
    }
    let mut mt = TripletBuilder::new(n);
    for (a, b, v) in m_scalar {
        for (p, ea) in bases[a].iter().enumerate() {
            for (q, eb) in bases[b].iter().enumerate() {
                let d = ea.dot(eb);
                if d != 0.0 {
                    mt.add(offsets[a] + p, offsets[b] + q, v * d);
                }
            }
        }
    }
    Ok(AssembledForm {
        s: st_b.build(),
        m: mt.build(),
        dofs: DofMap::Vector { offsets, bases },
        mesh,
        kind: FormKind::Energy { variant },
        terms,
        theta,
        h,
        grid: geom.grid.spec.clone(),
    })
}
