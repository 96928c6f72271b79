//! Least-squares solution of the conformal reparametrisation problem: find
//! a tangential σ with `η(s + σ) = 0` and `⟨σ, n⟩ = −cot θ ⟨s, ν⟩` on ∂Σ.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::deficit::conformal_deficit;
use super::field::{from_parts, tangent_frame, VariationField};
use super::griddiff::GridDiff;
use crate::error::{Error, Result};
use crate::geometry::{GeometryField, V3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReparamRecord {
    pub unknowns: usize,
    pub equations: usize,
    /// `max |η(s + σ)|` over nodes.
    pub pde_residual: f64,
    /// `(4∫|η(s+σ)|²)^{1/2}`.
    pub pde_l2: f64,
    /// `max |⟨σ, n⟩ + cot θ s_sc|` on ∂Σ.
    pub boundary_residual: f64,
    /// `max |⟨s + σ, N⟩|` on ∂Σ.
    pub tangency_residual: f64,
    /// `4∫|μ(s + σ)|²`.
    pub deficit: f64,
    /// `4∫|μ(s)|²` before the solve.
    pub deficit_before: f64,
    /// Ratio of extreme pivots of the normal-equation Cholesky factor, squared.
    pub condition_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct ConformalReparam {
    pub sigma: VariationField,
    /// `s + σ`.
    pub total: VariationField,
    pub record: ReparamRecord,
}

/// Sparse row: `(column, value)` pairs.
type Row = Vec<(usize, f64)>;

pub fn solve_conformal_reparam(geom: &GeometryField, s: &VariationField, theta: f64) -> Result<ConformalReparam> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!("θ = {theta}")));
    }
    if geom.conformality_residual > 1e-8 {
        return Err(Error::Precondition("conformal reparametrisation needs a conformal chart".into()));
    }
    if geom.ambient.has_boundary() {
        let dev = geom.boundary.iter().map(|b| (b.cos_alpha - theta.cos()).abs()).fold(0.0, f64::max);
        if dev > 1e-6 {
            return Err(Error::Precondition(format!("contact angle deviates from θ by {dev:.2e}")));
        }
    }
    let grid = &geom.grid;
    let n = grid.n_nodes();
    let (nr, np) = (grid.n_r(), grid.n_phi());
    let s = s.normal_part(geom);
    let cot = theta.cos() / theta.sin();

    // Unknown directions per node and the fixed boundary part σ₀.
    let mut first = vec![0usize; n + 1];
    let mut dirs: Vec<Vec<V3>> = Vec::with_capacity(n);
    let mut sigma0 = vec![V3::zeros(); n];
    let mut bdy = vec![None; n];
    if geom.ambient.has_boundary() {
        for (bi, b) in geom.boundary.iter().enumerate() {
            bdy[b.node] = Some(bi);
        }
    }
    for i in 0..n {
        let g = &geom.nodes[i];
        let d = match bdy[i] {
            Some(bi) => {
                let b = &geom.boundary[bi];
                sigma0[i] = b.n * (-cot * s.s_sc[i]);
                vec![b.gamma_dot]
            }
            None => {
                let (e1, e2) = tangent_frame(&g.ux, &g.uy);
                vec![e1, e2]
            }
        };
        first[i + 1] = first[i] + d.len();
        dirs.push(d);
    }
    let nu = first[n];

    let diff = GridDiff::new(grid);
    let eta_s = conformal_deficit(geom, &s);
    let mut rows: Vec<Row> = Vec::with_capacity(2 * n);
    let mut rhs = Vec::with_capacity(2 * n);
    for i in 0..n {
        let g = &geom.nodes[i];
        let (j, k) = (i / np, i % np);
        let [x, y] = grid.coords[i];
        let r = x.hypot(y);
        let (c, sn) = (x / r, y / r);
        // (node m, ∂_x weight, ∂_y weight)
        let mut stencil: Vec<(usize, f64, f64)> = Vec::with_capacity(nr + np);
        for m in 0..nr {
            let w = diff.dr[(j, m)];
            if w != 0.0 {
                stencil.push((m * np + k, c * w, sn * w));
            }
        }
        for m in 0..np {
            let w = diff.dphi[(k, m)] / r;
            if w != 0.0 {
                stencil.push((j * np + m, -sn * w, c * w));
            }
        }
        let weight = 2.0 * (grid.weights[i] * g.e2l).sqrt();
        let scale = 0.5 / g.e2l * weight;
        let mut re: Row = Vec::new();
        let mut im: Row = Vec::new();
        let mut fixed = (0.0, 0.0);
        let coef = |e: &V3, dx: f64, dy: f64| {
            let (ax, ay) = (e.dot(&g.ux), e.dot(&g.uy));
            (scale * (dx * ax - dy * ay), -scale * (dx * ay + dy * ax))
        };
        for &(m, dx, dy) in &stencil {
            for (p, e) in dirs[m].iter().enumerate() {
                let (a, b) = coef(e, dx, dy);
                re.push((first[m] + p, a));
                im.push((first[m] + p, b));
            }
            if bdy[m].is_some() {
                let (a, b) = coef(&sigma0[m], dx, dy);
                fixed.0 += a;
                fixed.1 += b;
            }
        }
        rows.push(re);
        rows.push(im);
        rhs.push(-(eta_s.eta[i].re * weight) - fixed.0);
        rhs.push(-(eta_s.eta[i].im * weight) - fixed.1);
    }

    // Normal equations from the sparse rows.
    let mut ata = DMatrix::<f64>::zeros(nu, nu);
    let mut atb = DVector::<f64>::zeros(nu);
    for (row, b) in rows.iter().zip(&rhs) {
        for &(p, a) in row {
            atb[p] += a * b;
            for &(q, c) in row {
                ata[(p, q)] += a * c;
            }
        }
    }
    let diag_max = (0..nu).map(|p| ata[(p, p)]).fold(0.0, f64::max);
    let eps = 1e-12 * diag_max.max(f64::MIN_POSITIVE);
    for p in 0..nu {
        ata[(p, p)] += eps;
    }
    let chol = ata
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Factorization("normal equations not positive definite".into()))?;
    let mut z = chol.solve(&atb);
    // One refinement step against the regularised system.
    let resid = &atb - &ata * &z;
    z += chol.solve(&resid);
    let l = chol.l();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for p in 0..nu {
        let d = l[(p, p)].abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }

    // σ values and derivatives.
    let sigma_v: Vec<V3> = (0..n)
        .map(|i| {
            let mut v = sigma0[i];
            for (p, e) in dirs[i].iter().enumerate() {
                v += e * z[first[i] + p];
            }
            v
        })
        .collect();
    let mut sx = vec![V3::zeros(); n];
    let mut sy = vec![V3::zeros(); n];
    for c in 0..3 {
        let comp: Vec<f64> = sigma_v.iter().map(|v| v[c]).collect();
        let (dx, dy) = diff.cartesian(grid, &comp);
        for i in 0..n {
            sx[i][c] = dx[i];
            sy[i][c] = dy[i];
        }
    }
    let sigma = from_parts(geom, sigma_v, sx, sy);
    let total = s.add(&sigma, geom);
    let after = conformal_deficit(geom, &total);
    let boundary_residual = geom
        .boundary
        .iter()
        .filter(|_| geom.ambient.has_boundary())
        .map(|b| (sigma.v[b.node].dot(&b.n) + cot * s.s_sc[b.node]).abs())
        .fold(0.0, f64::max);
    let l2 = |d: &super::deficit::DeficitField| d.value.max(0.0).sqrt();
    let record = ReparamRecord {
        unknowns: nu,
        equations: 2 * n,
        pde_residual: after.eta.iter().map(|e| e.norm()).fold(0.0, f64::max),
        pde_l2: l2(&after),
        boundary_residual,
        tangency_residual: total.tangency_residual,
        deficit: after.value,
        deficit_before: eta_s.value,
        condition_estimate: (hi / lo).powi(2),
    };
    Ok(ConformalReparam { sigma, total, record })
}
