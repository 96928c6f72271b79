//! Generalised symmetric eigenproblems `S x = λ M x` and inertia counts.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::assembly::{AssembledForm, DofMap};
use super::sparse::{BandLdlt, CsrMatrix};
use crate::error::{Error, Result};

pub const DENSE_CEILING: usize = 8000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigRequest {
    All,
    Smallest(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigOptions {
    pub dense_ceiling: usize,
    /// Below this size `Smallest` also uses the dense solver.
    pub dense_below: usize,
    /// Backward-error target per pair.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for EigOptions {
    fn default() -> Self {
        EigOptions { dense_ceiling: DENSE_CEILING, dense_below: 600, tol: 1e-8, max_iter: 400, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    /// Backward error `‖Sx − λMx‖ / ((‖S‖ + |λ|‖M‖)‖x‖)` per pair.
    pub residuals: Vec<f64>,
    pub index: usize,
    pub nullity: usize,
    pub tol_null: f64,
    /// True when every eigenvalue of the discrete problem is present.
    pub complete: bool,
    pub method: String,
    pub iterations: usize,
    /// Weyl density `area · components / 4π` used for trace tails.
    pub weyl_density: f64,
    /// Largest eigenvalue change against the next coarser grid.
    pub convergence_delta: Option<f64>,
    pub boundary_case: bool,
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
}

impl SpectrumReport {
    /// Record the change against a coarser-grid spectrum.
    pub fn compare_coarser(&mut self, coarse: &SpectrumReport) -> f64 {
        let d = self
            .eigenvalues
            .iter()
            .zip(&coarse.eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.convergence_delta = Some(d);
        d
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,eigenvalue,residual")?;
        for (i, (l, r)) in self.eigenvalues.iter().zip(&self.residuals).enumerate() {
            writeln!(out, "{i},{l:.15e},{r:.3e}")?;
        }
        Ok(())
    }
}

fn inf_norm(a: &CsrMatrix) -> f64 {
    (0..a.n).map(|i| a.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn backward_error(form: &AssembledForm, norms: (f64, f64), lambda: f64, x: &[f64]) -> f64 {
    let sx = form.s.mul_vec(x);
    let mx = form.m.mul_vec(x);
    let r: Vec<f64> = sx.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
    norm(&r) / ((norms.0 + lambda.abs() * norms.1) * norm(x))
}

/// Default null tolerance `1e-6 ‖S‖_max / ‖M‖_max`.
pub fn default_tol_null(form: &AssembledForm) -> f64 {
    1e-6 * form.scale()
}

fn weyl_density(form: &AssembledForm) -> f64 {
    let n = form.n();
    let comps = match form.dofs {
        DofMap::Scalar => 1.0,
        DofMap::Vector { .. } => 3.0,
    };
    let area = match &form.dofs {
        DofMap::Scalar => form.m.quad_form(&vec![1.0; n]),
        DofMap::Vector { .. } => {
            // ∫|e₃|² over the interior dofs is close enough for a tail model
            let x = form.interpolate_vector(|_, _| crate::geometry::V3::z());
            form.m.quad_form(&x)
        }
    };
    area * comps / (4.0 * std::f64::consts::PI)
}

pub fn eigs(form: &AssembledForm, req: EigRequest) -> Result<SpectrumReport> {
    eigs_with(form, req, &EigOptions::default())
}

pub fn eigs_with(form: &AssembledForm, req: EigRequest, opts: &EigOptions) -> Result<SpectrumReport> {
    let n = form.n();
    let norms = (inf_norm(&form.s), inf_norm(&form.m));
    let (values, vectors, method, iterations, complete) = match req {
        EigRequest::All => {
            if n > opts.dense_ceiling {
                return Err(Error::Precondition(format!(
                    "full spectrum requested for {n} dofs (dense ceiling {})",
                    opts.dense_ceiling
                )));
            }
            let (v, x) = dense(&form.s, &form.m)?;
            (v, x, "dense".to_string(), 1, true)
        }
        EigRequest::Smallest(k) => {
            let k = k.min(n);
            if n <= opts.dense_below {
                let (mut v, mut x) = dense(&form.s, &form.m)?;
                v.truncate(k);
                x.truncate(k);
                (v, x, "dense".to_string(), 1, k == n)
            } else {
                let (v, x, it) = subspace_iteration(form, k, norms, opts)?;
                (v, x, "shift-invert subspace iteration".to_string(), it, false)
            }
        }
    };
    let residuals: Vec<f64> =
        values.iter().zip(&vectors).map(|(l, x)| backward_error(form, norms, *l, x)).collect();
    let morse = morse_index(form, None)?;
    Ok(SpectrumReport {
        eigenvalues: values,
        residuals,
        index: morse.index,
        nullity: morse.nullity,
        tol_null: morse.tol_null,
        complete,
        method,
        iterations,
        weyl_density: weyl_density(form),
        convergence_delta: None,
        boundary_case: morse.boundary_case,
        vectors,
    })
}

/// Dense solve through the Cholesky factor of `M`.
fn dense(s: &CsrMatrix, m: &CsrMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let sd = s.to_dense();
    let chol = m
        .to_dense()
        .cholesky()
        .ok_or_else(|| Error::Factorization("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let a = l
        .solve_lower_triangular(&sd)
        .ok_or_else(|| Error::Factorization("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&a.transpose())
        .ok_or_else(|| Error::Factorization("singular Cholesky factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let lt = l.transpose();
    let y = lt
        .solve_upper_triangular(&eig.eigenvectors)
        .ok_or_else(|| Error::Factorization("singular Cholesky factor".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order.iter().map(|&i| y.column(i).iter().copied().collect()).collect();
    Ok((values, vectors))
}

/// `LDLᵀ` of `S − σM`.
fn factor_shifted(form: &AssembledForm, sigma: f64) -> Result<BandLdlt> {
    BandLdlt::factor(&form.s.combine(1.0, &form.m, -sigma))
}

/// Number of eigenvalues below `sigma`, by Sylvester's law of inertia.
pub fn count_below(form: &AssembledForm, sigma: f64) -> Result<usize> {
    let mut s = sigma;
    for _ in 0..8 {
        match factor_shifted(form, s) {
            Ok(f) => return Ok(f.negative_count()),
            // σ hit an eigenvalue; nudge it
            Err(_) => s += 1e-9 * (1.0 + s.abs()),
        }
    }
    Err(Error::Factorization(format!("S − σM singular near σ = {sigma}")))
}

fn m_orthonormalise(m: &CsrMatrix, cols: &mut Vec<Vec<f64>>, rng: &mut ChaCha8Rng) {
    let n = m.n;
    for j in 0..cols.len() {
        for _pass in 0..2 {
            let mx = m.mul_vec(&cols[j]);
            for i in 0..j {
                let c: f64 = cols[i].iter().zip(&mx).map(|(a, b)| a * b).sum();
                let (head, tail) = cols.split_at_mut(j);
                for (t, h) in tail[0].iter_mut().zip(&head[i]) {
                    *t -= c * h;
                }
            }
        }
        let nn = m.quad_form(&cols[j]).max(0.0).sqrt();
        if !(nn > 1e-12) {
            cols[j] = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            // retried on the next sweep by the caller
            continue;
        }
        for t in cols[j].iter_mut() {
            *t /= nn;
        }
    }
}

fn subspace_iteration(
    form: &AssembledForm,
    k: usize,
    norms: (f64, f64),
    opts: &EigOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let n = form.n();
    let p = (k + 10).max(2 * k).min(n);
    // Shift below the whole spectrum so S − σM is positive definite.
    let mut sigma = -1.0f64;
    let mut ldlt = loop {
        match factor_shifted(form, sigma) {
            Ok(f) if f.negative_count() == 0 => break f,
            _ => sigma *= 2.0,
        }
        if sigma < -1e12 {
            return Err(Error::Factorization("no positive definite shift found".into()));
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect()).collect();
    m_orthonormalise(&form.m, &mut x, &mut rng);
    let mut values = Vec::new();
    for it in 1..=opts.max_iter {
        let mut y: Vec<Vec<f64>> = x.iter().map(|c| ldlt.solve(&form.m.mul_vec(c))).collect();
        m_orthonormalise(&form.m, &mut y, &mut rng);
        m_orthonormalise(&form.m, &mut y, &mut rng);
        // Rayleigh–Ritz
        let sy: Vec<Vec<f64>> = y.iter().map(|c| form.s.mul_vec(c)).collect();
        let mut small = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..=i {
                let v: f64 = y[i].iter().zip(&sy[j]).map(|(a, b)| a * b).sum();
                small[(i, j)] = v;
                small[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(small);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        x = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (i, yi) in y.iter().enumerate() {
                    let w = eig.eigenvectors[(i, c)];
                    for (a, b) in v.iter_mut().zip(yi) {
                        *a += w * b;
                    }
                }
                v
            })
            .collect();
        values = order.iter().map(|&i| eig.eigenvalues[i]).collect::<Vec<f64>>();
        let worst = (0..k)
            .map(|i| backward_error(form, norms, values[i], &x[i]))
            .fold(0.0, f64::max);
        if worst <= opts.tol {
            values.truncate(k);
            x.truncate(k);
            return Ok((values, x, it));
        }
        // Move the shift up under the lowest Ritz value.
        if it % 4 == 0 {
            let spread = values[p - 1] - values[0];
            let target = values[0] - 0.02 * spread - 1e-8 * (1.0 + values[0].abs());
            if target > sigma {
                if let Ok(f) = factor_shifted(form, target) {
                    if f.negative_count() == 0 {
                        sigma = target;
                        ldlt = f;
                    }
                }
            }
        }
    }
    let _ = values;
    Err(Error::NonConvergence { iterations: opts.max_iter, what: "shift-invert subspace iteration".into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorseReport {
    pub index: usize,
    pub nullity: usize,
    pub tol_null: f64,
    /// Counts change when `tol_null` is halved or doubled.
    pub boundary_case: bool,
}

fn counts(form: &AssembledForm, tol: f64) -> Result<(usize, usize)> {
    let below = count_below(form, -tol)?;
    let near = count_below(form, tol)? - below;
    Ok((below, near))
}

/// Index (eigenvalues below `−tol`) and nullity (within `±tol`) from the
/// inertia of `S ± tol M`.
pub fn morse_index(form: &AssembledForm, tol_null: Option<f64>) -> Result<MorseReport> {
    let tol = tol_null.unwrap_or_else(|| default_tol_null(form));
    let (index, nullity) = counts(form, tol)?;
    let boundary_case = counts(form, 2.0 * tol)? != (index, nullity) || counts(form, 0.5 * tol)? != (index, nullity);
    Ok(MorseReport { index, nullity, tol_null: tol, boundary_case })
}

/// Index of `S` restricted to `{x : Cᵀx = 0}` for constraint columns `C`,
/// from the inertia of the bordered matrix (Haynsworth additivity):
/// `ind = neg(K) − #{μ ≤ 0 : μ eigenvalue of CᵀK⁻¹C}` with `K = S + tol M`.
pub fn constrained_index(form: &AssembledForm, constraints: &[Vec<f64>], tol: f64) -> Result<usize> {
    let mut shift = -tol;
    let ldlt = loop {
        match factor_shifted(form, shift) {
            Ok(f) => break f,
            Err(_) => shift -= 1e-9 * (1.0 + tol),
        }
    };
    let q = constraints.len();
    let kc: Vec<Vec<f64>> = constraints.iter().map(|c| ldlt.solve(c)).collect();
    let mut g = DMatrix::zeros(q, q);
    for i in 0..q {
        for j in 0..q {
            g[(i, j)] = constraints[i].iter().zip(&kc[j]).map(|(a, b)| a * b).sum();
        }
    }
    let g = (&g + g.transpose()) * 0.5;
    let scale = g.amax().max(f64::MIN_POSITIVE);
    let nonpos = SymmetricEigen::new(g).eigenvalues.iter().filter(|&&m| m <= 1e-12 * scale).count();
    Ok(ldlt.negative_count().saturating_sub(nonpos))
}

/// Volume and wetting constraints `∫ f dΣ = 0`, `∮ f / sin θ dτ = 0` for a
/// scalar form.
pub fn volume_wetting_constraints(form: &AssembledForm, geom: &crate::geometry::GeometryField) -> Vec<Vec<f64>> {
    let n = form.n();
    let vol = form.m.mul_vec(&vec![1.0; n]);
    let mut wet = vec![0.0; n];
    let st = form.theta.sin();
    let dphi = geom.grid.dphi();
    for ed in &form.mesh.boundary_edges {
        let (la, lb) = (geom.boundary[ed.ba].ds / dphi, geom.boundary[ed.bb].ds / dphi);
        wet[ed.a] += ed.dphi * (2.0 * la + lb) / 6.0 / st;
        wet[ed.b] += ed.dphi * (la + 2.0 * lb) / 6.0 / st;
    }
    vec![vol, wet]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sparse::TripletBuilder;

    fn diag_form(d: &[f64]) -> AssembledForm {
        let n = d.len();
        let mut s = TripletBuilder::new(n);
        let mut m = TripletBuilder::new(n);
        for (i, v) in d.iter().enumerate() {
            s.add(i, i, *v);
            m.add(i, i, 1.0);
        }
        let grid = crate::geometry::build_grid(&crate::geometry::GridSpec::disk(4, 8)).unwrap();
        AssembledForm {
            s: s.build(),
            m: m.build(),
            dofs: DofMap::Scalar,
            mesh: crate::spectral::FeMesh::new(&grid),
            kind: crate::spectral::FormKind::Jacobi,
            terms: vec![],
            theta: 1.0,
            h: 0.0,
            grid: grid.spec.clone(),
        }
    }

    #[test]
    fn diagonal_pair() {
        let f = diag_form(&[2.0, -1.0]);
        let r = eigs(&f, EigRequest::All).unwrap();
        assert_eq!(r.eigenvalues, vec![-1.0, 2.0]);
        assert_eq!(r.index, 1);
        assert_eq!(r.nullity, 0);
    }

    #[test]
    fn subspace_iteration_matches_dense() {
        let d: Vec<f64> = (0..800).map(|i| ((i * 37) % 800) as f64 * 0.05 - 1.5).collect();
        let f = diag_form(&d);
        let r = eigs(&f, EigRequest::Smallest(5)).unwrap();
        assert!(r.method.contains("subspace"));
        let mut sorted = d.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in r.eigenvalues.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
        assert_eq!(r.index, 30);
    }

    #[test]
    fn constrained_index_of_diagonal() {
        let f = diag_form(&[-1.0, -2.0, 3.0]);
        // constraint x₀ = 0 removes one negative direction
        assert_eq!(constrained_index(&f, &[vec![1.0, 0.0, 0.0]], 1e-9).unwrap(), 1);
        assert_eq!(constrained_index(&f, &[vec![0.0, 0.0, 1.0]], 1e-9).unwrap(), 2);
    }
}
