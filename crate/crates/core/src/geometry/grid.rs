use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_lobatto, gauss_radau_right};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    DiskPolar,
    AnnulusCylindrical,
}

/// Radial node placement. `Spectral` uses Gauss–Radau (disk) or
/// Gauss–Lobatto (annulus) nodes; `Uniform` gives equispaced rings that
/// nest under doubling of `n_r - 1`, which the finite-element refinement
/// studies rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RadialRule {
    #[default]
    Spectral,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub topology: Topology,
    pub n_r: usize,
    pub n_phi: usize,
    /// Inner cutoff for disk grids; `0` selects the pole-free rule.
    #[serde(default)]
    pub r0: f64,
    /// Inner parameter radius of annulus grids.
    #[serde(default = "default_annulus_inner")]
    pub annulus_inner: f64,
    #[serde(default)]
    pub radial_rule: RadialRule,
}

fn default_annulus_inner() -> f64 {
    (-1.0f64).exp()
}

impl GridSpec {
    pub fn disk(n_r: usize, n_phi: usize) -> Self {
        GridSpec {
            topology: Topology::DiskPolar,
            n_r,
            n_phi,
            r0: 0.0,
            annulus_inner: default_annulus_inner(),
            radial_rule: RadialRule::Spectral,
        }
    }

    pub fn annulus(n_r: usize, n_phi: usize, inner: f64) -> Self {
        GridSpec {
            topology: Topology::AnnulusCylindrical,
            n_r,
            n_phi,
            r0: 0.0,
            annulus_inner: inner,
            radial_rule: RadialRule::Spectral,
        }
    }

    pub fn with_r0(mut self, r0: f64) -> Self {
        self.r0 = r0;
        self
    }

    pub fn with_rule(mut self, rule: RadialRule) -> Self {
        self.radial_rule = rule;
        self
    }

    /// Same spec with both resolutions doubled such that uniform rings nest.
    pub fn refined(&self) -> Self {
        let mut s = self.clone();
        let pole_free = self.topology == Topology::DiskPolar && self.r0 == 0.0;
        s.n_r = if pole_free { 2 * self.n_r } else { 2 * (self.n_r - 1) + 1 };
        s.n_phi = 2 * self.n_phi;
        s
    }
}

/// A boundary ring of the grid together with the sign of the outward
/// radial direction (`+1` outer ring, `-1` inner annulus ring).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRing {
    pub ring: usize,
    pub outward: f64,
}

/// Tensor polar grid on the parameter disk or annulus. Node `j * n_phi + k`
/// sits at radius `radii[j]`, angle `2πk / n_phi`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub spec: GridSpec,
    pub radii: Vec<f64>,
    pub phis: Vec<f64>,
    /// Parameter-area quadrature weight per node.
    pub weights: Vec<f64>,
    pub coords: Vec<[f64; 2]>,
    pub boundary: Vec<bool>,
    pub rings: Vec<BoundaryRing>,
    /// True for disk grids without an inner cutoff (the pole is covered by
    /// the radial rule, never sampled).
    pub pole_free: bool,
}

impl Grid {
    pub fn n_nodes(&self) -> usize {
        self.radii.len() * self.phis.len()
    }

    pub fn n_r(&self) -> usize {
        self.radii.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.phis.len() + k % self.phis.len()
    }

    pub fn dphi(&self) -> f64 {
        2.0 * PI / self.phis.len() as f64
    }

    /// Parameter arc-length weight `r dφ` of a boundary node.
    pub fn arc_weight(&self, node: usize) -> f64 {
        self.radii[node / self.phis.len()] * self.dphi()
    }

    /// Boundary nodes paired with the outward radial sign of their ring.
    pub fn boundary_nodes(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rings.iter().flat_map(move |ring| {
            (0..self.n_phi()).map(move |k| (self.index(ring.ring, k), ring.outward))
        })
    }

    pub fn parameter_area(&self) -> f64 {
        crate::quadrature::ksum(self.weights.iter().copied())
    }
}

pub fn build_grid(spec: &GridSpec) -> Result<Grid> {
    if spec.n_r < 4 || spec.n_phi < 8 {
        return Err(Error::ResolutionTooSmall(format!(
            "n_r = {} (min 4), n_phi = {} (min 8)",
            spec.n_r, spec.n_phi
        )));
    }
    let (lo, outer_only) = match spec.topology {
        Topology::DiskPolar => {
            if !(0.0..0.5).contains(&spec.r0) {
                return Err(Error::InvalidParameter(format!(
                    "r0 = {} outside [0, 0.5)",
                    spec.r0
                )));
            }
            (spec.r0, true)
        }
        Topology::AnnulusCylindrical => {
            if !(spec.annulus_inner > 0.0 && spec.annulus_inner < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "annulus inner radius {} outside (0, 1)",
                    spec.annulus_inner
                )));
            }
            (spec.annulus_inner, false)
        }
    };
    let len = 1.0 - lo;
    let n = spec.n_r;
    // Radial nodes and weights for ∫ g(r) r dr over [lo, 1].
    let (radii, rw): (Vec<f64>, Vec<f64>) = match spec.radial_rule {
        RadialRule::Spectral => {
            let (x, w) = if outer_only { gauss_radau_right(n) } else { gauss_lobatto(n) };
            x.iter()
                .zip(&w)
                .map(|(x, w)| {
                    let r = lo + len * 0.5 * (x + 1.0);
                    (r, w * 0.5 * len * r)
                })
                .unzip()
        }
        RadialRule::Uniform => {
            if outer_only && lo == 0.0 {
                // Rings at (j+1)/n; the virtual pole ring contributes zero.
                let h = 1.0 / n as f64;
                (0..n)
                    .map(|j| {
                        let r = (j + 1) as f64 * h;
                        let w = if j + 1 == n { 0.5 * h * r } else { h * r };
                        (r, w)
                    })
                    .unzip()
            } else {
                let h = len / (n - 1) as f64;
                (0..n)
                    .map(|j| {
                        let r = lo + j as f64 * h;
                        let w = if j == 0 || j + 1 == n { 0.5 * h * r } else { h * r };
                        (r, w)
                    })
                    .unzip()
            }
        }
    };
    let n_phi = spec.n_phi;
    let dphi = 2.0 * PI / n_phi as f64;
    let phis: Vec<f64> = (0..n_phi).map(|k| k as f64 * dphi).collect();
    let mut weights = Vec::with_capacity(n * n_phi);
    let mut coords = Vec::with_capacity(n * n_phi);
    let mut boundary = Vec::with_capacity(n * n_phi);
    let mut rings = vec![BoundaryRing { ring: n - 1, outward: 1.0 }];
    if !outer_only {
        rings.insert(0, BoundaryRing { ring: 0, outward: -1.0 });
    }
    for (j, (r, w)) in radii.iter().zip(&rw).enumerate() {
        let on_boundary = j + 1 == n || (!outer_only && j == 0);
        for phi in &phis {
            weights.push(w * dphi);
            coords.push([r * phi.cos(), r * phi.sin()]);
            boundary.push(on_boundary);
        }
    }
    Ok(Grid {
        spec: spec.clone(),
        radii,
        phis,
        weights,
        coords,
        boundary,
        rings,
        pole_free: outer_only && lo == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_with_cutoff_has_annulus_area() {
        let g = build_grid(&GridSpec::disk(64, 128).with_r0(0.02)).unwrap();
        assert_eq!(g.n_nodes(), 64 * 128);
        assert!((g.parameter_area() - PI * (1.0 - 0.02f64.powi(2))).abs() < 1e-10);
        assert!(g.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn pole_free_disk_covers_full_area() {
        let g = build_grid(&GridSpec::disk(16, 32)).unwrap();
        assert!(g.pole_free);
        assert!((g.parameter_area() - PI).abs() < 1e-13);
        // ∫ r² dA = π/2 exactly for the spectral rule
        let m2: f64 = g.coords.iter().zip(&g.weights).map(|(c, w)| w * (c[0] * c[0] + c[1] * c[1])).sum();
        assert!((m2 - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn annulus_flags_both_rings() {
        let g = build_grid(&GridSpec::annulus(32, 64, 0.4)).unwrap();
        assert_eq!(g.rings.len(), 2);
        for (i, b) in g.boundary.iter().enumerate() {
            let j = i / 64;
            assert_eq!(*b, j == 0 || j == 31);
        }
        assert!((g.parameter_area() - PI * (1.0 - 0.16)).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_resolution_and_bad_cutoff() {
        let e = build_grid(&GridSpec::disk(16, 3)).unwrap_err();
        assert!(e.to_string().contains("resolution too small"));
        assert!(build_grid(&GridSpec::disk(16, 32).with_r0(0.7)).is_err());
    }

    #[test]
    fn uniform_rings_nest_under_refinement() {
        let s = GridSpec::disk(5, 8).with_rule(RadialRule::Uniform);
        let a = build_grid(&s).unwrap();
        let b = build_grid(&s.refined()).unwrap();
        for r in &a.radii {
            assert!(b.radii.iter().any(|q| (q - r).abs() < 1e-14));
        }
        assert!((a.parameter_area() - PI).abs() < 0.1);
    }
}
