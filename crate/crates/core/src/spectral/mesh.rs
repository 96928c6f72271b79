//! P1 triangulation of the parametric grid in polar coordinates `(r, φ)`.
//!
//! Elements are straight in `(r, φ)`, so uniform refinement of a uniform
//! radial rule produces nested finite element spaces.

use std::f64::consts::TAU;

use crate::geometry::Grid;

#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    /// Vertex ids; a pole element repeats the centre vertex.
    pub v: [usize; 3],
    /// Corner coordinates `(r, φ)` with φ unwrapped.
    pub rphi: [[f64; 2]; 3],
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    /// Indices into `GeometryField::boundary`.
    pub ba: usize,
    pub bb: usize,
    pub dphi: f64,
}

#[derive(Debug, Clone)]
pub struct FeMesh {
    pub n_vertices: usize,
    /// Grid node per vertex; `None` for the centre of a pole-free disk.
    pub vertex_node: Vec<Option<usize>>,
    pub vertex_rphi: Vec<[f64; 2]>,
    pub triangles: Vec<Triangle>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub has_center: bool,
}

impl FeMesh {
    pub fn new(grid: &Grid) -> Self {
        let (nr, np) = (grid.n_r(), grid.n_phi());
        let has_center = grid.pole_free;
        let off = usize::from(has_center);
        let mut vertex_node = Vec::with_capacity(grid.n_nodes() + off);
        let mut vertex_rphi = Vec::with_capacity(grid.n_nodes() + off);
        if has_center {
            vertex_node.push(None);
            vertex_rphi.push([0.0, 0.0]);
        }
        for j in 0..nr {
            for k in 0..np {
                vertex_node.push(Some(grid.index(j, k)));
                vertex_rphi.push([grid.radii[j], grid.phis[k]]);
            }
        }
        let dphi = grid.dphi();
        let vid = |j: usize, k: usize| off + grid.index(j, k);
        let phi = |k: usize| k as f64 * dphi;
        let mut triangles = Vec::with_capacity(2 * np * nr);
        if has_center {
            let r = grid.radii[0];
            for k in 0..np {
                triangles.push(Triangle {
                    v: [0, vid(0, k), vid(0, k + 1)],
                    rphi: [[0.0, phi(k)], [r, phi(k)], [r, phi(k + 1)]],
                });
                triangles.push(Triangle {
                    v: [0, vid(0, k + 1), 0],
                    rphi: [[0.0, phi(k)], [r, phi(k + 1)], [0.0, phi(k + 1)]],
                });
            }
        }
        for j in 0..nr - 1 {
            let (r0, r1) = (grid.radii[j], grid.radii[j + 1]);
            for k in 0..np {
                let (p0, p1) = (phi(k), phi(k + 1));
                triangles.push(Triangle {
                    v: [vid(j, k), vid(j + 1, k), vid(j + 1, k + 1)],
                    rphi: [[r0, p0], [r1, p0], [r1, p1]],
                });
                triangles.push(Triangle {
                    v: [vid(j, k), vid(j + 1, k + 1), vid(j, k + 1)],
                    rphi: [[r0, p0], [r1, p1], [r0, p1]],
                });
            }
        }
        let mut boundary_edges = Vec::new();
        for (ri, ring) in grid.rings.iter().enumerate() {
            for k in 0..np {
                boundary_edges.push(BoundaryEdge {
                    a: vid(ring.ring, k),
                    b: vid(ring.ring, k + 1),
                    ba: ri * np + k,
                    bb: ri * np + (k + 1) % np,
                    dphi,
                });
            }
        }
        debug_assert!((dphi * np as f64 - TAU).abs() < 1e-12);
        FeMesh {
            n_vertices: vertex_node.len(),
            vertex_node,
            vertex_rphi,
            triangles,
            boundary_edges,
            has_center,
        }
    }

    /// FE vertex of a grid node.
    pub fn vertex_of(&self, node: usize) -> usize {
        node + usize::from(self.has_center)
    }

    /// Nodal vector from per-grid-node values, with the centre value
    /// supplied separately.
    pub fn from_nodes(&self, values: &[f64], center: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_vertices);
        if self.has_center {
            out.push(center);
        }
        out.extend_from_slice(values);
        out
    }

    /// Per-grid-node values of a nodal vector.
    pub fn to_nodes<'a>(&self, x: &'a [f64]) -> &'a [f64] {
        &x[usize::from(self.has_center)..]
    }
}

/// Linear basis on a triangle in `(r, φ)`: gradient and value evaluators.
#[derive(Debug, Clone, Copy)]
pub struct LinearBasis {
    corners: [[f64; 2]; 3],
    /// `grad[i] = (∂_r, ∂_φ)` of the i-th barycentric coordinate.
    pub grad: [[f64; 2]; 3],
    pub area: f64,
}

impl LinearBasis {
    pub fn new(c: [[f64; 2]; 3]) -> Self {
        let (x0, y0) = (c[0][0], c[0][1]);
        let (x1, y1) = (c[1][0], c[1][1]);
        let (x2, y2) = (c[2][0], c[2][1]);
        let det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
        let grad = [
            [(y1 - y2) / det, (x2 - x1) / det],
            [(y2 - y0) / det, (x0 - x2) / det],
            [(y0 - y1) / det, (x1 - x0) / det],
        ];
        LinearBasis { corners: c, grad, area: 0.5 * det.abs() }
    }

    /// Point of barycentric coordinates `l`.
    pub fn point(&self, l: [f64; 3]) -> [f64; 2] {
        let c = &self.corners;
        [
            l[0] * c[0][0] + l[1] * c[1][0] + l[2] * c[2][0],
            l[0] * c[0][1] + l[1] * c[1][1] + l[2] * c[2][1],
        ]
    }

    /// `∫ r dA`.
    pub fn int_r(&self) -> f64 {
        self.area * (self.corners[0][0] + self.corners[1][0] + self.corners[2][0]) / 3.0
    }

    /// `∫ dA / r`; infinite when an edge lies on `r = 0`.
    pub fn int_inv_r(&self) -> f64 {
        let mut c = self.corners;
        c.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let [p0, p1, p2] = c;
        // φ on the long edge p0–p2 at radius r
        let long = |r: f64| {
            if p2[0] == p0[0] {
                p0[1]
            } else {
                p0[1] + (p2[1] - p0[1]) * (r - p0[0]) / (p2[0] - p0[0])
            }
        };
        let width_at_mid = (p1[1] - long(p1[0])).abs();
        let mut total = 0.0;
        // lower part: width from w(p0) to width_at_mid over [r0, r1]
        let segs = [
            (p0[0], p1[0], if p0[0] == p1[0] { (p1[1] - p0[1]).abs() } else { 0.0 }, width_at_mid),
            (p1[0], p2[0], width_at_mid, if p1[0] == p2[0] { (p2[1] - p1[1]).abs() } else { 0.0 }),
        ];
        for (ra, rb, wa, wb) in segs {
            if rb <= ra {
                continue;
            }
            // w(r) = α + β r
            let beta = (wb - wa) / (rb - ra);
            let alpha = wa - beta * ra;
            let log_part = if ra == 0.0 {
                if alpha.abs() > 1e-14 * (wa.abs() + wb.abs()) {
                    return f64::INFINITY;
                }
                0.0
            } else {
                alpha * (rb / ra).ln()
            };
            total += log_part + beta * (rb - ra);
        }
        total
    }
}

/// Degree-5 seven-point rule on the reference triangle: barycentric
/// coordinates and weights summing to one.
pub fn triangle_rule() -> [([f64; 3], f64); 7] {
    let a1 = 0.059_715_871_789_770;
    let b1 = 0.470_142_064_105_115;
    let a2 = 0.797_426_985_353_087;
    let b2 = 0.101_286_507_323_456;
    let w1 = 0.132_394_152_788_506;
    let w2 = 0.125_939_180_544_827;
    [
        ([1.0 / 3.0; 3], 0.225),
        ([a1, b1, b1], w1),
        ([b1, a1, b1], w1),
        ([b1, b1, a1], w1),
        ([a2, b2, b2], w2),
        ([b2, a2, b2], w2),
        ([b2, b2, a2], w2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, GridSpec, RadialRule};

    #[test]
    fn rule_integrates_quintics() {
        let b = LinearBasis::new([[0.2, 0.0], [0.7, 0.1], [0.4, 0.9]]);
        let exact_area = b.area;
        let s: f64 = triangle_rule().iter().map(|(_, w)| w * b.area).sum();
        assert!((s - exact_area).abs() < 1e-14);
        let ir: f64 = triangle_rule().iter().map(|(l, w)| w * b.area * b.point(*l)[0]).sum();
        assert!((ir - b.int_r()).abs() < 1e-14);
    }

    #[test]
    fn inverse_radius_integral() {
        for c in [
            [[0.5, 0.0], [1.0, 0.0], [1.0, 0.3]],
            [[0.5, 0.0], [1.0, 0.3], [0.5, 0.3]],
            [[0.0, 0.0], [0.25, 0.0], [0.25, 0.3]],
        ] {
            let b = LinearBasis::new(c);
            // brute force
            let n = 4000;
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let (u, v) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                    if u + v < 1.0 {
                        let p = b.point([1.0 - u - v, u, v]);
                        s += 2.0 * b.area / (n * n) as f64 / p[0];
                    }
                }
            }
            assert!((s - b.int_inv_r()).abs() < 2e-3 * s, "{s} {}", b.int_inv_r());
        }
        let pole = LinearBasis::new([[0.0, 0.0], [0.25, 0.3], [0.0, 0.3]]);
        assert!(pole.int_inv_r().is_infinite());
    }

    #[test]
    fn mesh_covers_disk() {
        let grid = build_grid(&GridSpec::disk(6, 12).with_rule(RadialRule::Uniform)).unwrap();
        let m = FeMesh::new(&grid);
        let area: f64 = m.triangles.iter().map(|t| LinearBasis::new(t.rphi).int_r()).sum();
        // Straight (r, φ) elements integrate r exactly.
        assert!((area - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(m.boundary_edges.len(), 12);
        assert_eq!(m.n_vertices, 6 * 12 + 1);
    }
}
