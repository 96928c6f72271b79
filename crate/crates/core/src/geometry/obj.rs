use std::fmt::Write as _;
use std::path::Path;

use super::field::GeometryField;
use super::grid::Topology;
use crate::error::Result;

/// Wavefront OBJ text for the sampled surface: one vertex per node, two
/// triangles per grid cell, and a fan to the centre for pole-free disks.
pub fn to_obj(geom: &GeometryField) -> String {
    let grid = &geom.grid;
    let (nr, np) = (grid.n_r(), grid.n_phi());
    let mut s = String::new();
    let _ = writeln!(s, "# {} on {:?} grid {}x{}", geom.chart.name(), grid.spec.topology, nr, np);
    for n in &geom.nodes {
        let _ = writeln!(s, "v {:.12} {:.12} {:.12}", n.u.x, n.u.y, n.u.z);
    }
    for n in &geom.nodes {
        let _ = writeln!(s, "vn {:.12} {:.12} {:.12}", n.nu.x, n.nu.y, n.nu.z);
    }
    let id = |j: usize, k: usize| grid.index(j, k) + 1;
    for j in 0..nr - 1 {
        for k in 0..np {
            let (a, b, c, d) = (id(j, k), id(j + 1, k), id(j + 1, k + 1), id(j, k + 1));
            let _ = writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}");
            let _ = writeln!(s, "f {a}//{a} {c}//{c} {d}//{d}");
        }
    }
    if grid.pole_free && grid.spec.topology == Topology::DiskPolar {
        let c = geom.chart.position(0.0, 0.0);
        let _ = writeln!(s, "v {:.12} {:.12} {:.12}", c.x, c.y, c.z);
        let centre = geom.nodes.len() + 1;
        for k in 0..np {
            let _ = writeln!(s, "f {centre} {} {}", id(0, k), id(0, k + 1));
        }
    }
    s
}

pub fn write_obj(geom: &GeometryField, path: &Path) -> Result<()> {
    std::fs::write(path, to_obj(geom))?;
    Ok(())
}
