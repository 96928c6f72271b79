//! Sobolev inequality on the disk in a cylinder and the normal extension
//! field in three ambient regions.

use std::f64::consts::PI;

use capillab::bounds::*;
use capillab::geometry::*;

fn main() -> capillab::Result<()> {
    let chart = ImmersionChart::FlatDisk { radius: 1.0, height: 0.0 };
    let geom = sample_geometry(&chart, &build_grid(&GridSpec::disk(24, 48))?, &AmbientRegion::SolidCylinder { radius: 1.0 })?;
    let one = vec![1.0; geom.grid.n_nodes()];
    let rec = sobolev_check(&geom, &one, PI / 2.0, 1.0)?;
    println!("f ≡ 1: lhs {:.4} rhs {:.4} margin {:.4}", rec.lhs, rec.rhs, rec.margin);
    let bump: Vec<f64> = geom.grid.coords.iter().map(|&[x, y]| (1.0 - x * x - y * y).powi(2)).collect();
    let rec = sobolev_check(&geom, &bump, PI / 2.0, 1.0)?;
    println!("bump:  lhs {:.4} rhs {:.4} margin {:.4}", rec.lhs, rec.rhs, rec.margin);

    for (amb, eps) in [
        (AmbientRegion::UnitBall { radius: 1.0 }, 0.5),
        (AmbientRegion::SolidCylinder { radius: 1.0 }, 0.5),
        (AmbientRegion::half_space(), 1.0),
    ] {
        let e = normal_extension(&amb, eps, 21)?;
        println!(
            "{:<15} ε = {eps}: {} probes, sup|X| = {:.6}, sup|∇X| = {:.6} (limit {:.6})",
            e.ambient, e.probes, e.sup_norm, e.sup_grad, e.grad_limit
        );
    }
    Ok(())
}
