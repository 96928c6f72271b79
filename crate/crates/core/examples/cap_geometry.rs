//! Samples a capillary cap, prints its boundary frame and writes an OBJ mesh.

use std::f64::consts::PI;

use capillab::geometry::*;

fn main() -> capillab::Result<()> {
    let chart = ImmersionChart::SphericalCap { theta_c: PI / 3.0, radius: 1.0 };
    let grid = build_grid(&GridSpec::disk(16, 32))?;
    let geom = sample_geometry(&chart, &grid, &AmbientRegion::half_space())?;
    println!("area {:.12} (π = {:.12})", geom.area(), PI);
    println!("conformality residual {:.2e}", geom.conformality_residual);
    println!("contact angle deviation {:.2e}", contact_angle_deviation(&geom, PI / 3.0)?);
    let b = &geom.boundary[0];
    println!("γ̇ = {:?}\nn  = {:?}\nν̂ = {:?}\nN  = {:?}", b.gamma_dot.as_slice(), b.n.as_slice(), b.nu_hat.as_slice(), b.big_n.as_slice());
    let path = std::env::temp_dir().join("cap.obj");
    write_obj(&geom, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
