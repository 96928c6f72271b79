//! Second derivative of energy minus area against four times the conformal
//! deficit ∫|μ|².

use std::f64::consts::PI;

use capillab::geometry::*;
use capillab::variation_lab::*;

fn main() -> capillab::Result<()> {
    let chart = ImmersionChart::SphericalCap { theta_c: PI / 6.0, radius: 1.0 };
    let geom = sample_geometry(&chart, &build_grid(&GridSpec::disk(32, 64))?, &AmbientRegion::half_space())?;
    for seed in 1..=3 {
        let v = make_variation(&FieldRecipe::RandomSmooth { seed, modes: 4, amplitude: 1.0 }, &geom);
        let r = verify_comparison(&geom, &v)?;
        println!(
            "seed {seed}: (E−A)'' = {:.10}  4∫|μ|² = {:.10}  residual {:.1e}  {}",
            r.fd_linear,
            r.deficit,
            r.abs_residual,
            if r.passes() { "ok" } else { "FAIL" }
        );
    }
    let d = conformal_deficit(&geom, &make_variation(&FieldRecipe::Rotation { axis: [0.0, 0.0, 1.0], center: [0.0; 3] }, &geom));
    println!("rotation about the axis: deficit {:.1e}", d.value);
    Ok(())
}
