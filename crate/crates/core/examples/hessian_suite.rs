//! Checks every closed-form Hessian against the finite-difference oracle.

use std::f64::consts::PI;

use capillab::geometry::*;
use capillab::variation_lab::*;

fn main() -> capillab::Result<()> {
    let scenarios = [
        (
            "cap pi/3",
            ImmersionChart::SphericalCap { theta_c: PI / 3.0, radius: 1.0 },
            AmbientRegion::half_space(),
            HessianParams::new(2.0, PI / 3.0),
        ),
        (
            "disk in cylinder",
            ImmersionChart::FlatDisk { radius: 1.0, height: 0.0 },
            AmbientRegion::SolidCylinder { radius: 1.0 },
            HessianParams::new(0.0, PI / 2.0),
        ),
    ];
    for (name, chart, ambient, params) in scenarios {
        let grid = build_grid(&GridSpec::disk(24, 48))?;
        let geom = sample_geometry(&chart, &grid, &ambient)?;
        println!("== {name}");
        for seed in [1, 2, 3] {
            let v = make_variation(&FieldRecipe::RandomSmooth { seed, modes: 4, amplitude: 1.0 }, &geom);
            for f in HessianFormula::ALL {
                let c = hessian_oracle_check(f, &geom, &v, &params)?;
                println!(
                    "seed {seed} {:<10} analytic {:>14.8} oracle {:>14.8} / {:>14.8} rel {:.2e} variants {:?}",
                    f.name(),
                    c.analytic.value,
                    c.oracle.linear,
                    c.oracle.cosine,
                    c.rel_residual,
                    c.variant_residuals
                );
            }
        }
    }
    Ok(())
}
