//! Area, energy and the first variation of the capillary functional, with
//! the finite-difference derivative alongside.

use std::f64::consts::PI;

use capillab::functionals::*;
use capillab::geometry::*;
use capillab::variation_lab::*;

fn main() -> capillab::Result<()> {
    let chart = ImmersionChart::SphericalCap { theta_c: PI / 4.0, radius: 1.0 };
    let geom = sample_geometry(&chart, &build_grid(&GridSpec::disk(24, 48))?, &AmbientRegion::half_space())?;
    println!("area {:.10}  dirichlet energy {:.10}", area(&geom), dirichlet_energy(&geom));

    let v = make_variation(&FieldRecipe::RandomSmooth { seed: 4, modes: 4, amplitude: 1.0 }, &geom);
    for id in [FunctionalId::area(), FunctionalId::volume(2.0), FunctionalId::wetting(PI / 4.0), FunctionalId::area_mod(2.0, PI / 4.0)] {
        let analytic = first_variation(&id, &geom, &v)?;
        let fd = fd_derivative(&id, &VariationFamily::new(&geom, v.clone(), Profile::Linear), 1)?;
        println!("{:?}: analytic {:+.10}  finite difference {:+.10}", id.tag, analytic.value, fd.value);
    }
    let crit = criticality_residuals(&geom, 2.0, PI / 4.0);
    println!("criticality: ∫|H − hν| = {:.2e}, max |cos α − cos θ| = {:.2e}", crit.mean_curvature, crit.contact_angle);
    Ok(())
}
