//! Solves for the tangential field σ that makes fν + σ infinitesimally
//! conformal and tangent to the support plane.

use std::f64::consts::PI;

use capillab::geometry::*;
use capillab::variation_lab::*;

fn main() -> capillab::Result<()> {
    let chart = ImmersionChart::SphericalCap { theta_c: PI / 3.0, radius: 1.0 };
    let geom = sample_geometry(&chart, &build_grid(&GridSpec::disk(16, 32))?, &AmbientRegion::half_space())?;
    let f = ScalarRecipe::Polynomial { terms: vec![(0, 0, 1.0), (1, 0, 0.5), (0, 2, -1.0)] };
    let s = make_variation_raw(&FieldRecipe::NormalScalar { f }, &geom);
    let sol = solve_conformal_reparam(&geom, &s, PI / 3.0)?;
    println!("{}", serde_json::to_string_pretty(&sol.record)?);
    println!("max |σ| = {:.6}", sol.sigma.max_norm());
    Ok(())
}
