//! Index of the energy Hessian on tangent-to-∂M vector fields, for both
//! boundary treatments, next to the Jacobi index.

use std::f64::consts::PI;

use capillab::geometry::*;
use capillab::spectral::*;

fn main() -> capillab::Result<()> {
    for theta in [PI / 6.0, PI / 3.0] {
        let chart = ImmersionChart::SphericalCap { theta_c: theta, radius: 1.0 };
        let spec = GridSpec::disk(16, 32).with_rule(RadialRule::Uniform);
        let geom = sample_geometry(&chart, &build_grid(&spec)?, &AmbientRegion::half_space())?;
        let iq = morse_index(&assemble_q(&geom, theta)?, None)?.index;
        let paper = morse_index(&assemble_qe_with(&geom, 2.0, theta, QeVariant::Paper)?, None)?;
        let adapted = morse_index(&assemble_qe_with(&geom, 2.0, theta, QeVariant::Adapted)?, None)?;
        println!("θ = {theta:.4}: i_Q = {iq}, i_QE = {} (paper), {} (adapted)", paper.index, adapted.index);
    }
    Ok(())
}
