//! Jacobi operator of the cap: lowest eigenvalues, Morse index, heat trace
//! and the eigenvalue counting inequality.

use std::f64::consts::PI;

use capillab::geometry::*;
use capillab::spectral::*;

fn main() -> capillab::Result<()> {
    let chart = ImmersionChart::SphericalCap { theta_c: PI / 3.0, radius: 1.0 };
    let spec = GridSpec::disk(24, 48).with_rule(RadialRule::Uniform);
    let geom = sample_geometry(&chart, &build_grid(&spec)?, &AmbientRegion::half_space())?;
    let q = assemble_q(&geom, PI / 3.0)?;
    let sp = eigs(&q, EigRequest::Smallest(10))?;
    println!("method {}, {} dofs", sp.method, q.n());
    for (l, r) in sp.eigenvalues.iter().zip(&sp.residuals) {
        println!("  λ = {l:+.8}  residual {r:.1e}");
    }
    let m = morse_index(&q, None)?;
    println!("index {} nullity {} (boundary case: {})", m.index, m.nullity, m.boundary_case);
    let c = volume_wetting_constraints(&q, &geom);
    println!("volume-constrained index {}", constrained_index(&q, &c, default_tol_null(&q))?);
    for t in [0.1, 1.0] {
        let k = counting_check(&sp, 8.0, t)?;
        println!("t = {t}: trace {:.6}, #(λ ≤ 8) = {} ≤ {:.3}", heat_trace(&sp, t)?.value, k.count, k.bound);
    }
    sp.write_csv(std::io::stdout().lock())?;
    Ok(())
}
