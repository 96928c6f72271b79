//! Topological term, Maslov index and the explicit index bound.

use std::f64::consts::PI;

use capillab::bounds::*;

fn main() -> capillab::Result<()> {
    for (g, m, b, d) in [(0, 1, 0, 0), (1, 1, 0, 0), (0, 2, 0, 0), (1, 1, 0, 3)] {
        let sig = TopologySignature::new(g, m, b, d)?;
        let r = topological_r(&sig);
        println!("(g,m,b,d) = ({g},{m},{b},{d}): r = {} {:?}{}, μ = {}", r.r, r.case, if r.odd_d_middle { " odd d" } else { "" }, maslov_index(&sig));
    }
    let (t0, f) = profile_minimum(1.0, 2.0)?;
    println!("α = 1, β = 2: t₀ = {t0:.6}, f(t₀) = {f}");
    let inputs = BoundInputs { theta: PI / 3.0, h: 2.0, j: 0.0, b: 0.0, area: PI, rho: 10.0, r: 0, delta_range: (1e-3, 1e3) };
    let rec = index_bound(&inputs)?;
    println!("{}", serde_json::to_string_pretty(&rec)?);
    println!("paper-shaped value with C = 1: {:.4}", rec.paper_shaped(1.0));
    Ok(())
}
