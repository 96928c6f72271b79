//! Runs a shipped scenario from code and prints every check.

use capillab::cli::{run_scenario, Scenario, Suite};

fn main() -> capillab::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/cap_pi3.cfg").into());
    let mut sc = Scenario::load(path.as_ref())?;
    sc.suites = vec![Suite::Geometry, Suite::Spectra, Suite::Bounds];
    let report = run_scenario(&sc)?;
    for (suite, c) in report.checks() {
        println!("{:<10} {}", suite.name(), c.line());
    }
    println!("passed: {}", report.passed);
    Ok(())
}
