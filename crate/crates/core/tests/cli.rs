use capillab::cli::*;

const CAP: &str = r#"
name = "small_cap"
theta = 1.0471975511965976
h = 2.0
suites = []

[chart]
family = "spherical-cap"
theta_c = 1.0471975511965976

[ambient]
region = "half-space"

[grid]
topology = "disk-polar"
n_r = 12
n_phi = 24

[spectra]
base = [6, 12]
levels = 2
eigenvalues = 4

[bounds]
sobolev_functions = 5
probe_lattice = 7
"#;

fn small(suites: &[Suite]) -> Scenario {
    let mut sc = Scenario::parse(CAP).unwrap();
    sc.suites = suites.to_vec();
    sc
}

#[test]
fn empty_suite_list_reports_geometry_only() {
    let r = run_scenario(&small(&[])).unwrap();
    assert!(r.suites.is_empty() && r.passed);
    assert!((r.geometry.area - std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn unknown_chart_names_the_key() {
    let text = CAP.replace("spherical-cap", "torus");
    match Scenario::parse(&text) {
        Err(capillab::Error::Config { key, message }) => {
            assert_eq!(key, "chart.family");
            assert!(message.contains("torus") && message.contains("line 8"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    let text = CAP.replace("h = 2.0", "h = 2.0\nbogus = 1");
    assert!(matches!(Scenario::parse(&text), Err(capillab::Error::Config { .. })));
    assert!(Scenario::parse(&CAP.replace("theta = 1.047", "theta = 3.047")).is_err());
}

#[test]
fn dependencies_are_added_in_order() {
    assert_eq!(resolve_suites(&[Suite::Bounds, Suite::Geometry]), vec![Suite::Geometry, Suite::Spectra, Suite::Bounds]);
    assert_eq!(resolve_suites(&[Suite::Reparam]), vec![Suite::Spectra, Suite::Reparam]);
}

#[test]
fn reports_are_deterministic_and_written() {
    let sc = small(&[Suite::Geometry, Suite::Bounds]);
    let a = run_scenario(&sc).unwrap();
    let b = run_scenario(&sc).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let bounds = a.suite(Suite::Bounds).unwrap();
    assert!(bounds.passed(), "{:?}", bounds.checks);
    assert_eq!(bounds.data["i_sigma"], 1);
    assert_eq!(bounds.data["r"]["r"], 0);
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&sc, &a, dir.path()).unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["provenance"]["config_hash"], sc.hash());
    let csv = std::fs::read_to_string(dir.path().join("index.csv")).unwrap();
    assert!(csv.starts_with("n_r,n_phi,dofs,index,nullity,boundary_case\n"));
    let mut other = sc.clone();
    other.seed = 5;
    assert_ne!(other.hash(), sc.hash());
}

#[test]
fn every_check_cites_its_threshold() {
    let r = run_scenario(&small(&[Suite::Spectra])).unwrap();
    for (_, c) in r.checks() {
        assert!(c.line().contains(&format!("{:.6e}", c.threshold)));
    }
}

#[test]
fn sweep_values_and_rows() {
    assert_eq!(parse_values("pi/6, 0.5,2*pi").unwrap(), vec![std::f64::consts::PI / 6.0, 0.5, 2.0 * std::f64::consts::PI]);
    assert!(parse_values("x").is_err());
    assert!("depth".parse::<Axis>().is_err());
    let (t, reports) = sweep(&small(&[]), Axis::Theta, &[], 2).unwrap();
    assert!(t.rows.is_empty() && reports.is_empty());
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), SWEEP_HEADER.join(",") + "\n");
    let (t, _) = sweep(&small(&[]), Axis::Grid, &[6.0, 12.0, 24.0], 2).unwrap();
    assert_eq!(t.rows.len(), 3);
    assert_eq!(t.rows[0][1], "6.000000000000e0");
}

#[test]
fn shipped_scenarios_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "cfg") {
            Scenario::load(&p).unwrap();
            n += 1;
        }
    }
    assert_eq!(n, 4);
}

#[test]
fn variation_tables_parse() {
    let text = format!(
        "{CAP}\n[[variations]]\nkind = \"normal-scalar\"\nf = {{ kind = \"polynomial\", terms = [[0, 0, 1.0], [2, 0, -1.0]] }}\n\n[[variations]]\nkind = \"rotation\"\naxis = [0.0, 0.0, 1.0]\n"
    );
    let sc = Scenario::parse(&text).unwrap();
    assert_eq!(sc.variation_recipes().len(), 2);
}
