use std::f64::consts::PI;

use capillab::geometry::*;
use capillab::spectral::*;
use capillab::variation_lab::*;

fn cap(nr: usize, np: usize) -> GeometryField {
    let chart = ImmersionChart::SphericalCap { theta_c: PI / 3.0, radius: 1.0 };
    sample_geometry(&chart, &build_grid(&GridSpec::disk(nr, np)).unwrap(), &AmbientRegion::half_space()).unwrap()
}

fn normal(g: &GeometryField, f: Vec<f64>) -> VariationField {
    make_variation_raw(&FieldRecipe::NormalScalar { f: ScalarRecipe::Nodal { values: f } }, g)
}

#[test]
fn zero_data_gives_zero_sigma() {
    let g = cap(12, 24);
    let sol = solve_conformal_reparam(&g, &VariationField::zero(&g), PI / 3.0).unwrap();
    assert!(sol.sigma.max_norm() < 1e-14);
    assert!(sol.record.pde_residual < 1e-14 && sol.record.deficit < 1e-28);
}

#[test]
fn flat_disk_needs_no_reparametrisation() {
    let grid = build_grid(&GridSpec::disk(12, 24)).unwrap();
    let chart = ImmersionChart::FlatDisk { radius: 1.0, height: 0.0 };
    let g = sample_geometry(&chart, &grid, &AmbientRegion::SolidCylinder { radius: 1.0 }).unwrap();
    let f: Vec<f64> = grid.coords.iter().map(|&[x, y]| 1.0 + x * y + x * x * x).collect();
    let sol = solve_conformal_reparam(&g, &normal(&g, f), PI / 2.0).unwrap();
    assert!(sol.sigma.max_norm() < 1e-10, "{}", sol.sigma.max_norm());
    assert!(sol.record.deficit < 1e-20);
}

#[test]
fn cap_eigenfunction_energy_and_jacobi_forms_agree() {
    let g = cap(16, 32);
    let q = assemble_q(&g, PI / 3.0).unwrap();
    let sp = eigs(&q, EigRequest::Smallest(1)).unwrap();
    let f = q.mesh.to_nodes(&sp.vectors[0]).to_vec();
    let s = normal(&g, f);
    let sol = solve_conformal_reparam(&g, &s, PI / 3.0).unwrap();
    let rec = sol.record;
    assert!(rec.pde_residual <= 1e-6 && rec.boundary_residual <= 1e-12 && rec.tangency_residual <= 1e-12, "{rec:?}");
    let p = HessianParams::new(2.0, PI / 3.0);
    let qf = analytic_hessian(HessianFormula::CmcCap, &g, &s, &p).unwrap().value;
    let e = analytic_hessian(HessianFormula::EnergyMod, &g, &sol.total, &p).unwrap();
    let consistent = e.variants.iter().find(|(n, _)| n == "energy_volume_wetting").unwrap().1;
    assert!(qf < 0.0);
    assert!((consistent - qf).abs() <= 1e-3 * qf.abs(), "{qf} {consistent}");
}

#[test]
fn solved_field_is_conformal_for_smooth_data() {
    let g = cap(16, 32);
    let f: Vec<f64> = g.grid.coords.iter().map(|&[x, y]| 1.0 + 0.5 * x - y * y).collect();
    let sol = solve_conformal_reparam(&g, &normal(&g, f), PI / 3.0).unwrap();
    assert!(sol.record.deficit < 1e-10, "{:?}", sol.record);
    let json = serde_json::to_string(&sol.record).unwrap();
    assert!(json.contains("\"pde_residual\""));
}

#[test]
fn rejects_mismatched_angle() {
    let g = cap(12, 24);
    assert!(solve_conformal_reparam(&g, &VariationField::zero(&g), PI / 4.0).is_err());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn total_keeps_normal_part_and_is_tangent(c in proptest::collection::vec(-1.0f64..1.0, 4)) {
            let g = cap(10, 20);
            let f: Vec<f64> = g.grid.coords.iter().map(|&[x, y]| c[0] + c[1] * x + c[2] * y + c[3] * x * y).collect();
            let sol = solve_conformal_reparam(&g, &normal(&g, f.clone()), PI / 3.0).unwrap();
            for (i, node) in g.nodes.iter().enumerate() {
                prop_assert!((sol.total.v[i].dot(&node.nu) - f[i]).abs() < 1e-10);
                prop_assert!(sol.sigma.v[i].dot(&node.nu).abs() < 1e-10);
            }
            prop_assert!(sol.record.tangency_residual < 1e-10);
        }
    }
}
