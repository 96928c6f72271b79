use std::f64::consts::PI;

use capillab::geometry::*;
use capillab::variation_lab::*;

fn sample(chart: ImmersionChart, ambient: AmbientRegion, nr: usize, np: usize) -> GeometryField {
    let grid = build_grid(&GridSpec::disk(nr, np)).unwrap();
    sample_geometry(&chart, &grid, &ambient).unwrap()
}

fn cap(theta: f64) -> GeometryField {
    sample(ImmersionChart::SphericalCap { theta_c: theta, radius: 1.0 }, AmbientRegion::half_space(), 24, 48)
}

fn flat_disk() -> GeometryField {
    sample(ImmersionChart::FlatDisk { radius: 1.0, height: 0.0 }, AmbientRegion::FreeSpace, 16, 32)
}

#[test]
fn flat_disk_closed_form() {
    let g = flat_disk();
    let v = make_variation(&FieldRecipe::Polynomial { terms: vec![(0, 2, 0, 1.0)] }, &g);
    let d = conformal_deficit(&g, &v);
    assert!((d.value - PI).abs() < 1e-10, "{}", d.value);
    for (i, &[x, _]) in g.grid.coords.iter().enumerate() {
        assert!((d.eta[i].re - x).abs() < 1e-14 && d.eta[i].im.abs() < 1e-14);
    }
    let rec = verify_comparison(&g, &v).unwrap();
    assert!((rec.fd_linear - PI).abs() < 1e-6, "{rec:?}");
    assert!(rec.passes());
    assert!(rec.area_linear.abs() < 1e-8);
}

#[test]
fn identity_on_caps_with_random_fields() {
    for theta in [PI / 6.0, PI / 3.0] {
        let g = cap(theta);
        for seed in [1, 2, 3] {
            let v = make_variation(&FieldRecipe::RandomSmooth { seed, modes: 4, amplitude: 1.0 }, &g);
            let rec = verify_comparison(&g, &v).unwrap();
            assert!(rec.passes(), "theta {theta} seed {seed}: {rec:?}");
            assert!(rec.family_spread < 1e-6, "{rec:?}");
        }
    }
}

#[test]
fn killing_fields_have_no_deficit() {
    let g = cap(PI / 3.0);
    for recipe in [
        FieldRecipe::Rotation { axis: [0.0, 0.0, 1.0], center: [0.0; 3] },
        FieldRecipe::Translation { direction: [1.0, -2.0, 0.0] },
    ] {
        let v = make_variation(&recipe, &g);
        assert!(v.tangency_residual < 1e-12);
        assert!(conformal_deficit(&g, &v).value < 1e-10);
        let rec = verify_comparison(&g, &v).unwrap();
        assert!(rec.fd_linear.abs() < 1e-6 && rec.passes(), "{rec:?}");
    }
    assert_eq!(conformal_deficit(&g, &VariationField::zero(&g)).value, 0.0);
}

#[test]
fn deficit_is_quadratic() {
    let g = cap(PI / 3.0);
    let v = make_variation(&FieldRecipe::RandomSmooth { seed: 9, modes: 4, amplitude: 1.0 }, &g);
    let base = conformal_deficit(&g, &v).value;
    for c in [2.0, -1.0, 0.5] {
        let d = conformal_deficit(&g, &v.scaled(c)).value;
        assert!((d - c * c * base).abs() <= 1e-10 * base * c * c);
    }
}

#[test]
fn non_conformal_chart_is_rejected() {
    let g = sample(ImmersionChart::LinearMap { a: 2.0, b: 1.0 }, AmbientRegion::FreeSpace, 8, 16);
    let v = make_variation(&FieldRecipe::Zero, &g);
    assert!(verify_comparison(&g, &v).is_err());
}
