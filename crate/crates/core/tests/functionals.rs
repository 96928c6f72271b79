use std::f64::consts::PI;

use capillab::functionals::*;
use capillab::geometry::*;
use capillab::variation_lab::*;

fn cap(theta: f64, nr: usize, np: usize) -> GeometryField {
    let grid = build_grid(&GridSpec::disk(nr, np)).unwrap();
    sample_geometry(
        &ImmersionChart::SphericalCap { theta_c: theta, radius: 1.0 },
        &grid,
        &AmbientRegion::half_space(),
    )
    .unwrap()
}

fn disk(chart: ImmersionChart, ambient: AmbientRegion) -> GeometryField {
    let grid = build_grid(&GridSpec::disk(16, 32)).unwrap();
    sample_geometry(&chart, &grid, &ambient).unwrap()
}

fn flat() -> ImmersionChart {
    ImmersionChart::FlatDisk { radius: 1.0, height: 0.0 }
}

#[test]
fn areas_of_model_surfaces() {
    assert!((area(&disk(flat(), AmbientRegion::FreeSpace)) - PI).abs() < 1e-12);
    assert!((area(&cap(PI / 3.0, 128, 256)) - PI).abs() < 1e-6);
    let a = area(&cap(PI / 6.0, 32, 64));
    assert!((a - 2.0 * PI * (1.0 - (PI / 6.0).cos())).abs() < 1e-10);
    assert!((a - 0.84179).abs() < 1e-5);
}

#[test]
fn energy_versus_area() {
    let c = cap(PI / 3.0, 32, 64);
    assert!((dirichlet_energy(&c) - area(&c)).abs() < 1e-8);
    assert!((dirichlet_energy(&disk(flat(), AmbientRegion::FreeSpace)) - PI).abs() < 1e-12);
    let lin = disk(ImmersionChart::LinearMap { a: 2.0, b: 1.0 }, AmbientRegion::FreeSpace);
    assert!((dirichlet_energy(&lin) - 2.5 * PI).abs() < 1e-12);
    assert!((area(&lin) - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn volume_derivative_along_normal_flow_is_area() {
    let c = cap(PI / 3.0, 24, 48);
    let nu = make_variation_raw(&FieldRecipe::NormalScalar { f: ScalarRecipe::Constant { value: 1.0 } }, &c);
    let fam = VariationFamily::new(&c, nu.clone(), Profile::Linear).with_retraction(Retraction::None);
    let d = fd_derivative(&FunctionalId::volume(1.0), &fam, 1).unwrap();
    assert!((d.value - PI).abs() < 1e-8, "{d:?}");
    let fv = first_variation(&FunctionalId::volume(1.0), &c, &nu).unwrap();
    assert!((fv.value - PI).abs() < 1e-8);
}

#[test]
fn zero_family_is_constant_and_wetting_starts_at_zero() {
    let c = cap(PI / 3.0, 12, 24);
    let fam = VariationFamily::new(&c, VariationField::zero(&c), Profile::Linear);
    for tag in [FunctionalTag::Area, FunctionalTag::Energy, FunctionalTag::AreaMod] {
        let f = FunctionalId::new(tag, 2.0, PI / 3.0);
        let a = functional_along_family(&f, &fam, 0.0).unwrap();
        let b = functional_along_family(&f, &fam, 0.1).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
    let v = make_variation(&FieldRecipe::RandomSmooth { seed: 3, modes: 4, amplitude: 1.0 }, &c);
    let fam = VariationFamily::new(&c, v, Profile::Linear);
    assert_eq!(functional_along_family(&FunctionalId::wetting(PI / 3.0), &fam, 0.0).unwrap(), 0.0);
}

#[test]
fn wetting_first_variation_along_conormal() {
    let c = cap(PI / 3.0, 16, 64);
    // ν̂ on the boundary: horizontal radial field, tangent to the plane.
    let mut v = VariationField::zero(&c);
    for b in &c.boundary {
        v.v[b.node] = b.nu_hat;
    }
    let v = capillab::variation_lab::field::from_parts(&c, v.v, v.vx, v.vy);
    let d = first_variation(&FunctionalId::wetting(PI / 3.0), &c, &v).unwrap();
    assert!((d.value + 0.5 * 3f64.sqrt() * PI).abs() < 1e-10, "{}", d.value);
    assert!((d.value + 2.72070).abs() < 1e-5);
}

#[test]
fn capillary_cap_is_critical() {
    let f = FunctionalId::area_mod(2.0, PI / 3.0);
    let mut last = f64::INFINITY;
    for (nr, np) in [(8, 16), (16, 32), (32, 64)] {
        let c = cap(PI / 3.0, nr, np);
        let v = make_variation(&FieldRecipe::RandomSmooth { seed: 11, modes: 4, amplitude: 1.0 }, &c);
        let d = first_variation(&f, &c, &v).unwrap();
        let crit = d.criticality.unwrap();
        assert!(crit.mean_curvature < 1e-10 && crit.contact_angle < 1e-10);
        assert!(d.value.abs() < 1e-8 || d.value.abs() < last / 4.0, "{} vs {}", d.value, last);
        last = d.value.abs();
    }
}

#[test]
fn fd_first_variations_match_analytic() {
    let c = cap(PI / 3.0, 20, 40);
    for seed in [1, 2, 3] {
        let v = make_variation(&FieldRecipe::RandomSmooth { seed, modes: 4, amplitude: 1.0 }, &c);
        for f in [
            FunctionalId::area(),
            FunctionalId::energy(),
            FunctionalId::volume(2.0),
            FunctionalId::wetting(PI / 3.0),
        ] {
            let fam = VariationFamily::new(&c, v.clone(), Profile::Cosine);
            let fd = fd_derivative(&f, &fam, 1).unwrap();
            let an = first_variation(&f, &c, &v).unwrap().value;
            assert!((fd.value - an).abs() <= 1e-7 * (1.0 + an.abs()), "{:?}: {} vs {}", f.tag, fd.value, an);
        }
    }
}

#[test]
fn area_and_energy_variations_agree_on_conformal_charts() {
    let c = cap(PI / 6.0, 20, 40);
    for seed in 0..5 {
        let v = make_variation(&FieldRecipe::RandomSmooth { seed, modes: 4, amplitude: 1.0 }, &c);
        let a = first_variation_area(&c, &v);
        let e = first_variation_energy(&c, &v);
        assert!((a - e).abs() <= 1e-8 * a.abs().max(1e-3), "{a} {e}");
    }
}

#[test]
fn variations_are_family_independent() {
    let c = disk(flat(), AmbientRegion::SolidCylinder { radius: 1.0 });
    let v = make_variation(&FieldRecipe::RandomSmooth { seed: 5, modes: 4, amplitude: 1.0 }, &c);
    for f in [FunctionalId::volume(1.0), FunctionalId::wetting(PI / 4.0)] {
        let lin = fd_derivative(&f, &VariationFamily::new(&c, v.clone(), Profile::Linear), 1).unwrap();
        let cos = fd_derivative(&f, &VariationFamily::new(&c, v.clone(), Profile::Cosine), 1).unwrap();
        assert!((lin.value - cos.value).abs() <= 1e-6 * lin.value.abs().max(1e-6), "{lin:?} {cos:?}");
    }
}
