use std::f64::consts::PI;

use capillab::geometry::*;
use capillab::spectral::*;
use capillab::variation_lab::*;

const BESSEL_NEUMANN: f64 = 3.390_149_6; // (j′₁,₁)², j′₁,₁ = 1.841183781

fn uniform(nr: usize, np: usize) -> Grid {
    build_grid(&GridSpec::disk(nr, np).with_rule(RadialRule::Uniform)).unwrap()
}

fn flat_disk(grid: &Grid) -> GeometryField {
    let chart = ImmersionChart::FlatDisk { radius: 1.0, height: 0.0 };
    sample_geometry(&chart, grid, &AmbientRegion::SolidCylinder { radius: 1.0 }).unwrap()
}

fn cap(grid: &Grid) -> GeometryField {
    let chart = ImmersionChart::SphericalCap { theta_c: PI / 3.0, radius: 1.0 };
    sample_geometry(&chart, grid, &AmbientRegion::half_space()).unwrap()
}

fn neumann(grid: &Grid, shift: f64) -> AssembledForm {
    assemble_q_with(&flat_disk(grid), PI / 2.0, QOptions { curvature: false, shift }).unwrap()
}

#[test]
fn neumann_disk_matches_bessel_zero() {
    let f = neumann(&uniform(96, 192), 0.0);
    let r = eigs(&f, EigRequest::Smallest(4)).unwrap();
    assert!(r.eigenvalues[0].abs() < 1e-8);
    for l in &r.eigenvalues[1..3] {
        assert!((l - BESSEL_NEUMANN).abs() < 0.01 * BESSEL_NEUMANN, "{l}");
    }
    assert!(r.residuals.iter().all(|&e| e <= 1e-8), "{:?}", r.residuals);
    assert_eq!((r.index, r.nullity), (0, 1));
}

#[test]
fn shifted_neumann_form_has_one_negative_direction() {
    let f = neumann(&uniform(48, 96), -1.0);
    let r = eigs(&f, EigRequest::Smallest(3)).unwrap();
    assert!((r.eigenvalues[0] + 1.0).abs() < 1e-9);
    assert!((r.eigenvalues[1] - (BESSEL_NEUMANN - 1.0)).abs() < 0.02);
    assert_eq!(r.index, 1);
    let m = morse_index(&f, None).unwrap();
    assert_eq!((m.index, m.nullity), (1, 0));
    assert!(!m.boundary_case);
}

#[test]
fn galerkin_eigenvalues_decrease_under_nested_refinement() {
    let mut spec = GridSpec::disk(6, 12).with_rule(RadialRule::Uniform);
    let mut last: Option<Vec<f64>> = None;
    for _ in 0..3 {
        let f = neumann(&build_grid(&spec).unwrap(), 0.0);
        let r = eigs(&f, EigRequest::Smallest(8)).unwrap();
        if let Some(prev) = &last {
            for (fine, coarse) in r.eigenvalues.iter().zip(prev) {
                assert!(*fine <= coarse + 1e-9 * coarse.abs().max(1.0), "{fine} > {coarse}");
            }
        }
        last = Some(r.eigenvalues);
        spec = spec.refined();
    }
}

#[test]
fn eigenvectors_are_mass_orthogonal() {
    let f = neumann(&uniform(24, 48), 0.0);
    let r = eigs(&f, EigRequest::Smallest(6)).unwrap();
    for i in 0..6 {
        let mi = f.m.mul_vec(&r.vectors[i]);
        let ni = f.m.quad_form(&r.vectors[i]).sqrt();
        for j in 0..i {
            let nj = f.m.quad_form(&r.vectors[j]).sqrt();
            let c: f64 = mi.iter().zip(&r.vectors[j]).map(|(a, b)| a * b).sum::<f64>() / (ni * nj);
            assert!(c.abs() <= 1e-8, "{i} {j} {c}");
        }
    }
}

#[test]
fn forms_are_symmetric_with_positive_mass() {
    let g = cap(&uniform(12, 24));
    for f in [
        assemble_q(&g, PI / 3.0).unwrap(),
        assemble_qe(&g, 2.0, PI / 3.0).unwrap(),
        assemble_qe_with(&g, 2.0, PI / 3.0, QeVariant::Adapted).unwrap(),
    ] {
        assert!(f.s.asymmetry() <= 1e-12 * f.s.max_abs());
        assert!(f.m.to_dense().cholesky().is_some());
    }
}

#[test]
fn cap_constant_function_value() {
    let f = assemble_q(&cap(&uniform(24, 48)), PI / 3.0).unwrap();
    let one = vec![1.0; f.n()];
    // −2·(area 2π(1−cos θ))... = −2π − cot θ·√3π with the oracle-pinned sign
    assert!((f.value(&one) + 3.0 * PI).abs() < 1e-6, "{}", f.value(&one));
}

#[test]
fn cap_index_is_one_and_stable() {
    let mut spec = GridSpec::disk(12, 24).with_rule(RadialRule::Uniform);
    for _ in 0..3 {
        let grid = build_grid(&spec).unwrap();
        let f = assemble_q(&cap(&grid), PI / 3.0).unwrap();
        let m = morse_index(&f, None).unwrap();
        assert_eq!(m.index, 1, "{spec:?}");
        let r = eigs(&f, EigRequest::Smallest(3)).unwrap();
        assert!(r.eigenvalues[0] < 0.0 && r.eigenvalues[1] > 0.0);
        spec = spec.refined();
    }
}

#[test]
fn cap_volume_wetting_constrained_index() {
    let grid = uniform(24, 48);
    let g = cap(&grid);
    let f = assemble_q(&g, PI / 3.0).unwrap();
    let c = volume_wetting_constraints(&f, &g);
    assert_eq!(constrained_index(&f, &c, default_tol_null(&f)).unwrap(), 0);
}

#[test]
fn assembled_q_converges_to_quadrature_value() {
    let poly = vec![(0, 0, 1.0), (2, 0, 1.0), (1, 1, -0.5)];
    let eval = |x: f64, y: f64| 1.0 + x * x - 0.5 * x * y;
    let spectral = cap(&build_grid(&GridSpec::disk(32, 64)).unwrap());
    let s = make_variation_raw(&FieldRecipe::NormalScalar { f: ScalarRecipe::Polynomial { terms: poly } }, &spectral);
    let exact = analytic_hessian(HessianFormula::CmcCap, &spectral, &s, &HessianParams::new(2.0, PI / 3.0))
        .unwrap()
        .value;
    let mut errs = Vec::new();
    for n in [12, 24, 48] {
        let f = assemble_q(&cap(&uniform(n, 2 * n)), PI / 3.0).unwrap();
        errs.push((f.value(&f.interpolate_scalar(eval)) - exact).abs());
    }
    assert!(errs[2] < 1e-2 * exact.abs(), "{errs:?}");
    assert!(errs[1] / errs[2] > 3.0 && errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn energy_form_closed_forms() {
    let g = flat_disk(&uniform(24, 48));
    let f = assemble_qe(&g, 0.0, PI / 2.0).unwrap();
    let x = f.interpolate_vector(|_, _| V3::z());
    assert!((f.value(&x) - 2.0 * PI).abs() < 1e-10);
    assert_eq!(f.value(&vec![0.0; f.n()]), 0.0);
    let a = assemble_qe_with(&g, 0.0, PI / 2.0, QeVariant::Adapted).unwrap();
    assert!(a.value(&x).abs() < 1e-10);
}

#[test]
fn energy_form_matches_closed_form_hessian() {
    let terms = vec![(0, 2, 0, 1.0), (1, 1, 1, 0.5), (2, 0, 0, 1.0), (2, 2, 0, -1.0), (2, 0, 2, -1.0), (0, 0, 1, 0.3)];
    let eval = |x: f64, y: f64| {
        V3::new(x * x + 0.3 * y, 0.5 * x * y, 1.0 - x * x - y * y)
    };
    let spectral = cap(&build_grid(&GridSpec::disk(32, 64)).unwrap());
    let v = make_variation_raw(&FieldRecipe::Polynomial { terms }, &spectral);
    let h = analytic_hessian(HessianFormula::EnergyMod, &spectral, &v, &HessianParams::new(2.0, PI / 3.0)).unwrap();
    let f = assemble_qe(&cap(&uniform(96, 192)), 2.0, PI / 3.0).unwrap();
    let q = f.value(&f.interpolate_vector(eval));
    assert!((q - h.value).abs() <= 1e-4 * h.value.abs(), "{q} {}", h.value);
}

#[test]
fn energy_index_dominates_jacobi_index_on_cap() {
    let g = cap(&uniform(24, 48));
    let iq = morse_index(&assemble_q(&g, PI / 3.0).unwrap(), None).unwrap().index;
    for variant in [QeVariant::Paper, QeVariant::Adapted] {
        let ie = morse_index(&assemble_qe_with(&g, 2.0, PI / 3.0, variant).unwrap(), None).unwrap().index;
        assert!(iq <= ie, "{variant:?}: {iq} > {ie}");
    }
}

#[test]
fn heat_trace_of_neumann_disk() {
    let f = neumann(&uniform(12, 24), 0.0);
    let r = eigs(&f, EigRequest::All).unwrap();
    assert!(r.complete);
    let big = heat_trace(&r, 20.0).unwrap().value;
    assert!((big - 1.0).abs() < 1e-9, "{big} {:?}", &r.eigenvalues[..3]);
    let mut last = f64::INFINITY;
    for t in [0.01, 0.1, 1.0, 10.0] {
        let v = heat_trace(&r, t).unwrap().value;
        assert!(v < last);
        last = v;
    }
}

#[test]
fn counting_inequality_on_cap_spectrum() {
    let g = cap(&uniform(24, 48));
    let r = eigs(&assemble_q(&g, PI / 3.0).unwrap(), EigRequest::Smallest(20)).unwrap();
    // 4J² + 2h² + 2B² with J = 0, h = 2, B = 0 for the half-space
    let c = 8.0;
    for t in [0.01, 0.1, 1.0] {
        let chk = counting_check(&r, c, t).unwrap();
        assert!(chk.holds && !chk.count_truncated, "{chk:?}");
    }
}

#[test]
fn spectrum_csv_and_triplets() {
    let f = neumann(&uniform(6, 12), 0.0);
    let r = eigs(&f, EigRequest::All).unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("index,eigenvalue,residual\n"));
    assert_eq!(text.lines().count(), f.n() + 1);
    let mut buf = Vec::new();
    f.s.write_triplets(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let head: Vec<usize> = text.lines().next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(head, vec![f.n(), f.s.nnz()]);
}

#[test]
fn rejects_bad_angle() {
    let g = cap(&uniform(6, 12));
    assert!(assemble_q(&g, 0.0).is_err());
    assert!(assemble_qe(&g, 2.0, 2.0).is_err());
}
