use std::f64::consts::PI;

use capillab::bounds::*;
use capillab::geometry::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Piecewise formula written out directly from the three inequalities.
fn r_reference(g: i64, m: i64, b: i64, d: i64) -> i64 {
    let lhs = 2 * b + d;
    let low = 4 * g - 4 + 2 * m;
    let high = 8 * g - 8 + 4 * m;
    if lhs > high {
        0
    } else if lhs >= low {
        // floor of a non-positive half-integer
        let half = if d % 2 == 0 { -d / 2 } else { -(d + 1) / 2 };
        4 * g - 2 + 2 * m - 2 * b + 2 * half
    } else {
        6 * g - 6 + 3 * m - 2 * b - d
    }
}

#[test]
fn r_table_and_random_signatures() {
    let r = |g, m, b, d| topological_r(&TopologySignature::new(g, m, b, d).unwrap()).r;
    assert_eq!(r(0, 1, 0, 0), 0);
    assert_eq!(r(1, 1, 0, 0), 3);
    assert_eq!(r(0, 2, 0, 0), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..50 {
        let (g, m, b, d) = (rng.random_range(0..5), rng.random_range(1..6), rng.random_range(0..8), rng.random_range(0..8));
        assert_eq!(r(g, m, b, d), r_reference(g as i64, m as i64, b as i64, d as i64), "{g} {m} {b} {d}");
    }
}

#[test]
fn closed_form_matches_numeric_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = 10f64.powf(rng.random_range(-2.0..2.0));
        let b = 10f64.powf(rng.random_range(-2.0..2.0));
        let (_, closed) = profile_minimum(a, b).unwrap();
        let (_, numeric) = profile_minimum_numeric(a, b);
        assert!((closed - numeric).abs() <= 1e-6 * closed, "α={a} β={b}: {closed} vs {numeric}");
    }
}

fn cap_inputs() -> BoundInputs {
    BoundInputs { theta: PI / 3.0, h: 2.0, j: 0.0, b: 0.0, area: PI, rho: 10.0, r: 0, delta_range: (1e-3, 1e3) }
}

#[test]
fn cap_bound_covers_index_and_serializes() {
    let rec = index_bound(&cap_inputs()).unwrap();
    assert!(rec.bound >= 1.0);
    assert!(!rec.degenerate);
    let s = serde_json::to_string(&rec).unwrap();
    let back: BoundRecord = serde_json::from_str(&s).unwrap();
    assert_eq!(back.bound, rec.bound);
    let c = 0.5;
    let s2 = (1.0 + 1.0 / (PI / 3.0).sin()).powi(2);
    assert!((rec.paper_shaped(c) - c * s2 * 4.0 * PI).abs() < 1e-12);
}

#[test]
fn degenerate_and_invalid_inputs() {
    let flat = BoundInputs { h: 0.0, theta: PI / 2.0, ..cap_inputs() };
    assert!(index_bound(&flat).unwrap().degenerate);
    assert!(index_bound(&BoundInputs { delta_range: (1.0, 0.5), ..cap_inputs() }).is_err());
    assert!(index_bound(&BoundInputs { rho: 0.0, ..cap_inputs() }).is_err());
    assert!(profile_minimum(0.0, 1.0).is_err());
}

#[test]
fn sobolev_disk_in_cylinder_anchor() {
    let grid = build_grid(&GridSpec::disk(24, 48)).unwrap();
    let chart = ImmersionChart::FlatDisk { radius: 1.0, height: 0.0 };
    let g = sample_geometry(&chart, &grid, &AmbientRegion::SolidCylinder { radius: 1.0 }).unwrap();
    let rec = sobolev_check(&g, &vec![1.0; grid.n_nodes()], PI / 2.0, 1.0).unwrap();
    assert!((rec.lhs - (2.0 * PI).sqrt() * PI.sqrt()).abs() < 1e-9);
    assert!((rec.rhs - 2.0 * PI).abs() < 1e-9);
    assert!(rec.margin > 0.0);
    let zero = sobolev_check(&g, &vec![0.0; grid.n_nodes()], PI / 2.0, 1.0).unwrap();
    assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));
    assert!(sobolev_check(&g, &vec![1.0; grid.n_nodes()], PI / 2.0, 0.0).is_err());
}

#[test]
fn sobolev_random_polynomials_on_cap() {
    let chart = ImmersionChart::SphericalCap { theta_c: PI / 3.0, radius: 1.0 };
    let grid = build_grid(&GridSpec::disk(24, 48)).unwrap();
    let g = sample_geometry(&chart, &grid, &AmbientRegion::half_space()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let c: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f: Vec<f64> = grid
            .coords
            .iter()
            .map(|&[x, y]| {
                c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
                    + c[6] * x * x * x + c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y
            })
            .collect();
        let rec = sobolev_check(&g, &f, PI / 3.0, 10.0).unwrap();
        assert!(rec.margin >= 0.0, "{rec:?}");
    }
}

#[test]
fn extension_bounds() {
    for (amb, eps, limit) in [
        (AmbientRegion::UnitBall { radius: 1.0 }, 0.5, 2.0),
        (AmbientRegion::SolidCylinder { radius: 1.0 }, 0.5, 2.0),
        (AmbientRegion::half_space(), 1.0, 1.0 / 9.0),
    ] {
        let rec = normal_extension(&amb, eps, 21).unwrap();
        assert!((rec.grad_limit - limit).abs() < 1e-12);
        assert!(rec.norm_ok && rec.grad_ok, "{rec:?}");
        assert!((rec.sup_norm - 1.0).abs() < 1e-12);
        assert!(rec.beyond_reach_probes > 0);
        assert_eq!(rec.sup_beyond_reach, 0.0);
    }
    assert!(normal_extension(&AmbientRegion::UnitBall { radius: 1.0 }, 1.0, 5).is_err());
}

proptest! {
    #[test]
    fn r_vanishes_in_high_case(g in 0u32..6, m in 1u32..6, b in 0u32..30, d in 0u32..30) {
        let sig = TopologySignature::new(g, m, b, d).unwrap();
        let r = topological_r(&sig);
        if (2 * b + d) as i64 > 8 * g as i64 - 8 + 4 * m as i64 {
            prop_assert_eq!(r.r, 0);
        }
        prop_assert_eq!(maslov_index(&sig), 2 * (2 - 2 * g as i64 - m as i64) + 2 * b as i64 + d as i64);
    }

    #[test]
    fn bound_monotone(area in 0.1f64..10.0, h in 0.0f64..4.0, b in 0.0f64..3.0, th in 0.1f64..1.4, bump in 0.01f64..1.0) {
        let base = BoundInputs { theta: th, h, j: 0.0, b, area, rho: 5.0, r: 0, delta_range: (1e-3, 1e3) };
        let v = index_bound(&base).unwrap().bound;
        let tol = 1e-9 * v;
        let at = |i: BoundInputs| index_bound(&i).unwrap().bound;
        let th2 = (th + bump).min(PI / 2.0 - 1e-3);
        let (va, vh, vb, vt) = (
            at(BoundInputs { area: area + bump, ..base }),
            at(BoundInputs { h: h + bump, ..base }),
            at(BoundInputs { b: b + bump, ..base }),
            at(BoundInputs { theta: th2, ..base }),
        );
        prop_assert!(va >= v - tol);
        prop_assert!(vh >= v - tol);
        prop_assert!(vb >= v - tol);
        prop_assert!(vt <= v + tol);
    }
}
