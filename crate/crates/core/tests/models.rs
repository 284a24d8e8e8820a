use lagflux_core::dynamics::{delta_h, find_chords, integrate, ChordConfig};
use lagflux_core::lattice::{int, rat};
use lagflux_core::models::{
    build_annulus_fg, build_chekanov_h, build_split_h, build_surface_g, certify_values, max_slope_on, poisson_bracket,
    split_constant_feasible, split_constant_range, Chart, HamiltonianModel,
};
use lagflux_core::quadruple::{
    annulus_quadruple, chekanov_quadruple, split_quadruple, surface_model_partition, Label, Region,
};
use lagflux_core::Error;
use std::f64::consts::PI;

#[test]
fn surface_model_examples() {
    let (g, _) = build_surface_g(&int(3), 3, &rat(1, 20), &rat(1, 200)).unwrap();
    let (_, q) = surface_model_partition(&int(3), 3, &rat(1, 20)).unwrap();
    let cert = certify_values(&g, &q, 256);
    assert!(cert.matches(1e-9), "{cert:?}");
    assert_eq!(cert.max_y0, 0.0);
    assert_eq!(cert.min_y1, 1.0);

    let (g, profile) = build_surface_g(&int(2), 1, &rat(1, 10), &rat(1, 100)).unwrap();
    let (strip, _) = surface_model_partition(&int(2), 1, &rat(1, 10)).unwrap();
    let slope = max_slope_on(&profile, &strip.with_label(Label::X1));
    assert!(slope < 5.0 / 8.0, "slope {slope}");
    assert_eq!(g.declared, Some((0.0, 1.0)));

    assert!(matches!(
        build_surface_g(&int(1), 1, &rat(1, 3), &rat(1, 100)),
        Err(Error::InvalidModel(_) | Error::InvalidPartition(_))
    ));
}

#[test]
fn surface_flow_moves_vertically_at_the_local_slope() {
    let (g, profile) = build_surface_g(&int(3), 3, &rat(1, 20), &rat(1, 200)).unwrap();
    // Middle of the first rising strip, read off the profile knots.
    let x = 2.5;
    let slope = profile.eval(x).1;
    assert!(slope > 0.0);
    let tr = integrate(&g, &[x, 0.0], 0.1, 1e-3).unwrap();
    let end = tr.end().unwrap();
    assert_eq!(end[0], x);
    assert!((end[1] - 0.1 * slope).abs() < 1e-9, "{end:?} vs slope {slope}");
}

#[test]
fn split_constant_examples() {
    let (lo, hi) = split_constant_range(&int(1), &int(3), 1, &rat(1, 10)).unwrap();
    assert!((lo - 1.0).abs() < 1e-12 && (hi - 2.6).abs() < 1e-12);
    assert!(split_constant_feasible(&int(1), &int(3), 1, &rat(1, 10), &int(2)));
    let (lo, hi) = split_constant_range(&int(1), &int(3), 2, &rat(1, 10)).unwrap();
    assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.1).abs() < 1e-12);
    assert!(build_split_h(&int(1), &int(3), 2, &rat(1, 10), &rat(21, 20), &rat(1, 200)).is_ok());
    assert!(split_constant_range(&int(1), &int(1), 1, &rat(1, 10)).is_none());
    assert!(matches!(
        build_split_h(&int(1), &int(1), 1, &rat(1, 10), &int(2), &rat(1, 200)),
        Err(Error::InvalidModel(_))
    ));
}

#[test]
fn split_model_values_and_gap() {
    let h = build_split_h(&int(1), &int(3), 1, &rat(1, 10), &int(2), &rat(1, 200)).unwrap();
    let (_, q) = split_quadruple(&int(1), &int(3), 1, &rat(1, 10)).unwrap();
    assert!((delta_h(&h, &q, 512).unwrap() - 1.0).abs() < 1e-9);
    assert!(certify_values(&h, &q, 256).matches(1e-9));
}

#[test]
fn annulus_interval_counts() {
    for (k, count) in [(1, 5), (2, 9)] {
        let (intervals, q) = annulus_quadruple(&rat(1, 2), k).unwrap();
        assert_eq!(intervals.len(), count);
        let (f, g) = build_annulus_fg(&rat(1, 2), k).unwrap();
        assert!((delta_h(&g, &q, 256).unwrap() - 1.0).abs() < 1e-12);
        for i in 0..50 {
            let z = [-0.45 + 0.018 * i as f64, 0.04 * i as f64];
            assert!(poisson_bracket(&f, &g, &z, 1e-4).unwrap().abs() < 1e-8);
        }
    }
}

#[test]
fn bracket_of_a_function_with_itself_vanishes() {
    let f = HamiltonianModel::from_fn("mixed", Chart::standard(1), |z| (z[0] * z[1]).sin() + z[0] * z[0]);
    for z in [[0.1, 0.7], [-1.2, 0.4], [2.0, -0.3]] {
        assert_eq!(poisson_bracket(&f, &f, &z, 1e-4).unwrap(), 0.0);
    }
}

#[test]
fn rotating_model_momentum_tracks_the_enclosed_area() {
    // On β ≡ 1, ṗ = −∂θH = −n·ṡ with s = π(x² + y²), so p = n(a − s) from the circle.
    let (a, n) = (1.0, 1.0);
    let (h, _) = build_chekanov_h(&int(1), 2, 1, &int(9), &rat(1, 20), &rat(1, 200)).unwrap();
    let circle = Region::RotatedArcs {
        area: int(1),
        twist: 1,
        arcs: vec![(int(0), int(1))],
    };
    for z in circle.samples(24) {
        let tr = integrate(&h, &z, 0.5, 1e-3).unwrap();
        for p in &tr.points {
            let s = PI * (p[0] * p[0] + p[1] * p[1]);
            assert!((p[3] - n * (a - s)).abs() < 1e-6, "p = {}, s = {s}", p[3]);
        }
    }
}

#[test]
fn rotating_model_is_theta_independent_without_twist() {
    let (h, _) = build_chekanov_h(&int(1), 1, 0, &int(5), &rat(1, 20), &rat(1, 200)).unwrap();
    let mut g = [0.0; 4];
    for (x, y, p) in [(0.1, 0.2, 0.0), (-0.3, 0.25, 0.5), (0.05, -0.4, -0.9)] {
        for theta in [0.0, 0.3, 0.77] {
            h.gradient(&[x, y, theta, p], &mut g);
            assert_eq!(g[2], 0.0);
        }
    }
    assert!(matches!(
        build_chekanov_h(&int(1), 1, 1, &int(3), &rat(1, 20), &rat(1, 200)),
        Err(Error::InvalidModel(_))
    ));
}

#[test]
fn rotating_model_chords_are_not_much_shorter_than_a_over_m() {
    let (h, _) = build_chekanov_h(&int(1), 2, 1, &int(9), &rat(1, 20), &rat(1, 200)).unwrap();
    let q = chekanov_quadruple(&int(1), 2, 1, &int(9)).unwrap();
    assert!(certify_values(&h, &q, 128).matches(1e-9));
    let s = find_chords(&h, &q, ChordConfig { samples: 64, horizon: 1.0, dt: 1e-3 });
    assert!(s.chords() > 0 && s.failures() == 0);
    assert!(s.min_time().unwrap() >= 0.5 - 2.0 / 20.0);
}
