//! The engine against independent brute-force references.

mod common;

use common::{agrees_with_table, big, facet_scan_exit, fin, lattice_scan, plane_reference, PlaneClaim};
use lagflux_core::engine::{cpn_fiber_bound, region_diagram, s2s2_fiber_bound, split_torus_bound, Window};
use lagflux_core::lattice::{in_scaled_lattice, int, rat, smallest_shift, Extended, Rational, RationalVector};
use lagflux_core::polytope::{ray_exit, RationalPolytope, RayQuery};

fn plane_points() -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for (a, b) in [(1, 3), (2, 2), (1, 1), (3, 1), (1, 2), (2, 5), (5, 3), (1, 7)] {
        out.push((int(a), int(b)));
        out.push((rat(a, 3), rat(b, 3)));
    }
    out
}

#[test]
fn plane_case_table_on_a_grid() {
    let mut mismatches = Vec::new();
    for (x1, x2) in plane_points() {
        let x = RationalVector::new(vec![x1.clone(), x2.clone()]).unwrap();
        for m in -5..=5 {
            for n in -5..=5 {
                if (m, n) == (0, 0) {
                    continue;
                }
                let b = split_torus_bound(&x, &big(&[m, n])).unwrap();
                let claim = plane_reference((&x1, &x2), (m, n));
                if !agrees_with_table(&b, &claim) {
                    mismatches.push(format!("x = {x}, ({m}, {n}): engine {b}, table {claim:?}"));
                }
            }
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

#[test]
fn diagram_agrees_with_bounds() {
    let x = RationalVector::from_ints(&[1, 3]);
    let d = region_diagram(&x, Window::square(4)).unwrap();
    assert_eq!(d.cells.len(), 81);
    for c in &d.cells {
        let b = split_torus_bound(&x, &big(&[c.m, c.n])).unwrap();
        assert_eq!(c.bound, b);
    }
}

#[test]
fn finite_plane_claims_are_attained_by_the_exit() {
    // Outside the infinite cases the lower side is the orthant exit.
    for (x1, x2) in plane_points() {
        let x = RationalVector::new(vec![x1.clone(), x2.clone()]).unwrap();
        for m in 1..=4 {
            for n in -3..=4 {
                let exit = ray_exit(&RationalPolytope::orthant(2), &RayQuery::new(x.clone(), RationalVector::from_ints(&[m, n])))
                    .unwrap();
                match plane_reference((&x1, &x2), (m, n)) {
                    PlaneClaim::Lower(l) => assert_eq!(exit, fin(l)),
                    PlaneClaim::Exact(Extended::Finite(v)) => assert_eq!(exit, fin(v)),
                    PlaneClaim::Exact(Extended::Infinity) => {}
                }
            }
        }
    }
}

#[test]
fn smallest_shift_matches_lattice_scan() {
    let gs = [rat(1, 2), rat(1, 3), int(1), rat(2, 5)];
    let mut checked = 0;
    for num in 1..=7 {
        for den in [3, 4, 5, 6] {
            for a in -3..=3 {
                for b in -3..=3 {
                    if (a, b) == (0, 0) {
                        continue;
                    }
                    let w = RationalVector::from_ratios(&[(num, den), (num + 1, den)]);
                    let s = RationalVector::from_ints(&[a, b]);
                    for g in &gs {
                        let fast = smallest_shift(&w, &s, g).unwrap();
                        // Solutions repeat with period at most g·den²; scan well beyond it.
                        let slow = lattice_scan(&w, &s, g, &(g * int(4 * den * den)));
                        assert_eq!(fast, slow, "w = {w}, s = {s}, g = {g}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn ray_exit_matches_facet_scan() {
    let polytopes = [
        RationalPolytope::orthant(2),
        RationalPolytope::simplex(2),
        RationalPolytope::unit_square(),
        RationalPolytope::cube(3, int(-1), int(2)),
        RationalPolytope::simplex(3),
    ];
    for p in &polytopes {
        let d = p.dim();
        for i in 1..=5 {
            let x = RationalVector::new((0..d).map(|j| rat(i + j as i64, 7 * d as i64)).collect()).unwrap();
            for code in 0..5i64.pow(d as u32) {
                let a: Vec<i64> = (0..d).map(|j| (code / 5i64.pow(j as u32)) % 5 - 2).collect();
                if a.iter().all(|&e| e == 0) {
                    continue;
                }
                let a = RationalVector::from_ints(&a);
                let exit = ray_exit(p, &RayQuery::new(x.clone(), a.clone())).unwrap();
                assert_eq!(exit, facet_scan_exit(p, &x, &a), "x = {x}, α = {a}");
            }
        }
    }
}

#[test]
fn lattice_exactness_means_the_exit_point_is_a_lattice_point() {
    let cases: Vec<(RationalVector, [i64; 2], bool)> = vec![
        (RationalVector::from_ratios(&[(1, 3), (1, 3)]), [1, 1], true),
        (RationalVector::from_ratios(&[(1, 4), (1, 4)]), [1, 0], true),
        (RationalVector::from_ratios(&[(1, 2), (1, 2)]), [1, 1], false),
        (RationalVector::from_ratios(&[(3, 4), (1, 4)]), [1, -1], false),
        (RationalVector::from_ratios(&[(1, 2), (1, 3)]), [2, 1], false),
    ];
    for (x, a, projective) in cases {
        let (b, p, g) = if projective {
            (cpn_fiber_bound(2, &x, &big(&a)).unwrap(), RationalPolytope::simplex(2), rat(1, 2))
        } else {
            (s2s2_fiber_bound(&x, &big(&a)).unwrap(), RationalPolytope::unit_square(), int(1))
        };
        let dir = RationalVector::from_ints(&a);
        let exit = ray_exit(&p, &RayQuery::new(x.clone(), dir.clone())).unwrap();
        if let Some(Extended::Finite(t)) = b.exact_value() {
            assert_eq!(&exit, &fin(t.clone()));
            assert!(in_scaled_lattice(&x.shifted(t, &dir), &g), "x = {x}, α = {dir}");
        }
    }
}
