//! Reference implementations and property checks shared by the test targets.
#![allow(dead_code)]

use lagflux_core::engine::{
    chekanov_bound, cpn_fiber_bound, s2s2_fiber_bound, split_torus_bound, surface_bound, InvariantBound,
    Provenance,
};
use lagflux_core::lattice::{int, rat, Extended, Rational, RationalVector};
use lagflux_core::models::{poisson_bracket, Chart, HamiltonianModel};
use lagflux_core::polytope::{ray_exit, RationalPolytope, RayQuery};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&e| BigInt::from(e)).collect()
}

pub fn fin(q: Rational) -> Extended {
    Extended::Finite(q)
}

/// What the plane case table asserts for `x` and the class `(m₁, m₂)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaneClaim {
    Exact(Extended),
    Lower(Rational),
}

/// The plane case table written out directly from its hypotheses.
pub fn plane_reference(x: (&Rational, &Rational), m: (i64, i64)) -> PlaneClaim {
    let (mut x1, mut x2) = (x.0.clone(), x.1.clone());
    let (mut m1, mut m2) = (m.0, m.1);
    if m1 <= 0 && m2 <= 0 {
        return PlaneClaim::Exact(Extended::Infinity);
    }
    let xmin = std::cmp::min(&x1, &x2).clone();
    if m2 == 0 && m1 > 0 && xmin < &x1 / int(m1) {
        return PlaneClaim::Exact(Extended::Infinity);
    }
    if m1 == 0 && m2 > 0 && xmin < &x2 / int(m2) {
        return PlaneClaim::Exact(Extended::Infinity);
    }
    if x1 == x2 && m1 == m2 {
        return PlaneClaim::Exact(fin(&x1 / int(m1)));
    }
    if x1 > x2 {
        std::mem::swap(&mut x1, &mut x2);
        std::mem::swap(&mut m1, &mut m2);
    }
    if int(2) * &x1 <= x2 && m1 > 0 && m2 <= 2 * m1 {
        return PlaneClaim::Exact(fin(&x1 / int(m1)));
    }
    if m1 > 0 && int(m2) * &x1 <= int(m1) * &x2 {
        PlaneClaim::Lower(&x1 / int(m1))
    } else {
        PlaneClaim::Lower(&x2 / int(m2))
    }
}

/// Whether an engine bound agrees with the case table. Where the table only
/// gives a lower bound, an exact answer is accepted when its upper side is
/// the weakly-exact bound.
pub fn agrees_with_table(b: &InvariantBound, claim: &PlaneClaim) -> bool {
    match claim {
        PlaneClaim::Exact(v) => b.exact_value() == Some(v),
        PlaneClaim::Lower(l) => {
            let lower_ok = b.lower().value() == Some(&fin(l.clone()));
            let upper_ok = match b.upper().source() {
                None => true,
                Some(s) => s == Provenance::WeaklyExact || s == Provenance::DiskCountSpace,
            };
            lower_ok && upper_ok
        }
    }
}

/// Smallest `t ∈ (0, bound]` with `w − t·s ∈ g·ℤⁿ`, by scanning the candidates of the first moving coordinate.
pub fn lattice_scan(w: &RationalVector, s: &RationalVector, g: &Rational, bound: &Rational) -> Option<Rational> {
    let i = s.entries().iter().position(|e| !e.is_zero())?;
    let (wi, si) = (&w.entries()[i], &s.entries()[i]);
    // t = (wᵢ − g·j)/sᵢ for integers j; scan j so that 0 < t ≤ bound.
    let step = g / si.abs();
    let mut candidates = Vec::new();
    let j_range = ((bound / &step).ceil() + int(2)).to_integer();
    let base = (wi / g).floor().to_integer();
    let mut j = &base - &j_range;
    while j <= &base + &j_range {
        let t = (wi - g * Rational::from_integer(j.clone())) / si;
        if t.is_positive() && &t <= bound {
            candidates.push(t);
        }
        j += 1;
    }
    candidates.sort();
    candidates.into_iter().find(|t| {
        w.entries()
            .iter()
            .zip(s.entries())
            .all(|(a, b)| ((a - t * b) / g).is_integer())
    })
}

/// `sup{t : x − tα ∈ P}` as the largest hyperplane crossing that stays in `P`.
pub fn facet_scan_exit(p: &RationalPolytope, x: &RationalVector, a: &RationalVector) -> Extended {
    let mut best: Option<Rational> = None;
    let mut bounded = false;
    for h in p.halfspaces() {
        let rate: Rational = h
            .normal
            .iter()
            .zip(a.entries())
            .map(|(n, v)| Rational::from_integer(n.clone()) * v)
            .fold(Rational::zero(), |acc, e| acc + e);
        if rate.is_zero() {
            continue;
        }
        if rate.is_negative() {
            bounded = true;
        }
        let t = -h.slack(x) / &rate;
        if t.is_negative() {
            continue;
        }
        if p.contains(&x.shifted(&t, a)) && best.as_ref().is_none_or(|b| &t > b) {
            best = Some(t);
        }
    }
    match (bounded, best) {
        (true, Some(t)) => Extended::Finite(t),
        _ => Extended::Infinity,
    }
}

fn pos_q(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (1..=max_num, 1..=max_den).prop_map(|(p, q)| rat(p, q))
}

fn nonzero_ints(dim: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, dim).prop_filter("nonzero", |v| v.iter().any(|e| *e != 0))
}

/// A polytope, an interior point and a direction.
pub fn exit_case() -> impl Strategy<Value = (RationalPolytope, RationalVector, RationalVector)> {
    (2usize..=4, 0usize..3).prop_flat_map(|(d, kind)| {
        let point = prop::collection::vec(1i64..=20, d);
        (Just(d), Just(kind), point, nonzero_ints(d))
            .prop_map(|(d, kind, pt, a)| {
                let (p, x) = match kind {
                    0 => (RationalPolytope::orthant(d), pt.iter().map(|&e| rat(e, 3)).collect()),
                    1 => {
                        let total: i64 = pt.iter().sum::<i64>() + 1;
                        (RationalPolytope::simplex(d), pt.iter().map(|&e| rat(e, total)).collect())
                    }
                    _ => (
                        RationalPolytope::cube(d, int(-1), int(1)),
                        pt.iter().map(|&e| rat(e - 10, 11)).collect(),
                    ),
                };
                (p, RationalVector::new(x).unwrap(), RationalVector::from_ints(&a))
            })
    })
}

pub fn check_exit_homogeneity(p: &RationalPolytope, x: &RationalVector, a: &RationalVector, c: &Rational) -> Result<(), TestCaseError> {
    let base = ray_exit(p, &RayQuery::new(x.clone(), a.clone())).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let scaled = ray_exit(p, &RayQuery::new(x.clone(), a.scale(c))).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(scaled, base.scale(&c.recip()));
    Ok(())
}

pub fn homogeneity_case() -> impl Strategy<Value = (RationalPolytope, RationalVector, RationalVector, Rational)> {
    (exit_case(), pos_q(12, 5)).prop_map(|((p, x, a), c)| (p, x, a, c))
}

/// Positive `x` and an integer class in dimension 2–4.
pub fn split_case() -> impl Strategy<Value = (Vec<Rational>, Vec<i64>)> {
    (2usize..=4).prop_flat_map(|n| (prop::collection::vec(pos_q(12, 4), n), prop::collection::vec(-4i64..=4, n)))
}

fn values(b: &InvariantBound) -> (Option<Extended>, Option<Extended>, bool) {
    (b.lower().value().cloned(), b.upper().value().cloned(), b.is_exact())
}

pub fn check_permutation(x: &[Rational], m: &[i64], perm: &[usize]) -> Result<(), TestCaseError> {
    let xv = RationalVector::new(x.to_vec()).unwrap();
    let b = split_torus_bound(&xv, &big(m)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let px = xv.permuted(perm);
    let pm: Vec<i64> = perm.iter().map(|&i| m[i]).collect();
    let pb = split_torus_bound(&px, &big(&pm)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(values(&b), values(&pb));
    Ok(())
}

pub fn check_x_homogeneity(x: &[Rational], m: &[i64], c: &Rational) -> Result<(), TestCaseError> {
    let xv = RationalVector::new(x.to_vec()).unwrap();
    let b = split_torus_bound(&xv, &big(m)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let cb = split_torus_bound(&xv.scale(c), &big(m)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(values(&cb), values(&b.scaled(c)));
    Ok(())
}

pub fn check_sandwich(b: &InvariantBound) -> Result<(), TestCaseError> {
    if let (Some(l), Some(u)) = (b.lower().value(), b.upper().value()) {
        prop_assert!(l <= u, "lower {} above upper {}", l, u);
    }
    if b.is_exact() {
        prop_assert_eq!(b.lower().value(), b.upper().value());
    }
    Ok(())
}

/// One bound from a randomly chosen family.
pub fn any_bound() -> impl Strategy<Value = InvariantBound> {
    prop_oneof![
        split_case().prop_map(|(x, m)| split_torus_bound(&RationalVector::new(x).unwrap(), &big(&m)).unwrap()),
        (prop::collection::vec(1i64..=9, 2), nonzero_ints(2)).prop_map(|(p, a)| {
            let total = p.iter().sum::<i64>() + 1;
            let x = RationalVector::from_ratios(&[(p[0], total), (p[1], total)]);
            cpn_fiber_bound(2, &x, &big(&a)).unwrap()
        }),
        (prop::collection::vec(1i64..=9, 2), nonzero_ints(2)).prop_map(|(p, a)| {
            let x = RationalVector::from_ratios(&[(p[0], 10), (p[1], 10)]);
            s2s2_fiber_bound(&x, &big(&a)).unwrap()
        }),
        (pos_q(9, 4), -4i64..=4).prop_map(|(a, m)| chekanov_bound(&a, m, 1).unwrap()),
        (pos_q(9, 4), pos_q(9, 4), any::<bool>(), (1i64..=4).prop_flat_map(|k| prop_oneof![Just(k), Just(-k)]))
            .prop_map(|(a, b, sep, k)| surface_bound(&fin(a), &fin(b), sep, k).unwrap()),
    ]
}

pub fn homogeneity_split_case() -> impl Strategy<Value = (Vec<Rational>, Vec<i64>, Rational)> {
    (split_case(), pos_q(9, 4)).prop_map(|((x, m), c)| (x, m, c))
}

pub fn permutation_case() -> impl Strategy<Value = (Vec<Rational>, Vec<i64>, Vec<usize>)> {
    split_case().prop_flat_map(|(x, m)| {
        let n = x.len();
        (Just(x), Just(m), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

/// Two smooth test Hamiltonians on the plane.
pub fn bracket_pair(kind: usize) -> (HamiltonianModel, HamiltonianModel) {
    let c = Chart::standard(1);
    match kind % 3 {
        0 => (
            HamiltonianModel::harmonic(),
            HamiltonianModel::from_fn("cubic", c, |z| z[0] * z[0] * z[1] + z[1].sin()),
        ),
        1 => (
            HamiltonianModel::from_fn("wave", c.clone(), |z| (z[0] + 2.0 * z[1]).cos()),
            HamiltonianModel::from_fn("bump", c, |z| (-(z[0] * z[0] + z[1] * z[1])).exp()),
        ),
        _ => (
            HamiltonianModel::linear(c.clone(), &[0.5, -1.5]),
            HamiltonianModel::from_fn("quartic", c, |z| z[0].powi(4) - z[0] * z[1]),
        ),
    }
}

pub fn bracket_case() -> impl Strategy<Value = (usize, f64, f64, f64)> {
    (0usize..3, -2.0f64..2.0, -2.0f64..2.0, 1e-4f64..1e-2)
}

pub fn check_antisymmetry(kind: usize, x: f64, y: f64, h: f64) -> Result<(), TestCaseError> {
    let (f, g) = bracket_pair(kind);
    let a = poisson_bracket(&f, &g, &[x, y], h).unwrap();
    let b = poisson_bracket(&g, &f, &[x, y], h).unwrap();
    prop_assert!((a + b).abs() <= 10.0 * h * h, "{} + {} at h = {}", a, b, h);
    Ok(())
}
