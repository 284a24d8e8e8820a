//! Admissible quadruples `(X₀, X₁, Y₀, Y₁)`, stored combinatorially.
//!
//! Regions are finite unions of boxes, torus bands over circle arcs, or arcs
//! of a circle swept by a rotation. Points are materialised only on demand
//! through [`Region::samples`].

use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{int, rat, to_f64, LatticeClass, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    X0,
    X1,
    Y0,
    Y1,
}

impl Label {
    /// Residue scheme for 1-based arc index `i`: 1, 2, 3, 0 mod 4 ↦ X₀, Y₁, X₁, Y₀.
    pub fn for_index(i: usize) -> Label {
        match i % 4 {
            1 => Label::X0,
            2 => Label::Y1,
            3 => Label::X1,
            _ => Label::Y0,
        }
    }

    fn swap_y(self) -> Label {
        match self {
            Label::Y0 => Label::Y1,
            Label::Y1 => Label::Y0,
            other => other,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::X0 => "X0",
            Label::X1 => "X1",
            Label::Y0 => "Y0",
            Label::Y1 => "Y1",
        })
    }
}

/// Consecutive closed arcs of `ℝ/ℤ` with labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcPartition {
    breakpoints: Vec<Rational>,
    labels: Vec<Label>,
}

impl ArcPartition {
    /// `4k` equal arcs starting at 0, labeled by the residue scheme.
    pub fn equal(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPartition("need at least one block of four arcs".into()));
        }
        let count = 4 * k;
        Ok(ArcPartition {
            breakpoints: (0..count).map(|i| rat(i as i64, count as i64)).collect(),
            labels: (1..=count).map(Label::for_index).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Arc `i` (0-based) as `[start, end]` with `end ≤ 1`.
    pub fn arc(&self, i: usize) -> (Rational, Rational) {
        let start = self.breakpoints[i].clone();
        let end = self.breakpoints.get(i + 1).cloned().unwrap_or_else(Rational::one);
        (start, end)
    }

    pub fn arcs(&self) -> Vec<(Rational, Rational)> {
        (0..self.len()).map(|i| self.arc(i)).collect()
    }

    pub fn arcs_with(&self, label: Label) -> Vec<(Rational, Rational)> {
        (0..self.len()).filter(|&i| self.labels[i] == label).map(|i| self.arc(i)).collect()
    }

    fn with_y_swapped(&self) -> Self {
        ArcPartition {
            breakpoints: self.breakpoints.clone(),
            labels: self.labels.iter().map(|l| l.swap_y()).collect(),
        }
    }
}

/// Whether two closed arcs of `ℝ/ℤ` (each given with `0 ≤ start ≤ end ≤ 1`) meet.
fn arcs_meet(a: &(Rational, Rational), b: &(Rational, Rational)) -> bool {
    let overlap = |x: &(Rational, Rational), y: &(Rational, Rational)| x.0 <= y.1 && y.0 <= x.1;
    if overlap(a, b) {
        return true;
    }
    // 0 and 1 are the same point of the circle.
    let touches_zero = |x: &(Rational, Rational)| x.0.is_zero();
    let touches_one = |x: &(Rational, Rational)| x.1.is_one();
    (touches_zero(a) && touches_one(b)) || (touches_one(a) && touches_zero(b))
}

fn arc_sets_disjoint(a: &[(Rational, Rational)], b: &[(Rational, Rational)]) -> bool {
    a.iter().all(|x| b.iter().all(|y| !arcs_meet(x, y)))
}

/// Whether closed arcs cover the whole circle.
fn arcs_cover_circle(arcs: &[(Rational, Rational)]) -> bool {
    let mut sorted = arcs.to_vec();
    sorted.sort();
    let mut reach = Rational::zero();
    for (s, e) in sorted {
        if s > reach {
            return false;
        }
        if e > reach {
            reach = e;
        }
    }
    reach >= Rational::one()
}

/// A closed axis-parallel box with rational sides (possibly degenerate).
pub type RBox = Vec<(Rational, Rational)>;

fn boxes_meet(a: &RBox, b: &RBox) -> bool {
    a.iter().zip(b).all(|(x, y)| x.0 <= y.1 && y.0 <= x.1)
}

/// The linear fibration `θ ↦ ⟨α′, θ⟩ mod 1` of `ℝⁿ/ℤⁿ` together with a
/// unimodular change of coordinates whose first coordinate is the fibration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusFibration {
    direction: Vec<BigInt>,
    /// Columns `v_j` of a unimodular matrix `V` with `α′·V = e₁`.
    basis: Vec<Vec<BigInt>>,
}

impl TorusFibration {
    pub fn new(primitive: &[BigInt]) -> Result<Self> {
        let n = primitive.len();
        let mut a: Vec<BigInt> = primitive.to_vec();
        let mut cols: Vec<Vec<BigInt>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        loop {
            let nonzero: Vec<usize> = (0..n).filter(|&i| !a[i].is_zero()).collect();
            let Some(&pivot) = nonzero.iter().min_by_key(|&&i| a[i].abs()) else {
                return Err(Error::DegenerateClass);
            };
            if nonzero.len() == 1 {
                if !a[pivot].abs().is_one() {
                    return Err(Error::OutsideDomain("fibration class must be primitive".into()));
                }
                if a[pivot].is_negative() {
                    a[pivot] = -a[pivot].clone();
                    for e in cols[pivot].iter_mut() {
                        *e = -e.clone();
                    }
                }
                cols.swap(0, pivot);
                return Ok(TorusFibration {
                    direction: primitive.to_vec(),
                    basis: cols,
                });
            }
            for &j in &nonzero {
                if j == pivot {
                    continue;
                }
                let q = a[j].div_floor(&a[pivot]);
                a[j] = &a[j] - &q * &a[pivot];
                let pc = cols[pivot].clone();
                for (e, p) in cols[j].iter_mut().zip(&pc) {
                    *e = &*e - &q * p;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn direction(&self) -> &[BigInt] {
        &self.direction
    }

    /// `⟨α′, θ⟩ mod 1`.
    pub fn value(&self, theta: &[f64]) -> f64 {
        let v: f64 = self
            .direction
            .iter()
            .zip(theta)
            .map(|(a, t)| a.to_f64().unwrap_or(0.0) * t)
            .sum();
        v.rem_euclid(1.0)
    }

    /// The point with fibration coordinate `phi[0]` and transverse coordinates `phi[1..]`.
    pub fn point(&self, phi: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                self.basis
                    .iter()
                    .zip(phi)
                    .map(|(col, p)| col[i].to_f64().unwrap_or(0.0) * p)
                    .sum::<f64>()
                    .rem_euclid(1.0)
            })
            .collect()
    }
}

/// Distance on `ℝ/ℤ` from `t` to the closed arc `[s, e]`.
fn circle_distance_to_arc(t: f64, s: f64, e: f64) -> f64 {
    let t = t.rem_euclid(1.0);
    if t >= s && t <= e {
        return 0.0;
    }
    let d = |a: f64, b: f64| {
        let r = (a - b).rem_euclid(1.0);
        r.min(1.0 - r)
    };
    d(t, s).min(d(t, e))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// A union of boxes in chart coordinates.
    Boxes(Vec<RBox>),
    /// Preimage of a union of arcs under a linear torus fibration.
    TorusBands {
        fibration: TorusFibration,
        arcs: Vec<(Rational, Rational)>,
    },
    /// `{(R(nθ)·z, θ, 0) : z in an arc of the circle of area a, θ ∈ ℝ/ℤ}` in the chart `(x, y, θ, p)`.
    RotatedArcs {
        area: Rational,
        twist: i64,
        arcs: Vec<(Rational, Rational)>,
    },
}

impl Region {
    pub fn components(&self) -> usize {
        match self {
            Region::Boxes(b) => b.len(),
            Region::TorusBands { arcs, .. } | Region::RotatedArcs { arcs, .. } => arcs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.components() == 0
    }

    /// Exact disjointness on the combinatorial data.
    pub fn disjoint(&self, other: &Region) -> bool {
        match (self, other) {
            (Region::Boxes(a), Region::Boxes(b)) => a.iter().all(|x| b.iter().all(|y| !boxes_meet(x, y))),
            (
                Region::TorusBands { fibration: f, arcs: a },
                Region::TorusBands { fibration: g, arcs: b },
            ) if f == g => arc_sets_disjoint(a, b),
            (
                Region::RotatedArcs { area: r, twist: n, arcs: a },
                Region::RotatedArcs { area: s, twist: m, arcs: b },
            ) => r != s || (n == m && arc_sets_disjoint(a, b)),
            _ => false,
        }
    }

    /// Floating-point form for repeated distance queries.
    pub fn compile(&self) -> FloatRegion {
        let arcs_f = |arcs: &[(Rational, Rational)]| arcs.iter().map(|(s, e)| (to_f64(s), to_f64(e))).collect();
        match self {
            Region::Boxes(boxes) => FloatRegion::Boxes(
                boxes
                    .iter()
                    .map(|b| b.iter().map(|(lo, hi)| (to_f64(lo), to_f64(hi))).collect())
                    .collect(),
            ),
            Region::TorusBands { fibration, arcs } => FloatRegion::Bands {
                direction: fibration.direction.iter().map(|a| a.to_f64().unwrap_or(0.0)).collect(),
                arcs: arcs_f(arcs),
            },
            Region::RotatedArcs { area, twist, arcs } => FloatRegion::Rotated {
                radius: (to_f64(area) / std::f64::consts::PI).sqrt(),
                twist: *twist as f64,
                arcs: arcs_f(arcs),
            },
        }
    }

    /// Distance from a chart point to the region.
    pub fn distance(&self, z: &[f64]) -> f64 {
        self.compile().distance(z)
    }

    /// Smallest distance along the segment `z0 → z1` and where along it (fraction in `[0,1]`).
    pub fn segment_distance(&self, z0: &[f64], z1: &[f64]) -> (f64, f64) {
        self.compile().segment_distance(z0, z1)
    }

    /// Parameter-space dimension of one component.
    fn parameter_dim(&self) -> usize {
        match self {
            Region::Boxes(boxes) => boxes
                .first()
                .map(|b| b.iter().filter(|(lo, hi)| lo != hi).count())
                .unwrap_or(0),
            Region::TorusBands { fibration, .. } => fibration.dim(),
            Region::RotatedArcs { .. } => 2,
        }
    }

    /// The point of component `c` at parameter `u ∈ [0,1)^d`.
    pub fn point(&self, c: usize, u: &[f64]) -> Vec<f64> {
        match self {
            Region::Boxes(boxes) => {
                let mut k = 0;
                boxes[c]
                    .iter()
                    .map(|(lo, hi)| {
                        let (lo, hi) = (to_f64(lo), to_f64(hi));
                        if lo == hi {
                            lo
                        } else {
                            let v = lo + u[k] * (hi - lo);
                            k += 1;
                            v
                        }
                    })
                    .collect()
            }
            Region::TorusBands { fibration, arcs } => {
                let (s, e) = (to_f64(&arcs[c].0), to_f64(&arcs[c].1));
                let mut phi = u.to_vec();
                phi[0] = s + u[0] * (e - s);
                fibration.point(&phi)
            }
            Region::RotatedArcs { area, twist, arcs } => {
                let r = (to_f64(area) / std::f64::consts::PI).sqrt();
                let (s, e) = (to_f64(&arcs[c].0), to_f64(&arcs[c].1));
                let xi = s + u[0] * (e - s);
                let theta = u[1];
                let (x, y) = rotate(r * (TAU * xi).cos(), r * (TAU * xi).sin(), *twist as f64 * theta);
                vec![x, y, theta, 0.0]
            }
        }
    }

    /// `count` low-discrepancy points on each component, in component order.
    pub fn samples(&self, count: usize) -> Vec<Vec<f64>> {
        let d = self.parameter_dim();
        let mut out = Vec::with_capacity(count * self.components());
        for c in 0..self.components() {
            for i in 0..count {
                out.push(self.point(c, &halton(i, d)));
            }
        }
        out
    }
}

/// A [`Region`] with floating-point data; same chart, same distances.
#[derive(Clone, Debug, PartialEq)]
pub enum FloatRegion {
    Boxes(Vec<Vec<(f64, f64)>>),
    Bands { direction: Vec<f64>, arcs: Vec<(f64, f64)> },
    Rotated { radius: f64, twist: f64, arcs: Vec<(f64, f64)> },
}

impl FloatRegion {
    pub fn distance(&self, z: &[f64]) -> f64 {
        match self {
            FloatRegion::Boxes(boxes) => boxes.iter().map(|b| box_distance(b, z)).fold(f64::INFINITY, f64::min),
            FloatRegion::Bands { direction, arcs } => {
                let t = direction.iter().zip(z).map(|(a, v)| a * v).sum::<f64>();
                arcs.iter()
                    .map(|&(s, e)| circle_distance_to_arc(t, s, e))
                    .fold(f64::INFINITY, f64::min)
            }
            FloatRegion::Rotated { radius, twist, arcs } => {
                let r = *radius;
                let (u, v) = rotate(z[0], z[1], -twist * z[2]);
                let rho = u.hypot(v);
                let xi = v.atan2(u) / TAU;
                let planar = arcs
                    .iter()
                    .map(|&(s, e)| {
                        if circle_distance_to_arc(xi, s, e) == 0.0 {
                            (rho - r).abs()
                        } else {
                            [s, e]
                                .iter()
                                .map(|&a| {
                                    let (px, py) = (r * (TAU * a).cos(), r * (TAU * a).sin());
                                    (u - px).hypot(v - py)
                                })
                                .fold(f64::INFINITY, f64::min)
                        }
                    })
                    .fold(f64::INFINITY, f64::min);
                planar.hypot(z[3])
            }
        }
    }

    /// Smallest distance along the segment `z0 → z1` and where along it (fraction in `[0,1]`).
    pub fn segment_distance(&self, z0: &[f64], z1: &[f64]) -> (f64, f64) {
        let at = |s: f64| -> Vec<f64> { z0.iter().zip(z1).map(|(a, b)| a + s * (b - a)).collect() };
        match self {
            FloatRegion::Boxes(boxes) => {
                let mut best = (f64::INFINITY, 0.0);
                for b in boxes {
                    if let Some(s) = slab_entry(b, z0, z1) {
                        if best.0 > 0.0 || s < best.1 {
                            best = (0.0, s);
                        }
                        continue;
                    }
                    if best.0 == 0.0 {
                        continue;
                    }
                    // Distance to a box is convex along a line.
                    let (s, d) = golden_min(|s| box_distance(b, &at(s)));
                    if d < best.0 {
                        best = (d, s);
                    }
                }
                best
            }
            _ => {
                const N: usize = 16;
                let mut best = (f64::INFINITY, 0.0);
                for i in 0..=N {
                    let s = i as f64 / N as f64;
                    let d = self.distance(&at(s));
                    if d < best.0 {
                        best = (d, s);
                    }
                }
                let h = 1.0 / N as f64;
                let lo = (best.1 - h).max(0.0);
                let hi = (best.1 + h).min(1.0);
                let (s, d) = golden_min(|t| self.distance(&at(lo + t * (hi - lo))));
                if d < best.0 {
                    best = (d, lo + s * (hi - lo));
                }
                best
            }
        }
    }
}

/// First parameter in `[0,1]` where the segment `z0 → z1` meets the closed box.
fn slab_entry(b: &[(f64, f64)], z0: &[f64], z1: &[f64]) -> Option<f64> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for ((blo, bhi), (a, c)) in b.iter().zip(z0.iter().zip(z1)) {
        let d = c - a;
        if d == 0.0 {
            if a < blo || a > bhi {
                return None;
            }
        } else {
            let (t0, t1) = ((blo - a) / d, (bhi - a) / d);
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
            if lo > hi {
                return None;
            }
        }
    }
    Some(lo)
}

/// Rotation of the plane by `turns` full turns.
pub fn rotate(x: f64, y: f64, turns: f64) -> (f64, f64) {
    let (s, c) = (TAU * turns).sin_cos();
    (c * x - s * y, s * x + c * y)
}

fn box_distance(b: &[(f64, f64)], z: &[f64]) -> f64 {
    b.iter()
        .zip(z)
        .map(|(&(lo, hi), v)| (lo - v).max(v - hi).max(0.0))
        .map(|d| d * d)
        .sum::<f64>()
        .sqrt()
}

fn golden_min(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let mut best = ((a + b) / 2.0, f((a + b) / 2.0));
    for s in [0.0, 1.0] {
        let v = f(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    best
}

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: usize, base: u32) -> f64 {
    let b = base as usize;
    let mut f = 1.0 / base as f64;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f /= base as f64;
    }
    r
}

/// The `i`-th point of the Halton sequence in `[0,1)^d` (skipping the origin).
pub fn halton(i: usize, d: usize) -> Vec<f64> {
    (0..d).map(|j| radical_inverse(i + 1, PRIMES[j % PRIMES.len()])).collect()
}

/// Where the quadruple lives; fixes the chart used by its regions.
#[derive(Clone, Debug, PartialEq)]
pub enum Ambient {
    /// `ℝⁿ/ℤⁿ` with angle coordinates.
    Torus { n: usize },
    /// Neighbourhood of the rectangle `[0, A] × [0, 1]` in the plane, chart `(x, y)`.
    Strip { width: Rational },
    /// `ℝ⁴` with chart `(p₁, p₂, q₁, q₂)`.
    SplitSpace,
    /// `D(k) × T*_k S¹` with chart `(x, y, θ, p)`.
    ChekanovSpace { k: Rational },
    /// `(−ε, ε) × ℝ/2ℤ`, chart `(x, y)`.
    Annulus { eps: Rational },
    /// The plane with chart `(p, q)`.
    Plane,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleQuadruple {
    pub ambient: Ambient,
    pub x0: Region,
    pub x1: Region,
    pub y0: Region,
    pub y1: Region,
}

impl AdmissibleQuadruple {
    pub fn new(ambient: Ambient, x0: Region, x1: Region, y0: Region, y1: Region) -> Result<Self> {
        let q = AdmissibleQuadruple {
            ambient,
            x0,
            x1,
            y0,
            y1,
        };
        if !q.is_admissible() {
            return Err(Error::InvalidPartition("X₀ ∩ X₁ or Y₀ ∩ Y₁ is nonempty".into()));
        }
        Ok(q)
    }

    pub fn is_admissible(&self) -> bool {
        self.x0.disjoint(&self.x1) && self.y0.disjoint(&self.y1)
    }

    pub fn region(&self, label: Label) -> &Region {
        match label {
            Label::X0 => &self.x0,
            Label::X1 => &self.x1,
            Label::Y0 => &self.y0,
            Label::Y1 => &self.y1,
        }
    }
}

/// The quadruple cut from the torus by the fibration of `α` and `4k` arcs.
///
/// The fibration uses `±α′` with first nonzero entry positive; the opposite
/// sign is realised by exchanging `Y₀` and `Y₁`.
pub fn torus_quadruple(n: usize, alpha: &LatticeClass) -> Result<(ArcPartition, AdmissibleQuadruple)> {
    if alpha.dim() != n {
        return Err(Error::DimensionError {
            expected: n,
            found: alpha.dim(),
        });
    }
    let k = alpha
        .multiplicity()
        .to_usize()
        .ok_or_else(|| Error::InvalidPartition("multiplicity too large".into()))?;
    let mut direction = alpha.primitive_part().to_vec();
    let reversed = direction.iter().find(|e| !e.is_zero()).is_some_and(|e| e.is_negative());
    if reversed {
        direction.iter_mut().for_each(|e| *e = -e.clone());
    }
    let fibration = TorusFibration::new(&direction)?;
    let mut partition = ArcPartition::equal(k)?;
    if reversed {
        partition = partition.with_y_swapped();
    }
    let band = |l: Label| Region::TorusBands {
        fibration: fibration.clone(),
        arcs: partition.arcs_with(l),
    };
    let q = AdmissibleQuadruple::new(
        Ambient::Torus { n },
        band(Label::X0),
        band(Label::X1),
        band(Label::Y0),
        band(Label::Y1),
    )?;
    Ok((partition, q))
}

/// Whether the four torus regions together cover the torus.
pub fn covers_torus(partition: &ArcPartition) -> bool {
    arcs_cover_circle(&partition.arcs())
}

/// Top-edge intervals of the strip model, listed right to left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripPartition {
    pub width: Rational,
    /// `(left, right, label)` for `γ₁, γ₂, …` (right to left).
    pub intervals: Vec<(Rational, Rational, Label)>,
}

impl StripPartition {
    pub fn new(width: &Rational, k: u32, eps: &Rational) -> Result<Self> {
        if !width.is_positive() || !eps.is_positive() || k == 0 {
            return Err(Error::InvalidPartition("width, k and ε must be positive".into()));
        }
        let block = width / int(k as i64);
        let long = &block - int(3) * eps;
        if !long.is_positive() {
            return Err(Error::InvalidPartition(format!("A/k − 3ε = {long} is not positive")));
        }
        let count = 4 * k as usize - 3;
        let mut right = width.clone();
        let mut intervals = Vec::with_capacity(count);
        for i in 1..=count {
            let len = match i % 4 {
                1 if i == 1 => block.clone(),
                1 => long.clone(),
                _ => eps.clone(),
            };
            let left = &right - &len;
            let label = match i % 4 {
                1 => Label::X1,
                2 => Label::Y0,
                3 => Label::X0,
                _ => Label::Y1,
            };
            intervals.push((left.clone(), right, label));
            right = left;
        }
        debug_assert!(right.is_zero());
        Ok(StripPartition {
            width: width.clone(),
            intervals,
        })
    }

    pub fn lengths(&self) -> Vec<Rational> {
        self.intervals.iter().map(|(l, r, _)| r - l).collect()
    }

    /// Intervals with the given label, left to right.
    pub fn with_label(&self, label: Label) -> Vec<(Rational, Rational)> {
        let mut v: Vec<_> = self
            .intervals
            .iter()
            .filter(|(_, _, l)| *l == label)
            .map(|(a, b, _)| (a.clone(), b.clone()))
            .collect();
        v.sort();
        v
    }

    /// The four regions of the rectangle `[0, A] × [0, 1]` as boxes in `(x, y)`.
    pub fn regions(&self) -> [Vec<RBox>; 4] {
        let zero = Rational::zero;
        let one = Rational::one;
        let top = |l: Label| -> Vec<RBox> {
            self.with_label(l).into_iter().map(|(a, b)| vec![(a, b), (one(), one())]).collect()
        };
        let mut x0 = vec![vec![(zero(), self.width.clone()), (zero(), zero())]];
        x0.extend(top(Label::X0));
        let x1 = top(Label::X1);
        let mut y0 = vec![vec![(zero(), zero()), (zero(), one())]];
        y0.extend(top(Label::Y0));
        let mut y1 = vec![vec![(self.width.clone(), self.width.clone()), (zero(), one())]];
        y1.extend(top(Label::Y1));
        [x0, x1, y0, y1]
    }
}

/// The strip model on `Q(A) = [0, A] × [0, 1]`.
pub fn surface_model_partition(a: &Rational, k: u32, eps: &Rational) -> Result<(StripPartition, AdmissibleQuadruple)> {
    let p = StripPartition::new(a, k, eps)?;
    let [x0, x1, y0, y1] = p.regions();
    let q = AdmissibleQuadruple::new(
        Ambient::Strip { width: a.clone() },
        Region::Boxes(x0),
        Region::Boxes(x1),
        Region::Boxes(y0),
        Region::Boxes(y1),
    )?;
    Ok((p, q))
}

/// The product quadruple `Π₁ × (strip model on [0, xₙ] × [0, 1])` in `(p₁, p₂, q₁, q₂)`.
///
/// `Π₁` is the boundary of the square `[0, side]²` in the `(p₁, q₁)` plane.
pub fn split_quadruple(side: &Rational, xn: &Rational, k: u32, eps: &Rational) -> Result<(StripPartition, AdmissibleQuadruple)> {
    if !side.is_positive() {
        return Err(Error::InvalidPartition("square side must be positive".into()));
    }
    let p = StripPartition::new(xn, k, eps)?;
    let zero = Rational::zero;
    let s = side.clone();
    // (p₁, q₁) edges of the square.
    let square: Vec<[(Rational, Rational); 2]> = vec![
        [(zero(), s.clone()), (zero(), zero())],
        [(zero(), s.clone()), (s.clone(), s.clone())],
        [(zero(), zero()), (zero(), s.clone())],
        [(s.clone(), s.clone()), (zero(), s.clone())],
    ];
    let lift = |planar: Vec<RBox>| -> Region {
        let mut out = Vec::new();
        for e in &square {
            for b in &planar {
                out.push(vec![e[0].clone(), b[0].clone(), e[1].clone(), b[1].clone()]);
            }
        }
        Region::Boxes(out)
    };
    let [x0, x1, y0, y1] = p.regions();
    let q = AdmissibleQuadruple::new(Ambient::SplitSpace, lift(x0), lift(x1), lift(y0), lift(y1))?;
    Ok((p, q))
}

/// The rotating quadruple on `D(k) × T*_k S¹`.
pub fn chekanov_quadruple(a: &Rational, m: u32, n: i64, k: &Rational) -> Result<AdmissibleQuadruple> {
    if !a.is_positive() || m == 0 {
        return Err(Error::InvalidModel("a and m must be positive".into()));
    }
    if k <= a || *k <= int(4) * a * int(n.abs()) {
        return Err(Error::InvalidModel(format!("k = {k} must exceed both a and 4a|n|")));
    }
    let p = ArcPartition::equal(m as usize)?;
    let region = |l: Label| Region::RotatedArcs {
        area: a.clone(),
        twist: n,
        arcs: p.arcs_with(l),
    };
    AdmissibleQuadruple::new(
        Ambient::ChekanovSpace { k: k.clone() },
        region(Label::X0),
        region(Label::X1),
        region(Label::Y0),
        region(Label::Y1),
    )
}

/// `4k + 1` equal intervals of `(−ε, ε) × {0}`, left to right, with residue labels.
pub fn annulus_quadruple(eps: &Rational, k: u32) -> Result<(Vec<(Rational, Rational, Label)>, AdmissibleQuadruple)> {
    if !eps.is_positive() || k == 0 {
        return Err(Error::InvalidPartition("ε and k must be positive".into()));
    }
    let count = 4 * k as i64 + 1;
    let len = int(2) * eps / int(count);
    let intervals: Vec<(Rational, Rational, Label)> = (0..count)
        .map(|i| {
            let l = -eps.clone() + &len * int(i);
            (l.clone(), l + &len, Label::for_index(i as usize + 1))
        })
        .collect();
    let region = |lab: Label| {
        Region::Boxes(
            intervals
                .iter()
                .filter(|(_, _, l)| *l == lab)
                .map(|(a, b, _)| vec![(a.clone(), b.clone()), (Rational::zero(), Rational::zero())])
                .collect(),
        )
    };
    let q = AdmissibleQuadruple::new(
        Ambient::Annulus { eps: eps.clone() },
        region(Label::X0),
        region(Label::X1),
        region(Label::Y0),
        region(Label::Y1),
    )?;
    Ok((intervals, q))
}

/// The unit square in the `(p, q)` plane with `X₀, X₁` its left and right
/// edges and `Y₁, Y₀` its bottom and top edges.
pub fn unit_box_quadruple() -> AdmissibleQuadruple {
    let (z, o) = (Rational::zero, Rational::one);
    AdmissibleQuadruple::new(
        Ambient::Plane,
        Region::Boxes(vec![vec![(z(), z()), (z(), o())]]),
        Region::Boxes(vec![vec![(o(), o()), (z(), o())]]),
        Region::Boxes(vec![vec![(z(), o()), (o(), o())]]),
        Region::Boxes(vec![vec![(z(), o()), (z(), z())]]),
    )
    .expect("opposite edges are disjoint")
}

/// The unit square in the `(x, y)` plane with `X₀, X₁` its bottom and top
/// edges and `Y₀, Y₁` its left and right edges.
pub fn shear_box_quadruple() -> AdmissibleQuadruple {
    let (z, o) = (Rational::zero, Rational::one);
    AdmissibleQuadruple::new(
        Ambient::Plane,
        Region::Boxes(vec![vec![(z(), o()), (z(), z())]]),
        Region::Boxes(vec![vec![(z(), o()), (o(), o())]]),
        Region::Boxes(vec![vec![(z(), z()), (z(), o())]]),
        Region::Boxes(vec![vec![(o(), o()), (z(), o())]]),
    )
    .expect("opposite edges are disjoint")
}
