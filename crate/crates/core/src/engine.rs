//! Case analysis producing two-sided bounds on `bp` and `def` for each family.
//!
//! Every side of a bound records the result it came from. A side that no
//! result in scope controls is [`Side::Unknown`], which is distinct from `+∞`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{int, rat, smallest_shift, Extended, LatticeClass, Rational, RationalVector};
use crate::polytope::{ray_exit, RationalPolytope, RayQuery};

/// Which published result a bound side comes from. Displays as a short tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    /// Lower bound by the exit parameter of the moment-polytope ray.
    ShapeExit,
    /// Equality with the exit parameter when the ambient space is the preimage of the open polytope.
    InteriorEquality,
    /// Upper bound for classes proportional to the relative symplectic class.
    WeaklyExact,
    /// Upper bound from a nonvanishing disk count, four-dimensional case.
    DiskCountPlane,
    /// Upper bound from a nonvanishing disk count, general dimension.
    DiskCountSpace,
    SurfaceSeparating,
    SurfaceNonSeparating,
    ChekanovLower,
    ChekanovNegative,
    /// Split tori: the orthant exit `min xᵢ/mᵢ`, or `+∞` when no entry is positive.
    SplitOrthant,
    SplitDiagonal,
    SplitSmallCoordinate,
    PlaneNonPositive,
    PlaneAxis,
    PlaneFirstCoordinate,
    PlaneSecondCoordinate,
    PlaneDiskCount,
    PlaneMonotone,
    ProjectiveLattice,
    ProjectiveExact,
    QuadricLattice,
}

impl Provenance {
    pub const ALL: [Provenance; 21] = [
        Provenance::ShapeExit,
        Provenance::InteriorEquality,
        Provenance::WeaklyExact,
        Provenance::DiskCountPlane,
        Provenance::DiskCountSpace,
        Provenance::SurfaceSeparating,
        Provenance::SurfaceNonSeparating,
        Provenance::ChekanovLower,
        Provenance::ChekanovNegative,
        Provenance::SplitOrthant,
        Provenance::SplitDiagonal,
        Provenance::SplitSmallCoordinate,
        Provenance::PlaneNonPositive,
        Provenance::PlaneAxis,
        Provenance::PlaneFirstCoordinate,
        Provenance::PlaneSecondCoordinate,
        Provenance::PlaneDiskCount,
        Provenance::PlaneMonotone,
        Provenance::ProjectiveLattice,
        Provenance::ProjectiveExact,
        Provenance::QuadricLattice,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Provenance::ShapeExit => "Thm-2.4",
            Provenance::InteriorEquality => "Rem-2.5",
            Provenance::WeaklyExact => "Thm-2.1",
            Provenance::DiskCountPlane => "Thm-2.6",
            Provenance::DiskCountSpace => "Thm-2.11",
            Provenance::SurfaceSeparating => "Thm-2.2",
            Provenance::SurfaceNonSeparating => "Thm-2.3",
            Provenance::ChekanovLower => "Thm-2.13-A",
            Provenance::ChekanovNegative => "Thm-2.13-B",
            Provenance::SplitOrthant => "Thm-2.15-A",
            Provenance::SplitDiagonal => "Thm-2.15-B",
            Provenance::SplitSmallCoordinate => "Thm-2.15-C",
            Provenance::PlaneNonPositive => "Cor-2.8-A",
            Provenance::PlaneAxis => "Cor-2.8-B",
            Provenance::PlaneFirstCoordinate => "Cor-2.8-C",
            Provenance::PlaneSecondCoordinate => "Cor-2.8-D",
            Provenance::PlaneDiskCount => "Cor-2.8-E",
            Provenance::PlaneMonotone => "Cor-2.9",
            Provenance::ProjectiveLattice => "Cor-2.18",
            Provenance::ProjectiveExact => "Cor-2.19",
            Provenance::QuadricLattice => "Cor-2.21",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Provenance {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Provenance::ALL
            .iter()
            .copied()
            .find(|p| p.tag() == s)
            .ok_or_else(|| format!("unknown provenance tag {s:?}"))
    }
}

impl Serialize for Provenance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Provenance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One side of a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Known { value: Extended, source: Provenance },
    Unknown,
}

impl Side {
    pub fn known(value: Extended, source: Provenance) -> Side {
        Side::Known { value, source }
    }

    pub fn value(&self) -> Option<&Extended> {
        match self {
            Side::Known { value, .. } => Some(value),
            Side::Unknown => None,
        }
    }

    pub fn source(&self) -> Option<Provenance> {
        match self {
            Side::Known { source, .. } => Some(*source),
            Side::Unknown => None,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Known { value, source } => write!(f, "{value} [{source}]"),
            Side::Unknown => f.write_str("unknown"),
        }
    }
}

/// Bounds `lower ≤ bp ≤ def ≤ upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantBound {
    lower: Side,
    upper: Side,
    exact: bool,
}

impl InvariantBound {
    /// Combines two sides, marking the bound exact when they coincide.
    ///
    /// Panics if both sides are known and `lower > upper`: that would mean two
    /// cited results contradict each other.
    pub fn new(lower: Side, upper: Side) -> Self {
        let exact = match (&lower, &upper) {
            (Side::Known { value: l, .. }, Side::Known { value: u, .. }) => {
                assert!(l <= u, "inconsistent bound: lower {l} exceeds upper {u}");
                l == u
            }
            // Nothing exceeds +∞, so an infinite lower bound closes the interval.
            (Side::Known { value: Extended::Infinity, .. }, Side::Unknown) => true,
            _ => false,
        };
        let upper = match (&lower, upper) {
            (Side::Known { value: Extended::Infinity, source }, Side::Unknown) => {
                Side::known(Extended::Infinity, *source)
            }
            (_, u) => u,
        };
        InvariantBound { lower, upper, exact }
    }

    pub fn exact(value: Extended, source: Provenance) -> Self {
        Self::new(Side::known(value.clone(), source), Side::known(value, source))
    }

    pub fn lower_only(value: Extended, source: Provenance) -> Self {
        Self::new(Side::known(value, source), Side::Unknown)
    }

    pub fn unknown() -> Self {
        Self::new(Side::Unknown, Side::Unknown)
    }

    pub fn lower(&self) -> &Side {
        &self.lower
    }

    pub fn upper(&self) -> &Side {
        &self.upper
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// The common value of an exact bound.
    pub fn exact_value(&self) -> Option<&Extended> {
        if self.exact {
            self.lower.value()
        } else {
            None
        }
    }

    /// Both sides multiplied by a positive rational.
    pub fn scaled(&self, c: &Rational) -> InvariantBound {
        let scale = |s: &Side| match s {
            Side::Known { value, source } => Side::known(value.scale(c), *source),
            Side::Unknown => Side::Unknown,
        };
        InvariantBound::new(scale(&self.lower), scale(&self.upper))
    }
}

impl fmt::Display for InvariantBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            let source = self.upper.source().or(self.lower.source());
            match (self.lower.value(), source) {
                (Some(v), Some(src)) => write!(f, "exact {v} [{src}]"),
                _ => f.write_str("unknown"),
            }
        } else {
            write!(f, "lower {}, upper {}", self.lower, self.upper)
        }
    }
}

/// Periods on a basis `A₁, …, A_N` of relative second homology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativePeriodData {
    pub omega_periods: Vec<Rational>,
    pub alpha_periods: Vec<Rational>,
    pub maslov: Vec<i64>,
}

impl RelativePeriodData {
    pub fn new(omega_periods: Vec<Rational>, alpha_periods: Vec<Rational>, maslov: Vec<i64>) -> Result<Self> {
        check_dim(omega_periods.len(), alpha_periods.len())?;
        check_dim(omega_periods.len(), maslov.len())?;
        if let Some(mu) = maslov.iter().find(|mu| *mu % 2 != 0) {
            return Err(Error::OutsideDomain(format!("Maslov index {mu} is odd")));
        }
        Ok(RelativePeriodData {
            omega_periods,
            alpha_periods,
            maslov,
        })
    }
}

/// `C` when `∂α = [ω]/C` for some `C > 0`.
pub fn weakly_exact_upper(d: &RelativePeriodData) -> Option<Rational> {
    let mut c: Option<Rational> = None;
    for (w, a) in d.omega_periods.iter().zip(&d.alpha_periods) {
        if !w.is_positive() || !a.is_positive() {
            return None;
        }
        let ratio = w / a;
        match &c {
            None => c = Some(ratio),
            Some(prev) if *prev != ratio => return None,
            Some(_) => {}
        }
    }
    c
}

/// Like [`disk_count_upper`] but explains a failed hypothesis.
pub fn disk_count_check(n: usize, d: &RelativePeriodData, disk_count_nonzero: bool) -> std::result::Result<Rational, String> {
    if !disk_count_nonzero {
        return Err("disk count not asserted nonzero".into());
    }
    let len = d.omega_periods.len();
    if len < 2 || (n == 2 && len != 2) || (n > 2 && len != n) {
        return Err(format!("expected {n} period classes, found {len}"));
    }
    let a = &d.omega_periods[0];
    let sigma = &d.alpha_periods[0];
    if !sigma.is_positive() {
        return Err(format!("σ = {sigma} is not positive"));
    }
    if !a.is_positive() {
        return Err(format!("ω(A) = {a} is not positive"));
    }
    if d.maslov[0] != 2 {
        return Err(format!("μ(A) = {} ≠ 2", d.maslov[0]));
    }
    if n == 2 {
        let b = &d.omega_periods[1];
        let rho = &d.alpha_periods[1];
        let mu_b = d.maslov[1];
        if mu_b < 2 {
            return Err(format!("μ(B) = {mu_b} is not of the form 2k with k ≥ 1"));
        }
        let k_plus_one = int(mu_b / 2 + 1);
        if !(rho / sigma <= k_plus_one && k_plus_one <= b / a) {
            return Err(format!("ρ/σ ≤ k+1 ≤ ω(B)/ω(A) fails for ρ/σ = {}, k+1 = {k_plus_one}, ω(B)/ω(A) = {}", rho / sigma, b / a));
        }
        return Ok(a / sigma);
    }
    if d.maslov.iter().any(|&mu| mu != 2) {
        return Err("all Maslov indices must equal 2".into());
    }
    let b = &d.omega_periods[1];
    let rho = &d.alpha_periods[1];
    if d.omega_periods[1..].iter().any(|w| w != b) || d.alpha_periods[1..].iter().any(|r| r != rho) {
        return Err("the non-distinguished classes must share ω and ∂α".into());
    }
    let threshold = if n % 2 == 0 { rat(n as i64 + 2, 2) } else { rat(n as i64 + 3, 2) };
    if !(rho / sigma <= threshold && threshold <= b / a) {
        return Err(format!("ρ/σ ≤ {threshold} ≤ b/a fails for ρ/σ = {}, b/a = {}", rho / sigma, b / a));
    }
    Ok(a / sigma)
}

/// `ω(A)/σ` when the disk-count hypotheses hold for the distinguished first class.
pub fn disk_count_upper(n: usize, d: &RelativePeriodData, disk_count_nonzero: bool) -> Option<Rational> {
    disk_count_check(n, d, disk_count_nonzero).ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbientMode {
    /// The ambient space is the preimage of the open polytope.
    InteriorOnly,
    /// The fiber sits in the whole (possibly compact) toric manifold.
    FullAmbient,
}

/// Lower bound by the ray exit; exact in the interior-only ambient.
pub fn toric_fiber_bound(
    delta: &RationalPolytope,
    x: &RationalVector,
    alpha: &LatticeClass,
    mode: AmbientMode,
) -> Result<InvariantBound> {
    check_dim(delta.dim(), x.dim())?;
    check_dim(delta.dim(), alpha.dim())?;
    if !delta.contains_in_interior(x) {
        return Err(Error::OutsideDomain(format!("{x} is not an interior point of the polytope")));
    }
    let l = ray_exit(delta, &RayQuery::new(x.clone(), alpha.as_vector()))?;
    Ok(match mode {
        AmbientMode::InteriorOnly => InvariantBound::exact(l, Provenance::InteriorEquality),
        AmbientMode::FullAmbient => InvariantBound::lower_only(l, Provenance::ShapeExit),
    })
}

fn positive_entries(x: &RationalVector) -> Result<()> {
    match x.entries().iter().find(|e| !e.is_positive()) {
        Some(e) => Err(Error::OutsideDomain(format!("split torus coordinates must be positive, found {e}"))),
        None => Ok(()),
    }
}

/// The single positive axis `(i, k)` if `m = k·eᵢ` with `k > 0`.
fn positive_axis(m: &[BigInt]) -> Option<(usize, BigInt)> {
    let mut nonzero = m.iter().enumerate().filter(|(_, e)| !e.is_zero());
    let (i, k) = nonzero.next()?;
    if nonzero.next().is_some() || !k.is_positive() {
        return None;
    }
    Some((i, k.clone()))
}

/// Bounds for the split torus `T(x) ⊂ ℂⁿ` and the class `m`.
///
/// ```
/// use lagflux_core::engine::{split_torus_bound, Provenance};
/// use lagflux_core::lattice::{int, Extended, RationalVector};
/// use num_bigint::BigInt;
/// let m: Vec<BigInt> = [1, 2].iter().map(|&e| BigInt::from(e)).collect();
/// let b = split_torus_bound(&RationalVector::from_ints(&[1, 3]), &m).unwrap();
/// assert_eq!(b.exact_value(), Some(&Extended::Finite(int(1))));
/// assert_eq!(b.upper().source(), Some(Provenance::PlaneDiskCount));
/// ```
pub fn split_torus_bound(x: &RationalVector, m: &[BigInt]) -> Result<InvariantBound> {
    check_dim(x.dim(), m.len())?;
    positive_entries(x)?;
    let n = x.dim();
    let plane = n == 2;
    let xs = x.entries();
    let q = |e: &BigInt| BigRational::from_integer(e.clone());

    if m.iter().all(|e| !e.is_positive()) {
        let src = if plane { Provenance::PlaneNonPositive } else { Provenance::SplitOrthant };
        return Ok(InvariantBound::exact(Extended::Infinity, src));
    }

    let x_min = xs.iter().min().expect("nonempty").clone();
    if let Some((i, k)) = positive_axis(m) {
        // Any admissible l ≥ k works, and l = k is the weakest requirement.
        if x_min < &xs[i] / q(&k) {
            let src = if plane { Provenance::PlaneAxis } else { Provenance::SplitSmallCoordinate };
            return Ok(InvariantBound::exact(Extended::Infinity, src));
        }
    }

    let monotone = xs.iter().all(|e| *e == xs[0]);
    if monotone && m.iter().all(|e| *e == m[0]) {
        let src = if plane { Provenance::PlaneMonotone } else { Provenance::SplitDiagonal };
        return Ok(InvariantBound::exact(Extended::Finite(&xs[0] / q(&m[0])), src));
    }

    // Plane case after sorting so that x₁ ≤ x₂.
    let (x1, x2, m1, m2) = if plane {
        if xs[0] <= xs[1] {
            (xs[0].clone(), xs[1].clone(), q(&m[0]), q(&m[1]))
        } else {
            (xs[1].clone(), xs[0].clone(), q(&m[1]), q(&m[0]))
        }
    } else {
        Default::default()
    };
    if plane && int(2) * &x1 <= x2 && m1.is_positive() && &m2 - int(2) * &m1 <= Rational::zero() {
        return Ok(InvariantBound::exact(Extended::Finite(&x1 / &m1), Provenance::PlaneDiskCount));
    }

    let lower = xs
        .iter()
        .zip(m)
        .filter(|(_, mi)| mi.is_positive())
        .map(|(xi, mi)| xi / q(mi))
        .min()
        .expect("some entry is positive");
    let lower_src = if !plane {
        Provenance::SplitOrthant
    } else if monotone {
        Provenance::PlaneMonotone
    } else if m1.is_positive() && &m2 * &x1 - &m1 * &x2 <= Rational::zero() {
        Provenance::PlaneFirstCoordinate
    } else {
        Provenance::PlaneSecondCoordinate
    };

    let mut upper: Option<(Rational, Provenance)> = None;
    let mut offer = |v: Rational, src: Provenance| {
        if upper.as_ref().is_none_or(|(u, _)| v < *u) {
            upper = Some((v, src));
        }
    };
    let alpha: Vec<Rational> = m.iter().map(q).collect();
    let periods = RelativePeriodData::new(xs.to_vec(), alpha.clone(), vec![2; n])?;
    if let Some(c) = weakly_exact_upper(&periods) {
        offer(c, Provenance::WeaklyExact);
    }
    if n > 2 {
        // The disk-count bound needs one distinguished coordinate; try each.
        for i in 0..n {
            let mut order: Vec<usize> = vec![i];
            order.extend((0..n).filter(|&j| j != i));
            let d = RelativePeriodData {
                omega_periods: order.iter().map(|&j| xs[j].clone()).collect(),
                alpha_periods: order.iter().map(|&j| alpha[j].clone()).collect(),
                maslov: vec![2; n],
            };
            if let Some(u) = disk_count_upper(n, &d, true) {
                offer(u, Provenance::DiskCountSpace);
            }
        }
    }

    let lower = Side::known(Extended::Finite(lower), lower_src);
    let upper = match upper {
        Some((u, src)) => Side::known(Extended::Finite(u), src),
        None => Side::Unknown,
    };
    Ok(InvariantBound::new(lower, upper))
}

/// Bounds for the Chekanov torus `Θ_a` and the class `(m, n)`.
pub fn chekanov_bound(a: &Rational, m: i64, _n: i64) -> Result<InvariantBound> {
    if !a.is_positive() {
        return Err(Error::OutsideDomain(format!("area a = {a} must be positive")));
    }
    Ok(match m.signum() {
        1 => InvariantBound::lower_only(Extended::Finite(a / int(m)), Provenance::ChekanovLower),
        -1 => InvariantBound::exact(Extended::Infinity, Provenance::ChekanovNegative),
        _ => InvariantBound::unknown(),
    })
}

/// Bounds for a closed curve on a surface and the class `k·e`.
pub fn surface_bound(a_plus: &Extended, a_minus: &Extended, separating: bool, k: i64) -> Result<InvariantBound> {
    if k == 0 {
        return Err(Error::DegenerateClass);
    }
    if !separating {
        return Ok(InvariantBound::exact(Extended::Infinity, Provenance::SurfaceNonSeparating));
    }
    let area = if k > 0 { a_plus } else { a_minus };
    if let Extended::Finite(a) = area {
        if !a.is_positive() {
            return Err(Error::OutsideDomain(format!("area {a} must be positive")));
        }
    }
    Ok(InvariantBound::exact(area.scale(&rat(1, k.abs())), Provenance::SurfaceSeparating))
}

fn lattice_fiber_bound(
    delta: &RationalPolytope,
    x: &RationalVector,
    alpha: &[BigInt],
    scale: &Rational,
    upper_src: Provenance,
    exact_src: Provenance,
) -> Result<InvariantBound> {
    check_dim(delta.dim(), x.dim())?;
    check_dim(delta.dim(), alpha.len())?;
    if !delta.contains_in_interior(x) {
        return Err(Error::OutsideDomain(format!("{x} is not an interior point of the moment polytope")));
    }
    let dir = RationalVector::from_integers(alpha);
    let l = ray_exit(delta, &RayQuery::new(x.clone(), dir.clone()))?;
    let lower = Side::known(l.clone(), Provenance::ShapeExit);
    Ok(match smallest_shift(x, &dir, scale)? {
        Some(d) if Extended::Finite(d.clone()) == l => InvariantBound::exact(l, exact_src),
        Some(d) => InvariantBound::new(lower, Side::known(Extended::Finite(d), upper_src)),
        None => InvariantBound::new(lower, Side::Unknown),
    })
}

/// Bounds for a toric fiber of `ℂPⁿ` (moment polytope: the standard simplex).
pub fn cpn_fiber_bound(n: usize, x: &RationalVector, alpha: &[BigInt]) -> Result<InvariantBound> {
    lattice_fiber_bound(
        &RationalPolytope::simplex(n),
        x,
        alpha,
        &rat(1, n as i64),
        Provenance::ProjectiveLattice,
        Provenance::ProjectiveExact,
    )
}

/// Bounds for a toric fiber of `S² × S²` (moment polytope: the unit square).
pub fn s2s2_fiber_bound(x: &RationalVector, alpha: &[BigInt]) -> Result<InvariantBound> {
    lattice_fiber_bound(
        &RationalPolytope::unit_square(),
        x,
        alpha,
        &int(1),
        Provenance::QuadricLattice,
        Provenance::QuadricLattice,
    )
}

/// Region of the split-torus case table in which a class falls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    A,
    B,
    C,
    D,
    E,
    Exact,
    LowerOnly,
    Unknown,
}

impl CaseLabel {
    pub fn name(self) -> &'static str {
        match self {
            CaseLabel::A => "A",
            CaseLabel::B => "B",
            CaseLabel::C => "C",
            CaseLabel::D => "D",
            CaseLabel::E => "E",
            CaseLabel::Exact => "exact",
            CaseLabel::LowerOnly => "lower-only",
            CaseLabel::Unknown => "unknown",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reads the case label off a plane split-torus bound.
pub fn case_label(bound: &InvariantBound) -> CaseLabel {
    use Provenance as P;
    match (bound.lower().source(), bound.upper().source()) {
        (Some(P::PlaneNonPositive), _) => CaseLabel::A,
        (Some(P::PlaneAxis), _) => CaseLabel::B,
        (Some(P::PlaneDiskCount), _) => CaseLabel::E,
        (_, _) if bound.is_exact() => CaseLabel::Exact,
        (Some(P::PlaneFirstCoordinate), _) => CaseLabel::C,
        (Some(P::PlaneSecondCoordinate), _) => CaseLabel::D,
        (Some(_), _) => CaseLabel::LowerOnly,
        (None, _) => CaseLabel::Unknown,
    }
}

/// Integer rectangle `[m_min, m_max] × [n_min, n_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub m_min: i64,
    pub m_max: i64,
    pub n_min: i64,
    pub n_max: i64,
}

impl Window {
    pub fn square(r: i64) -> Self {
        Window {
            m_min: -r,
            m_max: r,
            n_min: -r,
            n_max: r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramCell {
    pub m: i64,
    pub n: i64,
    pub label: CaseLabel,
    pub bound: InvariantBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionDiagram {
    pub x: RationalVector,
    pub window: Window,
    /// Row-major with `n` decreasing down the rows and `m` increasing along them.
    pub cells: Vec<DiagramCell>,
}

impl RegionDiagram {
    pub fn cell(&self, m: i64, n: i64) -> Option<&DiagramCell> {
        self.cells.iter().find(|c| c.m == m && c.n == n)
    }

    pub fn labels(&self) -> Vec<CaseLabel> {
        self.cells.iter().map(|c| c.label).collect()
    }
}

/// Evaluates the plane case table over a window of classes.
pub fn region_diagram(x: &RationalVector, window: Window) -> Result<RegionDiagram> {
    check_dim(2, x.dim())?;
    positive_entries(x)?;
    if window.m_min > window.m_max || window.n_min > window.n_max {
        return Err(Error::OutsideDomain("empty window".into()));
    }
    let coords: Vec<(i64, i64)> = (window.n_min..=window.n_max)
        .rev()
        .flat_map(|n| (window.m_min..=window.m_max).map(move |m| (m, n)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(m, n)| {
            let bound = split_torus_bound(x, &[BigInt::from(m), BigInt::from(n)])?;
            Ok(DiagramCell {
                m,
                n,
                label: case_label(&bound),
                bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionDiagram {
        x: x.clone(),
        window,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&e| BigInt::from(e)).collect()
    }

    fn fin(p: i64, q: i64) -> Extended {
        Extended::Finite(rat(p, q))
    }

    #[test]
    fn toric_examples() {
        let quad = RationalPolytope::orthant(2);
        let x = RationalVector::from_ints(&[1, 3]);
        let b = toric_fiber_bound(&quad, &x, &LatticeClass::from_ints(&[1, 2]).unwrap(), AmbientMode::InteriorOnly).unwrap();
        assert_eq!(b.exact_value(), Some(&fin(1, 1)));
        for mode in [AmbientMode::InteriorOnly, AmbientMode::FullAmbient] {
            let b = toric_fiber_bound(&quad, &x, &LatticeClass::from_ints(&[0, -1]).unwrap(), mode).unwrap();
            assert_eq!(b.exact_value(), Some(&Extended::Infinity));
        }
        let s = RationalPolytope::simplex(2);
        let y = RationalVector::from_ratios(&[(1, 3), (1, 3)]);
        let b = toric_fiber_bound(&s, &y, &LatticeClass::from_ints(&[1, 1]).unwrap(), AmbientMode::FullAmbient).unwrap();
        assert_eq!(b.lower().value(), Some(&fin(1, 3)));
        assert_eq!(b.upper(), &Side::Unknown);
        let edge = RationalVector::from_ints(&[0, 3]);
        assert!(matches!(
            toric_fiber_bound(&quad, &edge, &LatticeClass::from_ints(&[1, 0]).unwrap(), AmbientMode::FullAmbient),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn weakly_exact_examples() {
        let d = |w: &[i64], a: &[i64]| {
            RelativePeriodData::new(w.iter().map(|&e| int(e)).collect(), a.iter().map(|&e| int(e)).collect(), vec![2; w.len()]).unwrap()
        };
        assert_eq!(weakly_exact_upper(&d(&[2, 2], &[1, 1])), Some(int(2)));
        assert_eq!(weakly_exact_upper(&d(&[1, 3], &[1, 2])), None);
        assert_eq!(weakly_exact_upper(&d(&[2, 2], &[-1, -1])), None);
    }

    #[test]
    fn disk_count_examples() {
        let d = RelativePeriodData::new(vec![int(1), int(3)], vec![int(1), int(2)], vec![2, 2]).unwrap();
        assert_eq!(disk_count_upper(2, &d, true), Some(int(1)));
        assert_eq!(disk_count_upper(2, &d, false), None);
        let d = RelativePeriodData::new(vec![int(1), rat(3, 2)], vec![int(1), int(2)], vec![2, 2]).unwrap();
        assert_eq!(disk_count_upper(2, &d, true), None);
        let d = RelativePeriodData::new(vec![int(1), int(3), int(3)], vec![int(1), int(3), int(3)], vec![2, 2, 2]).unwrap();
        assert_eq!(disk_count_upper(3, &d, true), Some(int(1)));
        let d = RelativePeriodData::new(vec![int(1), int(3)], vec![int(-1), int(2)], vec![2, 2]).unwrap();
        assert!(disk_count_check(2, &d, true).unwrap_err().contains("σ"));
        assert!(RelativePeriodData::new(vec![int(1)], vec![int(1)], vec![3]).is_err());
    }

    #[test]
    fn split_examples() {
        let b = split_torus_bound(&RationalVector::from_ints(&[1, 3]), &bi(&[1, 2])).unwrap();
        assert_eq!(b.exact_value(), Some(&fin(1, 1)));
        assert_eq!(b.lower().source(), Some(Provenance::PlaneDiskCount));

        let b = split_torus_bound(&RationalVector::from_ints(&[1, 3]), &bi(&[0, 1])).unwrap();
        assert_eq!(b.exact_value(), Some(&Extended::Infinity));
        assert_eq!(b.lower().source(), Some(Provenance::PlaneAxis));

        let b = split_torus_bound(&RationalVector::from_ints(&[2, 2]), &bi(&[3, 3])).unwrap();
        assert_eq!(b.exact_value(), Some(&fin(2, 3)));

        let b = split_torus_bound(&RationalVector::from_ints(&[1, 1, 1]), &bi(&[2, 2, 2])).unwrap();
        assert_eq!(b.exact_value(), Some(&fin(1, 2)));
        assert_eq!(b.lower().source(), Some(Provenance::SplitDiagonal));

        assert!(matches!(
            split_torus_bound(&RationalVector::from_ints(&[0, 1]), &bi(&[1, 1])),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn split_lower_only_cases() {
        let b = split_torus_bound(&RationalVector::from_ints(&[2, 2]), &bi(&[1, 2])).unwrap();
        assert_eq!(b.lower().value(), Some(&fin(1, 1)));
        assert_eq!(b.upper(), &Side::Unknown);
        let b = split_torus_bound(&RationalVector::from_ints(&[1, 3]), &bi(&[0, 3])).unwrap();
        assert_eq!(b.lower().value(), Some(&fin(1, 1)));
        assert_eq!(b.lower().source(), Some(Provenance::PlaneSecondCoordinate));
    }

    #[test]
    fn split_proportional_class_is_exact() {
        let b = split_torus_bound(&RationalVector::from_ints(&[1, 3]), &bi(&[1, 3])).unwrap();
        assert_eq!(b.exact_value(), Some(&fin(1, 1)));
        assert_eq!(b.upper().source(), Some(Provenance::WeaklyExact));
    }

    #[test]
    fn chekanov_examples() {
        let b = chekanov_bound(&int(1), 2, 5).unwrap();
        assert_eq!(b.lower().value(), Some(&fin(1, 2)));
        assert_eq!(b.upper(), &Side::Unknown);
        assert_eq!(chekanov_bound(&int(1), -1, 7).unwrap().exact_value(), Some(&Extended::Infinity));
        assert_eq!(chekanov_bound(&int(1), 0, 4).unwrap(), InvariantBound::unknown());
        assert!(chekanov_bound(&int(0), 1, 1).is_err());
    }

    #[test]
    fn surface_examples() {
        let (p, m) = (Extended::Finite(int(2)), Extended::Finite(int(5)));
        assert_eq!(surface_bound(&p, &m, true, 2).unwrap().exact_value(), Some(&fin(1, 1)));
        assert_eq!(surface_bound(&p, &m, true, -2).unwrap().exact_value(), Some(&fin(5, 2)));
        assert_eq!(surface_bound(&p, &m, false, 7).unwrap().exact_value(), Some(&Extended::Infinity));
        assert_eq!(
            surface_bound(&Extended::Infinity, &m, true, 3).unwrap().exact_value(),
            Some(&Extended::Infinity)
        );
    }

    #[test]
    fn cpn_examples() {
        let x = RationalVector::from_ratios(&[(1, 3), (1, 3)]);
        let b = cpn_fiber_bound(2, &x, &bi(&[1, 1])).unwrap();
        assert_eq!(b.exact_value(), Some(&fin(1, 3)));
        let b = cpn_fiber_bound(2, &x, &bi(&[1, 0])).unwrap();
        assert_eq!(b.lower().value(), Some(&fin(1, 3)));
        assert_eq!(b.upper(), &Side::Unknown);
        let y = RationalVector::from_ratios(&[(1, 2), (1, 4)]);
        let b = cpn_fiber_bound(2, &y, &bi(&[1, 0])).unwrap();
        assert_eq!(b.lower().value(), Some(&fin(1, 2)));
        assert_eq!(b.upper(), &Side::Unknown);
        let out = RationalVector::from_ratios(&[(1, 2), (1, 2)]);
        assert!(cpn_fiber_bound(2, &out, &bi(&[1, 0])).is_err());
    }

    #[test]
    fn s2s2_examples() {
        let b = s2s2_fiber_bound(&RationalVector::from_ratios(&[(1, 2), (1, 2)]), &bi(&[1, 1])).unwrap();
        assert_eq!(b.exact_value(), Some(&fin(1, 2)));
        let b = s2s2_fiber_bound(&RationalVector::from_ratios(&[(3, 4), (1, 4)]), &bi(&[1, -1])).unwrap();
        assert_eq!(b.exact_value(), Some(&fin(3, 4)));
        let b = s2s2_fiber_bound(&RationalVector::from_ratios(&[(1, 2), (1, 3)]), &bi(&[1, 0])).unwrap();
        assert_eq!(b.lower().value(), Some(&fin(1, 2)));
        assert_eq!(b.upper(), &Side::Unknown);
    }

    #[test]
    fn diagram_labels() {
        let d = region_diagram(&RationalVector::from_ints(&[1, 3]), Window::square(3)).unwrap();
        assert_eq!(d.cells.len(), 49);
        assert_eq!(d.cell(1, 2).unwrap().label, CaseLabel::E);
        assert_eq!(d.cell(-1, -2).unwrap().label, CaseLabel::A);
        assert_eq!(d.cell(0, 1).unwrap().label, CaseLabel::B);
        let mono = region_diagram(&RationalVector::from_ints(&[2, 2]), Window::square(3)).unwrap();
        let c = mono.cell(1, 2).unwrap();
        assert_eq!(c.label, CaseLabel::LowerOnly);
        assert_eq!(c.bound.lower().value(), Some(&fin(1, 1)));
        let unit = region_diagram(&RationalVector::from_ints(&[1, 1]), Window::square(3)).unwrap();
        assert_eq!(unit.labels(), mono.labels());
    }

    #[test]
    fn provenance_tags_round_trip() {
        for p in Provenance::ALL {
            assert_eq!(p.tag().parse::<Provenance>().unwrap(), p);
        }
    }
}
