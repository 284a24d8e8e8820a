//! Exact arithmetic on lattice vectors.
//!
//! Everything here is arbitrary precision; there are no tolerances.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{check_dim, Error, Result};

pub type Rational = BigRational;

/// `p/q` as a rational. Panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    BigRational::from_integer(BigInt::from(p))
}

/// Parses `p`, `p/q` or a finite decimal such as `0.05`.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let num = BigInt::from_str(&digits).map_err(|e| format!("bad decimal {s:?}: {e}"))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|e| format!("bad rational {s:?}: {e}"))
}

pub fn to_f64(q: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// A rational extended by `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(Rational),
    Infinity,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(q) => Some(q),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(q) => to_f64(q),
            Extended::Infinity => f64::INFINITY,
        }
    }

    /// Multiplies by a positive rational.
    pub fn scale(&self, c: &Rational) -> Extended {
        debug_assert!(c.is_positive());
        match self {
            Extended::Finite(q) => Extended::Finite(q * c),
            Extended::Infinity => Extended::Infinity,
        }
    }
}

impl From<Rational> for Extended {
    fn from(q: Rational) -> Self {
        Extended::Finite(q)
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinity) => Ordering::Less,
            (Extended::Infinity, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinity, Extended::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(q) => write!(f, "{q}"),
            Extended::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Extended {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "inf" | "+inf" | "∞" | "+∞" => Ok(Extended::Infinity),
            other => parse_rational(other).map(Extended::Finite),
        }
    }
}

/// A point or direction in (ℚⁿ)*.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionError {
                expected: 1,
                found: 0,
            });
        }
        Ok(RationalVector(entries))
    }

    pub fn from_ratios(entries: &[(i64, i64)]) -> Self {
        RationalVector(entries.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RationalVector(entries.iter().map(|&p| int(p)).collect())
    }

    pub fn from_integers(entries: &[BigInt]) -> Self {
        RationalVector(entries.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> RationalVector {
        RationalVector(self.0.iter().map(|e| e * c).collect())
    }

    /// `self − t·dir`.
    pub fn shifted(&self, t: &Rational, dir: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&dir.0).map(|(a, b)| a - t * b).collect())
    }

    pub fn permuted(&self, perm: &[usize]) -> RationalVector {
        RationalVector(perm.iter().map(|&i| self.0[i].clone()).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// A nonzero integral class `k · α′` with `α′` primitive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeClass {
    entries: Vec<BigInt>,
    multiplicity: BigInt,
    primitive: Vec<BigInt>,
}

impl LatticeClass {
    pub fn from_ints(v: &[i64]) -> Result<Self> {
        decompose(&v.iter().map(|&e| BigInt::from(e)).collect::<Vec<_>>())
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    /// The rational length `k`.
    pub fn multiplicity(&self) -> &BigInt {
        &self.multiplicity
    }

    pub fn primitive_part(&self) -> &[BigInt] {
        &self.primitive
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn negated(&self) -> LatticeClass {
        LatticeClass {
            entries: self.entries.iter().map(|e| -e).collect(),
            multiplicity: self.multiplicity.clone(),
            primitive: self.primitive.iter().map(|e| -e).collect(),
        }
    }

    pub fn as_vector(&self) -> RationalVector {
        RationalVector::from_integers(&self.entries)
    }
}

/// Splits a nonzero integer vector into multiplicity and primitive part.
pub fn decompose(v: &[BigInt]) -> Result<LatticeClass> {
    let k = v.iter().fold(BigInt::zero(), |g, e| g.gcd(e));
    if k.is_zero() {
        return Err(Error::DegenerateClass);
    }
    Ok(LatticeClass {
        entries: v.to_vec(),
        primitive: v.iter().map(|e| e / &k).collect(),
        multiplicity: k,
    })
}

/// The residue class `r + mℤ` of rationals, `m > 0`.
#[derive(Clone, Debug, PartialEq)]
struct Progression {
    residue: Rational,
    modulus: Rational,
}

impl Progression {
    fn new(residue: Rational, modulus: Rational) -> Self {
        let residue = rational_mod(&residue, &modulus);
        Progression { residue, modulus }
    }

    /// Intersection of two progressions, or `None` when they are disjoint.
    fn meet(&self, other: &Progression) -> Option<Progression> {
        // Clear denominators so both progressions live in ℤ.
        let d = self
            .residue
            .denom()
            .lcm(self.modulus.denom())
            .lcm(other.residue.denom())
            .lcm(other.modulus.denom());
        let scale = BigRational::from_integer(d.clone());
        let r1 = (&self.residue * &scale).to_integer();
        let n1 = (&self.modulus * &scale).to_integer();
        let r2 = (&other.residue * &scale).to_integer();
        let n2 = (&other.modulus * &scale).to_integer();

        let eg = n1.extended_gcd(&n2);
        let g = eg.gcd;
        let diff = &r2 - &r1;
        if !(&diff % &g).is_zero() {
            return None;
        }
        // n1·a ≡ diff (mod n2)  ⇒  a ≡ (diff/g)·x (mod n2/g), where n1·x + n2·y = g.
        let m2 = &n2 / &g;
        let a = ((&diff / &g) * &eg.x).mod_floor(&m2);
        let lcm = &n1 * &m2;
        let r = (r1 + n1 * a).mod_floor(&lcm);
        Some(Progression {
            residue: BigRational::new(r, d.clone()),
            modulus: BigRational::new(lcm, d),
        })
    }
}

fn rational_mod(a: &Rational, m: &Rational) -> Rational {
    a - m * (a / m).floor()
}

/// Smallest `t > 0` with `w − t·s ∈ g·ℤⁿ`, or `None` when no such `t` exists.
///
/// ```
/// use lagflux_core::lattice::{rat, smallest_shift, RationalVector};
/// let w = RationalVector::from_ratios(&[(1, 3), (1, 6)]);
/// let s = RationalVector::from_ints(&[1, -1]);
/// assert_eq!(smallest_shift(&w, &s, &rat(1, 2)).unwrap(), Some(rat(1, 3)));
/// ```
pub fn smallest_shift(
    w: &RationalVector,
    s: &RationalVector,
    g: &Rational,
) -> Result<Option<Rational>> {
    check_dim(w.dim(), s.dim())?;
    if !g.is_positive() {
        return Err(Error::OutsideDomain(format!("lattice scale must be positive, got {g}")));
    }
    let mut acc: Option<Progression> = None;
    for (wi, si) in w.entries().iter().zip(s.entries()) {
        if si.is_zero() {
            if !(wi / g).is_integer() {
                return Ok(None);
            }
            continue;
        }
        let p = Progression::new(wi / si, g / si.abs());
        acc = match acc {
            None => Some(p),
            Some(prev) => match prev.meet(&p) {
                Some(m) => Some(m),
                None => return Ok(None),
            },
        };
    }
    // With every direction entry zero, either no t works or all do; neither has a least positive element.
    Ok(acc.map(|p| {
        if p.residue.is_zero() {
            p.modulus
        } else {
            p.residue
        }
    }))
}

/// Whether every entry of `v` lies in `g·ℤ`.
pub fn in_scaled_lattice(v: &RationalVector, g: &Rational) -> bool {
    v.entries().iter().all(|e| (e / g).is_integer())
}
