//! Rays against closed rational polytopes in half-space form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{int, Extended, Rational, RationalVector};

/// `{y : ⟨normal, y⟩ ≤ offset}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<BigInt>,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: &[i64], offset: Rational) -> Self {
        Halfspace {
            normal: normal.iter().map(|&e| BigInt::from(e)).collect(),
            offset,
        }
    }

    fn dot(&self, y: &RationalVector) -> Rational {
        self.normal
            .iter()
            .zip(y.entries())
            .fold(Rational::zero(), |acc, (n, v)| acc + BigRational::from_integer(n.clone()) * v)
    }

    /// `offset − ⟨normal, y⟩`, nonnegative exactly when `y` satisfies the halfspace.
    pub fn slack(&self, y: &RationalVector) -> Rational {
        &self.offset - self.dot(y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

impl RationalPolytope {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionError {
                expected: 1,
                found: 0,
            });
        }
        for h in &halfspaces {
            check_dim(dim, h.normal.len())?;
        }
        Ok(RationalPolytope { dim, halfspaces })
    }

    /// The closed orthant `{y : yᵢ ≥ 0}`.
    pub fn orthant(dim: usize) -> Self {
        let halfspaces = (0..dim)
            .map(|i| {
                let mut n = vec![0i64; dim];
                n[i] = -1;
                Halfspace::new(&n, Rational::zero())
            })
            .collect();
        RationalPolytope { dim, halfspaces }
    }

    /// The standard simplex `{yᵢ ≥ 0, Σ yᵢ ≤ 1}`.
    pub fn simplex(dim: usize) -> Self {
        let mut p = Self::orthant(dim);
        p.halfspaces.push(Halfspace::new(&vec![1; dim], Rational::one()));
        p
    }

    /// The box `∏ [lo, hi]`.
    pub fn cube(dim: usize, lo: Rational, hi: Rational) -> Self {
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut n = vec![0i64; dim];
            n[i] = 1;
            halfspaces.push(Halfspace::new(&n, hi.clone()));
            n[i] = -1;
            halfspaces.push(Halfspace::new(&n, -lo.clone()));
        }
        RationalPolytope { dim, halfspaces }
    }

    pub fn unit_square() -> Self {
        Self::cube(2, int(0), int(1))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn contains(&self, y: &RationalVector) -> bool {
        y.dim() == self.dim && self.halfspaces.iter().all(|h| !h.slack(y).is_negative())
    }

    /// Strict containment; a point passing this test certifies nonempty interior.
    pub fn contains_in_interior(&self, y: &RationalVector) -> bool {
        y.dim() == self.dim && self.halfspaces.iter().all(|h| h.slack(y).is_positive())
    }
}

/// The ray `x − tα`, `t > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayQuery {
    pub base: RationalVector,
    pub direction: RationalVector,
}

impl RayQuery {
    pub fn new(base: RationalVector, direction: RationalVector) -> Self {
        RayQuery { base, direction }
    }
}

/// `sup{t ≥ 0 : x − tα ∈ P}`.
///
/// ```
/// use lagflux_core::lattice::{int, Extended, RationalVector};
/// use lagflux_core::polytope::{ray_exit, RationalPolytope, RayQuery};
/// let q = RayQuery::new(RationalVector::from_ints(&[1, 3]), RationalVector::from_ints(&[1, 2]));
/// assert_eq!(ray_exit(&RationalPolytope::orthant(2), &q).unwrap(), Extended::Finite(int(1)));
/// ```
pub fn ray_exit(p: &RationalPolytope, q: &RayQuery) -> Result<Extended> {
    check_dim(p.dim, q.base.dim())?;
    check_dim(p.dim, q.direction.dim())?;
    if q.direction.is_zero() {
        return Err(Error::DegenerateClass);
    }
    if !p.contains(&q.base) {
        return Err(Error::OutsideDomain(format!("{} is not in the polytope", q.base)));
    }
    let mut best = Extended::Infinity;
    for h in &p.halfspaces {
        // ⟨n, x − tα⟩ ≤ b  ⇔  t·⟨n, −α⟩ ≤ b − ⟨n, x⟩
        let rate = -h.dot(&q.direction);
        if rate.is_positive() {
            let t = Extended::Finite(h.slack(&q.base) / rate);
            if t < best {
                best = t;
            }
        }
    }
    Ok(best)
}

/// The Minkowski functional `1/ray_exit`, with `0` for an unbounded ray.
pub fn gauge(p: &RationalPolytope, q: &RayQuery) -> Result<Rational> {
    match ray_exit(p, q)? {
        Extended::Infinity => Ok(Rational::zero()),
        Extended::Finite(t) if t.is_zero() => Err(Error::OutsideDomain(format!(
            "{} lies on the boundary, facing outward",
            q.base
        ))),
        Extended::Finite(t) => Ok(t.recip()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn ray(x: &[(i64, i64)], a: &[i64]) -> RayQuery {
        RayQuery::new(RationalVector::from_ratios(x), RationalVector::from_ints(a))
    }

    #[test]
    fn exit_examples() {
        let quad = RationalPolytope::orthant(2);
        assert_eq!(
            ray_exit(&quad, &ray(&[(1, 1), (3, 1)], &[1, 2])).unwrap(),
            Extended::Finite(int(1))
        );
        assert_eq!(
            ray_exit(&quad, &ray(&[(1, 1), (3, 1)], &[-1, -1])).unwrap(),
            Extended::Infinity
        );
        let sq = RationalPolytope::unit_square();
        assert_eq!(
            ray_exit(&sq, &ray(&[(1, 2), (1, 2)], &[1, 1])).unwrap(),
            Extended::Finite(rat(1, 2))
        );
    }

    #[test]
    fn gauge_examples() {
        let bx = RationalPolytope::cube(2, int(-1), int(1));
        assert_eq!(gauge(&bx, &ray(&[(0, 1), (0, 1)], &[1, 0])).unwrap(), int(1));
        assert_eq!(gauge(&bx, &ray(&[(0, 1), (0, 1)], &[2, 0])).unwrap(), int(2));
        let quad = RationalPolytope::orthant(2);
        assert_eq!(gauge(&quad, &ray(&[(1, 1), (3, 1)], &[-1, -1])).unwrap(), int(0));
    }

    #[test]
    fn exit_errors() {
        let quad = RationalPolytope::orthant(2);
        assert!(matches!(
            ray_exit(&quad, &ray(&[(-1, 1), (3, 1)], &[1, 0])),
            Err(Error::OutsideDomain(_))
        ));
        assert!(matches!(
            ray_exit(&quad, &ray(&[(1, 1), (3, 1)], &[0, 0])),
            Err(Error::DegenerateClass)
        ));
        assert!(matches!(
            ray_exit(&quad, &ray(&[(1, 1)], &[1, 0])),
            Err(Error::DimensionError { .. })
        ));
    }

    #[test]
    fn simplex_interior_certificate() {
        let s = RationalPolytope::simplex(2);
        assert!(s.contains_in_interior(&RationalVector::from_ratios(&[(1, 3), (1, 3)])));
        assert!(!s.contains_in_interior(&RationalVector::from_ratios(&[(1, 2), (1, 2)])));
        assert!(s.contains(&RationalVector::from_ratios(&[(1, 2), (1, 2)])));
    }
}
