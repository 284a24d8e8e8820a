//! Exact bounds and numerical certificates for the deformation and
//! Poisson-bracket invariants of Lagrangian tori.
//!
//! The exact side works over [`num_rational::BigRational`]: [`lattice`] and
//! [`polytope`] supply the lattice and ray primitives, [`engine`] turns them
//! into [`engine::InvariantBound`]s. The numerical side builds explicit
//! Hamiltonians ([`models`]) on admissible quadruples ([`quadruple`]) and
//! searches their flows for chords ([`dynamics`]).

pub mod dynamics;
pub mod engine;
pub mod error;
pub mod io;
pub mod lattice;
pub mod models;
pub mod polytope;
pub mod quadruple;

pub use error::{Error, Result};

/// The user guide, compiled so its examples run as doctests.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub mod bounds {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    pub mod lattice {}
    #[doc = include_str!("../../../book/src/quadruples.md")]
    pub mod quadruples {}
    #[doc = include_str!("../../../book/src/hamiltonians.md")]
    pub mod hamiltonians {}
    #[doc = include_str!("../../../book/src/chords.md")]
    pub mod chords {}
    #[doc = include_str!("../../../book/src/problem-files.md")]
    pub mod problem_files {}
}
