//! Exact combinatorial calculus for manifolds with ordered and fibered corners.
//!
//! The library models boundary geometry purely combinatorially and with exact
//! arithmetic throughout (arbitrary-precision integers and rationals; no
//! floating point):
//!
//! - [`monoid_fan`]: free commutative monoids on hypersurface generators,
//!   unimodular simplicial cones, fans refining the positive orthant, stellar
//!   subdivision (the combinatorial boundary blow-up), and sign/kernel
//!   predicates on cones.
//! - [`corners`]: hypersurface posets with a designated interior element,
//!   corner complexes, blown-up states as compatible families of fans, and
//!   face-poset extraction.
//! - [`bmaps`]: rigid interior boundary maps as exponent matrices, the
//!   simple/b-normal/ordered predicates, lifting through blow-ups, and the
//!   smoothness/p-submanifold criteria for rational combinations of boundary
//!   defining functions.
//! - [`products`]: ordered products (two independent constructions), relative
//!   cones, min/max/relative joins with the generator-exchange equivalence,
//!   fibration assignment on product hypersurfaces, and fiber products.
//! - [`manybody`]: exact rational subspace arrangements, intersection
//!   closure, many-body compactification, quotient arrangements, and the
//!   product-isomorphism verification.
//! - [`frames`]: exact monomial vector fields, monomial maps, pushforward,
//!   and verification of the edge/wedge/phi frame-splitting tables.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so values may be freely shared across threads.

pub mod bmaps;
pub mod corners;
pub mod frames;
pub mod manybody;
pub mod monoid_fan;
pub mod products;

mod fm;
mod ratmat;

mod error;
mod label;

pub use error::Error;
pub use label::Label;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
