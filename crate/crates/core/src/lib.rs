//! Exact F_p toolkit for the combinatorial and homological layer of
//! logarithmic topological Hochschild homology computations.
//!
//! Modules, bottom up: [`field`] and [`linalg`] for exact arithmetic, [`jcat`]
//! for the category J, [`monoid`] for graded lattice monoids, [`sset`] for
//! truncated cyclic sets, [`homology`] for F_p homology with shuffle products,
//! [`galg`] for graded-commutative algebras and Tor, [`specseq`] for the
//! multiplicative spectral-sequence engine and [`hocolim`] for truncated
//! J-spaces.

pub mod error;
pub mod field;
pub mod jcat;
pub mod linalg;
pub mod monoid;
pub mod homology;
pub mod sset;
pub mod galg;
pub mod specseq;
pub mod hocolim;

pub use error::{Error, Result};
