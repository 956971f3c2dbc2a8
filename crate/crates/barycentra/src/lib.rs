//! Exact algebra of convex combinations and their finite-field analogues.
//!
//! Everything is computed in exact arithmetic: points, weights, and tables
//! over the rationals use arbitrary-precision `BigRational`; finite models
//! live in GF(p) for a prime modulus. There are no floating-point numbers
//! anywhere in this crate.
//!
//! The crate provides, roughly bottom-up:
//!
//! - [`scalar`]: canonical rationals, weights in (0,1), GF(p) elements, and
//!   the two weighted-mean operations.
//! - [`field`]: the field-context trait that makes the linear algebra generic
//!   over Q and GF(p).
//! - [`linalg`]: exact reduced row echelon form, kernels, and an exact
//!   simplex pivoter for membership questions over Q.
//! - [`semilattice`]: finite join semilattices with validated tables,
//!   homomorphisms, isomorphism testing, and Hasse-diagram DOT export.
//! - [`convex`]: rational polytopes presented by extreme vertices — exact
//!   membership, face lattices, carrier faces, wall tests and open cells.
//! - [`plonka`]: sums of fiber algebras glued along a join semilattice by
//!   affine transition maps, their canonical semilattice quotients
//!   (replicas), and restrictions to subalgebras.
//! - [`affine`]: affine spaces over GF(p), their subspace lattices, coset
//!   algebras, and the same sum/replica structure in the finite setting.
//! - [`model`]: one tagged union over all checkable structures with a uniform
//!   evaluate/sample/enumerate interface.
//! - [`laws`]: terms, the catalogue of identities, and the checking engine
//!   (sampled or exhaustive) with counterexample reports.
//! - [`cli`]: the `barycentra` command-line interface.

pub mod affine;
pub mod cli;
pub mod convex;
pub mod error;
pub mod field;
pub mod laws;
pub mod linalg;
pub mod model;
pub mod plonka;
pub mod scalar;
pub mod semilattice;

/// Exact rational scalar used everywhere over Q.
pub type Rat = num_rational::BigRational;

/// A point of Q^n.
pub type Point = Vec<Rat>;

pub use error::{Error, Result};
pub use scalar::{GfElem, Weight};
