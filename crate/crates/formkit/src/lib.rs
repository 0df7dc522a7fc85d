//! Semibounded Hermitian forms over finite-dimensional complex Hilbert
//! spaces, together with the operator-theoretic machinery they generate:
//! representing maps, contraction-parametrized sum decompositions, parallel
//! sums, selfadjoint linear relations, and monotone limits.
//!
//! The crate is organized bottom-up:
//!
//! - [`numeric`] — tolerance-aware dense complex linear algebra and the
//!   [`numeric::Subspace`] carrier type;
//! - [`relation`] — linear relations as graph subspaces of `H (+) K`;
//! - [`form`] — semibounded forms, lower bounds, orderings, representing
//!   maps, closure predicates;
//! - [`decomp`] — sum decompositions driven by nonnegative contractions,
//!   parallel sums, mutual singularity, Lebesgue decompositions;
//! - [`represent`] — the representation theorems linking closed forms and
//!   semibounded selfadjoint relations, with resolvents;
//! - [`monotone`] — monotone sequences of forms, their limits, and strong
//!   resolvent convergence of the associated relations.
//!
//! All types are immutable values and all operations are pure functions, so
//! everything is safe to use from multiple threads.

pub mod decomp;
pub mod error;
pub mod form;
pub mod monotone;
pub mod numeric;
pub mod relation;
pub mod represent;

#[cfg(any(test, feature = "testing"))]
pub mod testutil;

pub use error::{Error, ErrorKind, Result};
pub use numeric::{CMatrix, CVector, Scalar, Subspace, Tolerance};
