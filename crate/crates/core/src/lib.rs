//! Dual representations of monetary utility functions on finite sampled
//! metric spaces.
//!
//! The crate models bounded continuous payoffs on a sampled metric space and
//! evaluates monetary utilities in both dual forms — worst case over a
//! scenario set of probability measures, and penalty-corrected minimization —
//! together with the machinery that connects them:
//!
//! - [`space`]: validated finite metric spaces, compactification pairs
//!   (ambient space, interior, boundary sets) and boundary bumps.
//! - [`func`]: bounded functions, Lipschitz envelopes, decreasing sequences
//!   toward a pointwise limit, bump families with disjoint supports.
//! - [`measure`]: probability measures, integration, KL divergence, weak-star
//!   gaps against a probe dictionary.
//! - [`lp`]: a dense two-phase simplex (floating point and exact rational),
//!   exact polar-vertex enumeration, and acceptance-cone polarity.
//! - [`utility`]: coherent/concave/entropic/boundary utilities, conjugate
//!   penalties, acceptance tests, and the axiom/Fatou/localization harnesses.
//!
//! Everything is deterministic: randomized helpers take explicit seeds, LP
//! tie-breaking is lexicographic, and enumerations are sorted.

// `!(x > 0.0)` is used on purpose: unlike `x <= 0.0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops keep the (i, j) orientation of the distance/constraint
// matrices visible; iterator rewrites obscure it.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod func;
pub mod io;
pub mod lp;
pub mod measure;
pub mod sampling;
pub mod space;
pub mod suite;
pub mod utility;

pub use error::{Error, Result};
