//! Exact computational toolkit for non-abelian `pq`-fold regular covers of
//! the projective line.
//!
//! For odd primes `p | q - 1` the unique non-abelian group of order `pq` is
//! the metacyclic group `G = <a, b : a^q = b^p = 1, b a b^-1 = a^r>`. This
//! crate enumerates and classifies the actions of `G` on compact Riemann
//! surfaces with genus-zero quotient (as generating vectors / surface-kernel
//! epimorphisms), computes signature arithmetic (hyperbolic area,
//! Riemann-Hurwitz genera, family dimensions), classifies actions up to
//! braid-and-automorphism equivalence into strata, runs exact character
//! theory over cyclotomic fields to obtain the isogeny-factor dimensions of
//! the corresponding Jacobians, verifies extension/maximality claims by
//! exhaustive overgroup searches, and emits verified superelliptic plane
//! models with their automorphisms.
//!
//! Everything away from the floating-point curve checks is exact: group
//! arithmetic is table-based, genera are exact rationals, characters live in
//! `Q(zeta_pq)`.

pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod extensions;
pub mod genvec;
pub mod group;
pub mod jacobian;
pub mod model;
pub mod rep;
pub mod signature;
pub mod strata;
pub mod sweep;

pub use error::{Error, Result};
pub use group::{make_group, Automorphism, Elem, FiniteGroup, GroupKind, GroupParams, OvergroupKind};
pub use signature::{FamilyParams, Signature};
