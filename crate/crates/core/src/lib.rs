//! Exact computation of pullbacks of Weil divisors and of singularity
//! invariants for projective cones over polarized varieties.
//!
//! The base variety `V` is described by class-lattice data
//! ([`models::PolarizedModel`]); every quantity along the exceptional divisor
//! `E` of the vertex blow-up reduces to a polyhedral infimum or a bounded
//! integral search ([`lattice`]), evaluated by [`engine`]. The [`oracle`]
//! module re-derives the same numbers by brute force for cross-checking.

pub mod lattice;
pub mod models;
pub mod engine;
pub mod oracle;
pub mod cli;
