//! Exact certification of large images for compatible families of
//! 4-dimensional Galois representations with coefficients in ℚ(ζ),
//! ζ a primitive cube root of unity.
//!
//! The crate is organized bottom-up:
//!
//! * [`eisenstein`]: arithmetic in ℤ[ζ] and splitting of rational primes.
//! * [`poly`]: dense polynomials over ℤ and ℤ[ζ], exact resultants.
//! * [`frobdata`]: Frobenius characteristic polynomials, purity checks,
//!   exterior squares, and the dataset file format.
//! * [`dirichlet`]: quadratic and cubic characters unramified outside N.
//! * [`conditions`]: the seven large-image conditions, with witnesses.
//! * [`sieve`]: bounding the exceptional primes, exclusion sets and image
//!   labels.
//! * [`testkit`]: independent brute-force and numerical oracles.
//! * [`cli`]: the `galrep` command-line front end.

pub mod arith;
pub mod cli;
pub mod conditions;
pub mod dirichlet;
pub mod eisenstein;
pub mod frobdata;
pub mod poly;
pub mod sieve;
pub mod testkit;

mod serde_big;

pub use eisenstein::{EisensteinInt, PrimeType};
pub use frobdata::{Dataset, FrobeniusRecord};
pub use poly::UniPoly;
