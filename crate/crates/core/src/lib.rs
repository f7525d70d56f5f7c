//! Exact dynamics of unicritical polynomials `x^d + alpha` over finite fields.
//!
//! The crate is organized around five layers:
//!
//! * [`field`] — arithmetic and enumeration for `F_{p^r}`, realized as
//!   `F_p[s]` modulo the canonically-least monic irreducible polynomial.
//! * [`dynamo`] — finite self-maps as index tables, iterated image chains,
//!   periodic-point detection, and the preperiodic strata `W_n` computed by
//!   two independent algorithms.
//! * [`unifam`] — the family `x^d + alpha`: the closed-form `w_0`, sweeps
//!   over `alpha`, quadratic conjugacy normalization, and exact averages
//!   over all quadratic polynomials.
//! * [`wreath`] — fixed-point proportions of iterated wreath products of
//!   `Z/dZ`, exact by recursion and cross-checked by brute enumeration.
//! * [`bounds`] — evaluators for the inequality battery, with hypothesis
//!   checking and threshold scans.
//!
//! Everything here is `no_std` + `alloc`: all results are exact rationals,
//! integers, or rational intervals with certified endpoints, so downstream
//! output is bit-identical across runs, platforms, and worker counts.

#![no_std]

extern crate alloc;

pub mod bounds;
pub mod dynamo;
mod error;
pub mod field;
pub mod precise;
pub mod rng;
pub mod unifam;
pub mod wreath;

pub use error::Error;
pub use num_bigint::{BigInt, BigUint};

/// Exact rational number used throughout the public API.
pub type Rat = num_rational::BigRational;

/// Convenience result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Cap on the domain size `q` of operations that allocate `Θ(q)` memory.
///
/// Field arithmetic itself only requires `q` to fit in 64 bits; building
/// function tables, image chains, and sweeps additionally requires
/// `q <= limit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableLimit(pub u64);

impl Default for TableLimit {
    fn default() -> Self {
        TableLimit(1 << 26)
    }
}

impl TableLimit {
    pub fn check(&self, q: u64) -> Result<()> {
        if q > self.0 {
            Err(Error::TableLimitExceeded { q, limit: self.0 })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn rat(num: u64, den: u64) -> Rat {
    Rat::new(num.into(), den.into())
}
