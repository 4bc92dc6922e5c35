//! Symbolic and numerical machinery for multiple ergodic averages along
//! variable polynomial iterates `[p_{i,N}(n)]` whose coefficients are drawn
//! from linear spans of reciprocals of sublinear growth functions.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function over immutable values; IO, parsing and the command line live in
//! the companion `ergopet` crate.
//!
//! Module map:
//!
//! * [`coeffalg`]: growth symbols `x^γ·log^δ x·loglog^ε x`, coefficients in
//!   their reciprocal span, asymptotic classes and ratio decisions.
//! * [`polyfam`]: variable polynomials (optionally carrying symbolic shifts
//!   `h₁, h₂, …`) and families of them.
//! * [`pet`]: type vectors, the van der Corput operation and full PET
//!   reduction to linear families.
//! * [`rprop`]: R₁/R_k decisions with replayable certificates, and the
//!   super-niceness check.
//! * [`equidist`]: exponential sums, goodness probes, smoothness norms, box
//!   statistics on tori.
//! * [`dynsys`]: rotations, the skew torus and cyclic shifts; multiple and
//!   Furstenberg averages; Host–Kra seminorms on `Z_M`.
//! * [`combinatorics`]: recurrence averages and the progression finder.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coeffalg;
pub mod combinatorics;
pub mod dynsys;
pub mod equidist;
mod error;
pub mod numeric;
pub mod pet;
pub mod polyfam;
pub mod rprop;

pub use error::{Error, Result};
pub use num_complex::Complex64;
