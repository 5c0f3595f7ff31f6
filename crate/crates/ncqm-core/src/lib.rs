//! Finite-dimensional operator-algebra laboratory for quantum mechanics on
//! noncommutative configuration spaces.
//!
//! The crate builds matrix representations of several families of
//! noncommutative "configuration spaces" (finite-dimensional C*-algebras in
//! their self-representation, almost-commutative circle bundles, the
//! Moyal plane on a truncated Fock space, a double cover of the two-torus,
//! and noncommutative tori), assembles Hamiltonians compatible with their
//! structure, and certifies algebraic axioms — uncertainty relations,
//! scalarity, positivity, reality — by residual computation.
//!
//! Everything is dense, double-precision linear algebra over owned
//! row-major matrices. The crate is `no_std` (with `alloc`); all IO and
//! file formats live in the companion CLI crate.
//!
//! Module map:
//! - [`linalg`]: complex matrices, Hermitian eigensolver, matrix
//!   exponential, Hilbert–Schmidt orthonormal bases and projections.
//! - [`algebra`]: represented algebras, spans, commutants, centers,
//!   self-representations, antiunitary conjugations and opposite algebras.
//! - [`models`]: builders for the five model families.
//! - [`dynamics`]: Hamiltonian assembly, Heisenberg evolution, velocities,
//!   metric extraction, Dirac operators.
//! - [`axioms`]: residual-based checks producing [`axioms::CheckReport`]s.
//! - [`derivations`]: coefficient tensors for derivations of the torus and
//!   their decomposition into standard plus inner parts.
//! - [`distance`]: Connes spectral distance by projected supergradient
//!   ascent under a spectral-norm constraint.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod axioms;
pub mod derivations;
pub mod distance;
pub mod dynamics;
pub mod linalg;
pub mod models;
pub mod rng;

pub use linalg::{CMatrix, C64};
