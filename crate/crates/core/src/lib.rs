//! Computational Kleinian groups: punctured-torus groups in the Maskit slice,
//! their rational pleating rays and extensions, Koebe groups of type (1,1),
//! circle chains, and the conjugacies identifying groups across the two
//! families.
//!
//! The crate is `no_std` (with `alloc`); file output, rendering and the CLI
//! live in the companion `maskit-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chains;
pub mod discreteness;
pub mod families;
pub mod farey;
pub mod limitset;
pub mod locus;
pub mod moebius;
pub mod tol;

pub use farey::Fraction;
pub use moebius::{Complex, ExtPoint, GeneralizedDisk, Mobius};
