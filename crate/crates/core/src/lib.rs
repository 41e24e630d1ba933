//! Numerical core for relative-entropy constructions in quantum information:
//! entropy and relative-entropy algebra on density operators, Holevo-quantity
//! optimization over signal ensembles, thermodynamic signaling cost, coherent
//! information, indeterminate-length quantum coding, relative entropy of
//! entanglement, LOCC protocol ledgers, and Stein-regime state discrimination.
//!
//! Everything here is dense linear algebra at desk scale (Hilbert-space
//! dimensions up to a few dozen, tensor powers up to a few thousand), pure
//! functions on immutable inputs, and base-2 logarithms throughout. The crate
//! is `no_std` (with `alloc`); file formats and the experiment CLI live in the
//! companion `qrelent` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod capacity;
pub mod channels;
pub mod coherent;
pub mod cost;
pub mod distinguish;
pub mod entangle;
pub mod locc;
pub mod opalg;
pub mod qcode;
pub mod rng;
pub mod states;

pub use opalg::{ComplexMatrix, ComplexVector, Spectrum, C64};
pub use states::{DensityOperator, RelEntValue, WeightedStates};
