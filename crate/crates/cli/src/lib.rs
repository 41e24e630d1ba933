//! File formats, reports, and the acceptance/demo harness behind the
//! `qrelent` experiment CLI.
//!
//! The numerics live in `qrelent-core`; this crate adds the JSON schemas for
//! matrices, states, channels, ensembles and LOCC protocol scripts, typed
//! report structures that round-trip through serde, and the criterion
//! checks that `qrelent demo` and the acceptance test suite both run.

pub mod accept;
pub mod report;
pub mod schema;
