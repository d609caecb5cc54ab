//! Verification harness around the lattice-deformation library: run
//! configuration, suite execution, and report rendering. The `verify`
//! binary is a thin command-line wrapper over these modules.

pub mod config;
pub mod report;
pub mod suites;
