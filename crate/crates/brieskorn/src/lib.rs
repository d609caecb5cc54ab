//! Exact symbolic models of deformed Brieskorn-type lattices.
//!
//! The library works inside a weight-graded module over the ring of
//! truncated power series: a free basis `e_0, ..., e_r` spans each
//! weight slice, formal symbols `dt^-w` record the weight, and the
//! operators `t`, `dt^-1`, `d/ds_i` act through explicit graded rules.
//! On top of that sit three deformation families of lattices, opposite
//! filtrations given by unit lower-triangular frames, a canonical
//! generator solver, and the three-parameter group that acts on the
//! deformation function of a lattice.
//!
//! Everything is exact: coefficients are arbitrary-precision rationals
//! (or polynomials in named indeterminates for symbolic runs), series
//! are truncated at a fixed total degree, and weight expansions carry a
//! precision ledger so that reading past the computed range is an
//! error instead of a silent zero.

pub mod batch;
pub mod canonical;
pub mod gamma;
pub mod gmsystem;
pub mod lattice;
pub mod matrix;
pub mod opposite;
pub mod poly;
pub mod rational;
pub mod ring;
pub mod series;

mod solve;

pub use rational::Rational;
pub use ring::Ring;
pub use solve::PivotScan;
