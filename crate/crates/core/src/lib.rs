//! Capacity-game rationality criterion for formal power series at rational
//! points of the projective line over Q.
//!
//! A problem bundles jets at marked points, a Green-function matrix at the
//! real place, log-size data at finitely many primes and tangent scalings.
//! The summed matrix defines a zero-sum game whose value decides the
//! criterion; an exact multi-point Padé oracle independently certifies
//! rationality.

pub mod error;
pub mod formal_data;
pub mod game;
pub mod global_matrix;
pub mod linalg;
pub mod pipeline;
pub mod poly;
pub mod potential_arch;
pub mod potential_nonarch;
pub mod rational;
pub mod rational_oracle;
pub mod scheduler;
pub mod simplex;
pub mod slopes_demo;

pub use error::{Error, ErrorKind, Result};
pub use rational::ExactRational;
