//! Coordinate toolkit for Jacobi, Poisson and contact structures.
//!
//! Fields live on a single chart with expression coefficients; derivatives are exact
//! forward-mode Taylor jets. On top of the exterior calculus sit Jacobi verification,
//! poissonization, Lie algebroids with their A-paths, period-group deciders for the
//! `M_a` family and explicit groupoids with multiplicativity checks.

pub mod algebroid;
pub mod error;
pub mod exprlang;
pub mod geometry;
pub mod groupoidlab;
pub mod jacobi;
pub mod monodromy;
pub mod numerics;
pub mod report;

pub use error::{Error, Result};
pub use exprlang::{eval_jet2, parse, Expr, Jet2};
