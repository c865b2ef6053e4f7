//! Quadrature domains and quadrature identities: rational-function
//! algebra, Faber transforms, conformal maps, direct and inverse solvers,
//! numerical verification and Schwarz-function dynamics.

// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod cli;
pub mod conformal;
pub mod error;
pub mod faber;
pub mod lqd;
pub mod maps;
pub mod numcheck;
pub mod poly;
pub mod pqd;
pub mod ratfun;
pub mod schwarzdyn;
pub mod series;
pub mod solver;

pub use error::{QuadError, Result};
