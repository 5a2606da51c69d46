//! Quadratic twist families of elliptic curves: explicit-formula rank bounds,
//! weighted moments over twist families, and numerical checks of the
//! supporting analytic identities.

pub mod arith;
pub mod cli;
pub mod curve;
pub mod error;
pub mod explicit_formula;
pub mod family;
pub mod kernel;
pub mod numeric;
pub mod verify;

pub use error::{Error, Result};
