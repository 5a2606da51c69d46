//! Elliptic curves over Q in short Weierstrass form and their quadratic twists.

mod catalog;
mod local;
mod model;

pub use catalog::{parse_record, Catalog};
pub use local::{character_sum_trace, local_data, power_sum, LocalData};
pub use model::{ApTable, CurveModel, TwistConductor, TwistedCurve};
