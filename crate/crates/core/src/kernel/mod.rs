//! Test functions and their transforms: the triangle kernel, its Mellin
//! transform, the archimedean integral, and the smooth family weights.

mod quad;
mod triangle;
mod weight;

pub use quad::{integrate, integrate_breaks, QuadValue, Quadrature, Tolerance};
pub use triangle::{sinc, triangle, TriangleKernel};
pub use weight::{LogPowerWeight, SmoothWeight, WeightShape};
