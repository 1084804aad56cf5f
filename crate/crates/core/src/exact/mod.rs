//! The finite-`n` exponential family on realizable `(edge, triangle)` density
//! points, its convex support and its closure along critical directions.

pub mod closure;
pub mod enumerate;
pub mod family;
pub mod hull;

pub use closure::*;
pub use enumerate::*;
pub use family::*;
pub use hull::*;
