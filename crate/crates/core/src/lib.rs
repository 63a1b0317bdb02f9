//! Quaternionic function theory on a computer: Hamilton algebra, the
//! spherical frame `ι, ι_α, ι_β`, Fueter operators and their spherical
//! form, a catalog of test fields `f = u + ι v`, and the verification
//! suites that check the generalized Fueter theorem numerically.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix `f64`, which is what the CLI and the verification
//! tolerances assume.

pub mod cli;
pub mod fields;
pub mod operators;
pub mod quat;
mod scalar;
pub mod verify;

pub use scalar::Scalar;

/// Crate version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Quat = quat::Quaternion<f64>;
pub type Point = quat::SphericalPoint<f64>;
pub type Frame = quat::Frame<f64>;
pub type Field = fields::StructuredField<f64>;
pub type Seed = fields::ComplexSeed<f64>;
pub type Engine = operators::DerivativeEngine<f64>;
