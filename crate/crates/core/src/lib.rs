//! Numerical verification engine for the covariance-field parametrization of
//! metric field theories.
//!
//! A field theory with a background Lorentz metric is made generally
//! covariant by promoting a diffeomorphism `η: X → S` to a dynamic field and
//! replacing the metric by the pullback `η*g` of a fixed metric on `S`. This
//! crate evaluates the resulting Lagrangians, Piola–Kirchhoff multimomenta,
//! stress-energy-momentum (SEM) tensor densities and Euler–Lagrange residuals
//! at sample points, and turns the identities relating them into checks.

pub mod checks;
pub mod eleq;
pub mod error;
pub mod geometry;
pub mod jets;
pub mod linalg;
pub mod parametrize;
pub mod scalar;
pub mod scenario;
pub mod scenarios;
pub mod sem;
pub mod theories;

pub use error::{Error, Result};
