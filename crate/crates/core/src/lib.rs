//! Homothety centers and the Monge hyperplane of `n + 1` homothetic sets in
//! E^n, the ratio-product criterion for points on the edges of a simplex,
//! and its spherical and hyperbolic analogues.
//!
//! Euclidean code is generic over [`Scalar`]: `f64` with tolerances, or
//! `BigRational` for exact answers.

pub mod error;
pub mod figure;
pub mod generators;
pub mod kernel;
pub mod menelaus;
pub mod monge;
pub mod noneuclid;
pub mod polytope;
pub mod scalar;
pub mod scenario;
pub mod shapes;

pub use error::{Error, Result};
pub use kernel::{Hyperplane, Point};
pub use monge::{run_monge, MongeConfig, MongeReport};
pub use scalar::{Scalar, Tolerance};
