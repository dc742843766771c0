//! Exact linear algebra over truncated multivariate power series.
//!
//! The crate computes exponentials of upper triangular and general matrices
//! whose entries are truncated power series with rational coefficients,
//! extracts canonical eigencoordinates and matrix data, constructs weakly
//! special subvarieties, and empirically checks Ax-Schanuel / Ax-Lindemann
//! style transcendence inequalities on randomized and hand-built instances.
//!
//! All core arithmetic is exact: coefficients are arbitrary-precision
//! rationals and every equality assertion is an identity of truncations,
//! never a floating-point comparison. A high-precision numeric backend
//! backs the sampled-point operations that leave the rational world.

pub mod checker;
pub mod eigencoords;
pub mod error;
pub mod fraction;
pub mod json;
pub mod linalg;
pub mod matdata;
pub mod matrix;
pub mod numeric;
pub mod parallel;
pub mod poly;
pub mod rational;
pub mod rng;
pub mod scalar;
pub mod series;
pub mod special;
pub mod triexp;

pub use error::AlgebraError;
pub use fraction::SeriesFraction;
pub use matrix::Matrix;
pub use rational::Rational;
pub use series::TruncSeries;
