//! Exact and high-precision tools for generalized roundness, products of
//! cycles and the embedding obstructions built on them.

pub mod cayley;
pub mod error;
pub mod injections;
pub mod metric;
pub mod numeric;
pub mod obstruction;
pub mod products;
pub mod roundness;
pub mod zspace;

pub use error::{Error, Result};
pub use metric::{
    empirical_moduli, snowflake, validate_metric, Distance, DistanceOracle, EuclideanPoints,
    FiniteMetricSpace, ModulusEnvelope, Snowflake, StepFunction, ValidationReport,
};
pub use numeric::{HighPrecision, Numerics, Rational};
