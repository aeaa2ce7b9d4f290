//! Exact rank, line and bound computations for colored point configurations.

pub mod bounds;
pub mod cli;
pub mod collinearity;
pub mod config;
pub mod design;
pub mod error;
pub mod generators;
pub mod lines;
pub mod matrix;
pub mod metrics;
pub mod rank;
pub mod scalar;
pub mod search;
pub mod triples;

pub use config::ColoredConfig;
pub use error::{Error, Result};
pub use matrix::SparseExactMatrix;
pub use scalar::{Field, Scalar};
