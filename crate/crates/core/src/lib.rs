//! Correlation-based quantum speed limits for two-qubit open systems.

pub mod channels;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod golden;
pub mod linalg;
pub mod qsl;
pub mod random;
pub mod states;

pub use error::{QslError, Result};
