pub mod error;
pub mod boundary;
pub mod cli;
pub mod dl;
pub mod montecarlo;
pub mod tree;
pub mod walk;

pub use error::{Error, Result};
