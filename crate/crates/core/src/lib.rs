pub mod arith;
pub mod error;
pub mod geometry;
pub mod grassmann;
pub mod measurement;
pub mod network;
pub mod par;
pub mod poisson;
pub mod realize;

pub use error::{Error, Result};
