pub mod bounds;
pub mod cli;
pub mod error;
pub mod grape;
pub mod lie;
pub mod metrics;
pub mod models;
pub mod ops;
pub mod short_time;

pub use error::{Error, Result};
