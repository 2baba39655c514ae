pub mod cli;
pub mod coarse;
pub mod error;
pub mod format;
pub mod metric_order;
pub mod operators;
pub mod schur;
pub mod space;

pub use error::{Error, Result};
