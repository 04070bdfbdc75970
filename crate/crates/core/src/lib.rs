pub mod error;
pub mod graph;
pub mod numerics;
pub mod features;
pub mod fixtures;
pub mod encoders;
pub mod scoring;
pub mod eval;
pub mod synth;

pub use error::{Error, ErrorCategory, Result};
