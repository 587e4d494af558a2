//! Regular and fair learning for combinatorial bandits.

pub mod bounds;
pub mod env;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod policy;
pub mod state;

pub use error::{Error, Result};
