//! Library surface of the experiment runner, so integration and
//! acceptance tests can drive the pipeline directly.

pub mod analyze;
pub mod config;
pub mod figures;
pub mod pipeline;
pub mod report;
