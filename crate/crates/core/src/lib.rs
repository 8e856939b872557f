//! Connected components in a simulated adaptive massively parallel
//! computation (AMPC) model.
//!
//! [`runtime`] simulates synchronous rounds over a shared key/value table
//! with per-machine space quotas. [`graph`] holds the graph types,
//! generators and the sequential oracle. [`forest`] and [`general`] are the
//! two connectivity pipelines built on top of the runtime.

pub mod forest;
pub mod general;
pub mod graph;
pub mod ns;
pub mod runtime;
pub mod util;
