//! Experiment runner and verification suite for the AMPC connectivity
//! algorithms.

pub mod config;
pub mod constants;
pub mod experiment;
pub mod stats;
pub mod verify;
