//! Sweep orchestration for the two-way surface-assisted link study: TOML
//! configuration ingestion, figure presets, parallel row evaluation against
//! the `ristw-core` analytic and Monte Carlo layers, and canonical CSV/JSON
//! emission.
//!
//! The binary (`ristw`) is a thin wrapper over this library so every stage
//! is testable in isolation and end to end.

pub mod config;
pub mod emit;
pub mod presets;
pub mod runner;
pub mod table;
