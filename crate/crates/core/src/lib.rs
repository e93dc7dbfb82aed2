//! k-times bin packing: every agent must be placed in exactly `k` distinct bins.
//!
//! Greedy packers live in [`greedy`], exact solvers in `exact`, configuration
//! linear programs and the approximation schemes in `configlp`, time and power
//! allocations in `allocation` and `watts`, synthetic data in `datagen`.

pub mod allocation;
pub mod cli;
pub mod configlp;
pub mod datagen;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod greedy;
pub mod instance;
pub mod lp;
pub mod size;
pub mod watts;

pub use error::{Error, Result};
pub use instance::{bin_load, validate_bins, validate_packing, welfare, Instance, Packing, Violation, WelfareReport};
pub use size::Size;
