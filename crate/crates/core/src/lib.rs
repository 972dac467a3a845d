//! Fair division of indivisible goods under binary XOS and binary
//! subadditive valuations.
//!
//! The crate provides a polynomial-time Nash social welfare approximation
//! in the value-oracle model ([`nsw_alg::solve`]), exhaustive oracles for
//! optimal welfare and (groupwise) maximin shares, generators for the
//! standard hard and gap instance families, and an [`audit`] that checks
//! every guarantee of the solver on a concrete allocation.

pub mod audit;
pub mod error;
pub mod exact;
pub mod generators;
pub mod goods;
pub mod instance;
pub mod nsw_alg;
pub mod oracles;
pub mod valuations;

pub use audit::{audit, AuditReport};
pub use error::{Error, Result};
pub use goods::GoodSet;
pub use instance::{is_envy_free, is_non_wasteful, nash_welfare, social_welfare, Allocation, Instance, ValueProfile};
pub use nsw_alg::{solve, SolveResult, SolveStatus, SolveTrace};
pub use oracles::Budget;
pub use valuations::{CountingOracle, ValuationSpec};
