//! Downlink rate-splitting multiple access (RSMA) with one common stream:
//! globally optimal sum-rate maximization under per-user rate demands, a total
//! power budget, and a successive-interference-cancellation power gap.
//!
//! The solver reduces the joint rate/power problem to closed-form private
//! power allocation, corner enumeration over the common-rate shares, and a
//! one-dimensional scan over the common power. Baseline schemes (superposition
//! broadcast, NOMA, OFDMA), a brute-force grid oracle, and a Monte-Carlo
//! experiment harness round out the crate.
//!
//! # Example
//!
//! ```
//! use rsma_core::model::{NetworkInstance, SolverParams};
//! use rsma_core::search::solve_rsma_auto;
//!
//! // Two users, flat demands of 1 Mbit/s, 1 MHz bandwidth, 1 W budget.
//! let inst = NetworkInstance::new(
//!     vec![1e-12, 4e-12], // channel gains, ascending
//!     3.9811e-14,         // noise power [W]
//!     1e6,                // bandwidth [Hz]
//!     1.0,                // power budget [W]
//!     3.9811e-13,         // SIC detection threshold [W]
//!     vec![1e6, 1e6],     // rate demands [bit/s]
//! )
//! .unwrap();
//! let (sol, _trace) = solve_rsma_auto(&inst, &SolverParams::for_instance(&inst)).unwrap();
//! assert!(sol.sum_rate > 2e6);
//! ```

pub mod baselines;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod model;
pub mod oracle;
pub mod private_power;
pub mod rate_alloc;
pub mod search;

pub use error::{Error, Infeasibility, Result};
