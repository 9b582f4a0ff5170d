//! Simulator for a two-ion entangled-state measurement of the parity-nonconserving
//! light shift in Ba⁺.
//!
//! The pipeline prepares the decoherence-free Bell state with a carrier/sideband
//! pulse sequence, computes the E1_PNC–E2 interference light shift from two standing
//! waves, evolves the state under Zeeman noise and off-resonant loss, and recovers the
//! shift from a simulated parity oscillation.

pub mod angular;
pub mod commands;
pub mod error;
pub mod evolution;
pub mod half;
pub mod ion;
pub mod lightshift;
pub mod measurement;
pub mod noise;
pub mod pulse;
pub mod quantum;
pub mod scenario;
pub mod seeds;
pub mod units;

pub use error::{Error, Result};
pub use half::Half;
