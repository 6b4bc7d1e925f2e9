//! Optimal drive pulses for a lossy linear resonator and simulation of
//! dispersive qubit readout.
// NaN-rejecting guards are written as `!(x > 0.0)`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod lin_control;
pub mod metrics;
pub mod model;
pub mod pulse;
pub mod quadrature;
pub mod readout;
pub mod repro;
pub mod robustness;
pub mod time_optimal;

pub use error::{PulseError, Result};
pub use model::{ComplexAmplitude, DispersiveParams, SimOptions, SystemParams, Trajectory};
pub use pulse::Pulse;
