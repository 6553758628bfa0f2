//! Numerical laboratory for `z_{n+1} = (alpha + beta z_n + lambda z_{n-1}) / z_{n-2}`.
//!
//! * [`numerics`]: exact big-rational and binary64 scalars.
//! * [`dynamics`]: the step maps, normalizations, fixed points, orbits, periods.
//! * [`energy`]: Todd's invariant, the Lyapunov function, energy inequality checks.
//! * [`lab`]: orbit classification, sweeps, unboundedness searches, `T^2` scans.
//! * [`cli`]: the `todd-lab` command line and its output writers.

pub mod cli;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod lab;
pub mod numerics;
mod par;

pub use error::{Error, Result};
