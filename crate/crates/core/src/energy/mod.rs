//! Todd's invariant, the Lyapunov function built from it, and checks of
//! sub-energy (non-increase) and super-energy (geometric growth) inequalities.

mod candidate;
mod invariant;
mod lyapunov;
mod super_energy;

use crate::dynamics::State3;
use crate::numerics::Scalar;

pub use candidate::{
    build_sub_energy_candidate, check_sub_energy, EnergyCandidate, SubEnergyReport,
    SubEnergyVariant, MAX_COMPOSITION_DEPTH,
};
pub use invariant::{
    coercivity_bounds, equilibrium_energy, equilibrium_energy_bounds, equilibrium_todd,
    invariant_drift, invariant_i,
};
pub use lyapunov::{check_lyapunov_conditions, lyapunov_v, LyapunovReport};
pub use super_energy::{refute_super_energy, SuperEnergySpec};

/// A state where an inequality fails, with both evaluated sides.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationWitness {
    pub state: State3,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub inequality: String,
}

impl ViolationWitness {
    pub fn new(state: State3, lhs: Scalar, rhs: Scalar, inequality: &str) -> Self {
        Self {
            state,
            lhs,
            rhs,
            inequality: inequality.to_string(),
        }
    }
}
