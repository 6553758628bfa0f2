//! The recurrence in its three parameterizations, orbits and periods.

mod map;
mod orbit;
mod params;
mod state;

pub use map::{fixed_point, step_general, step_todd, step_two_param, StepMap};
pub use orbit::{detect_period, iterate_orbit, iterate_orbit_until, OrbitRecord};
pub use params::{
    normalize_todd, normalize_two_param, rescale_conjugacy, NormalizedTodd, NormalizedTwoParam,
    Params,
};
pub use state::State3;
