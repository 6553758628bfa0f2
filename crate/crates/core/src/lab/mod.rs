//! Boundedness experiments: classification, sweeps, searches, `T^2` scans.

mod classify;
pub mod rng;
mod scan;
mod search;
mod sweep;

pub use classify::{
    classify_orbit, growth_rate, persistence_stats, ClassificationReport, ClassifyConfig,
    PersistenceStats, Verdict, BOUNDED_MARGIN,
};
pub use rng::{random_states, stream_seed, Distribution, SampleBox};
pub use scan::{
    default_scan_tolerance, scan_t2_fixed_points, t2_residual, MinimumRegion, ResidualMinimum,
    ScanGrid, Spacing, T2ScanReport,
};
pub use search::{search_unbounded, SearchReport};
pub use sweep::{run_sweep, InitialSource, ParamGrid, SweepRow, SweepSpec};
