//! Monte Carlo and exact-enumeration experiments: density trajectories,
//! the telescoping upper-bound argument, large-deviation checks and
//! box counting.

pub mod covering;
pub mod deviation;
pub mod stats;
pub mod telescoping;
pub mod trajectory;

pub use covering::{
    box_dimension_estimate, box_dimension_series, covering_series, covering_sum, BoxDimReport, CoverReport,
};
pub use deviation::{
    hoeffding_check, zero_count_bound, zero_count_deviation_check, BoundedDistribution, CheckVerdict, DecayFit,
    DeviationCell, DeviationReport,
};
pub use stats::{theil_sen, Summary, TrendFit, TrendVerdict};
pub use telescoping::{upper_bound_telescoping, SeriesVerdict, TelescopeReport};
pub use trajectory::{density_trajectory, lower_bound_trajectory, seed_list, TrajectoryReport};
