//! Littlewood-Paley analysis on the periodic grid.

mod checks;
mod norms;
mod partition;

pub use checks::{
    bernstein_inf_window, bernstein_window, check_bernstein, check_heat_decay, check_log_interpolation,
    check_log_interpolation_time, heat_window, BernsteinRatio, LogInterpolationReport,
    LogInterpolationTimeReport,
};
pub use norms::{
    besov_b0_inf_inf, bmo_norm, dyadic_bmo_of_samples, holder_norm, tensor_bmo_norm, weighted_sup, BlockNormed,
};
pub use partition::{
    annulus_profile, low_pass_profile, BlockSet, DyadicPartition, ANNULUS_INNER, ANNULUS_OUTER,
    BALL_RADIUS,
};
