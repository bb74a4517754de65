//! Distances between distributions over sequences, empirical estimates from
//! sampler output, and small-sample statistics.

mod dist;
mod empirical;
mod stats;

pub use dist::{chi2, coverage_quantile, hist_l1, kl, position_histogram, tv};
pub use empirical::EmpiricalDist;
pub use stats::{bootstrap_mean_ci, mean, percentile, stderr};
