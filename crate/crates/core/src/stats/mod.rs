//! Self-contained hypothesis tests used to check sampler output.

mod hypothesis;
pub mod special;

pub use hypothesis::{
    chi_square_goodness_of_fit, chi_square_independence, chi_square_table, chi_square_two_sample,
    correlation_screen, ks_one_sample, ks_statistic, pearson, proportion_test, Contingency,
    StatsError, TestReport, DEFAULT_ALPHA, KS_MIN_SAMPLES, MIN_EXPECTED,
};
