//! Sampling the three-step chain `Y -> X -> Z` with q-Normal marginal and
//! conditional q-Normal transitions, and empirical checks on the samples.

mod chain;
mod stats;
mod table;

pub use chain::{sample_chain, write_csv, ChainConfig, ChainSample, ChainSampler, CONDITIONING_POINTS, TABLE_POINTS};
pub use stats::{
    chapman_kolmogorov_residual, correlation_check, empirical_moment_check, ks_statistic, marginal_ks_check,
    time_reversal_residual, Coord,
};
pub use table::{build_inverse_cdf, InverseCdfTable};
