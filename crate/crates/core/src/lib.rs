//! Statistical toolkit for "K out of V" lottery uniformity testing and for
//! quantifying how data snooping distorts hypothesis tests.
//!
//! The crate has three layers:
//!
//! * a self-contained probability kernel ([`distributions`]) with normal
//!   and chi-squared CDFs/quantiles, Student-t sampling, kernel density
//!   estimation and reproducible splittable random streams ([`rng`]);
//! * the tests themselves: finite-population-corrected single-number and
//!   Pearson uniformity tests over lottery draw histories ([`lottery`],
//!   [`uniformity`]) and moment-based normality tests with their
//!   snooping selectors ([`normality`]);
//! * Monte Carlo studies ([`snoopsim`]) measuring what selection-after-
//!   inspection does to test size, power and p-values.
//!
//! Every simulation is a pure function of its configuration, seed
//! included, and is bit-reproducible regardless of thread count.

pub mod distributions;
pub mod error;
pub mod fmt;
pub mod lottery;
pub mod normality;
pub mod rng;
pub mod snoopsim;
pub mod uniformity;

pub use error::{Error, Result};

/// Fixed default seed used wherever the caller does not supply one, so
/// unattended runs stay deterministic.
pub const DEFAULT_SEED: u64 = 1729;

pub use distributions::{
    chi_squared_cdf, chi_squared_quantile, chi_squared_sf, kde_density,
    kde_density_with_bandwidth, linspace, sample_student_t, silverman_bandwidth, std_normal_cdf,
    std_normal_pdf, std_normal_quantile, Density, StudentTSampler,
};
pub use lottery::{
    counts_from_history, game_indicators, parse_draw_csv, parse_summary_csv, simulate_counts,
    simulate_history, write_draw_csv, CountVector, DrawHistory, Game, LotteryConfig, SampleKind,
    SummaryCounts, DEFAULT_DRAW_SIZE, DEFAULT_POOL_SIZE,
};
pub use normality::{
    analytic_snoop_size, moment_stats, normality_tests, MomentStats, NormalityResult,
    NormalityStats, SelectedMoment, SnoopSizes, Statistic,
};
pub use rng::RngState;
pub use snoopsim::{
    corrected_p_value, mc_standard_error, normality_size_power, simulate_zmin,
    size_distortion_table, Alternative, EmpiricalDistribution, SimulationConfig,
    SizeDistortionTable, SizePowerTable, MIN_REPLICATIONS,
};
pub use uniformity::{
    pearson_test, sample_chain_report, z_test_number, ChiSqTestResult, MixedKResult, NullModel,
    SampleChainReport, TailSide, ZTestResult,
};
