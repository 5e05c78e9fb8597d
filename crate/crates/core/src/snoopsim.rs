//! Monte Carlo quantification of data-snooping distortions.
//!
//! Two studies live here. The first simulates the minimum standardized
//! count over all lottery numbers, the statistic a researcher implicitly
//! uses when the most extreme number is picked after looking at the data;
//! its empirical distribution yields size distortions and corrected
//! p-values. The second simulates size and power of the moment-based
//! normality tests together with the max/min selection strategies.
//!
//! Replications are independent: replication `r` of scenario `s` draws
//! from stream id `(s << 48) | r`, so results are bit-identical for a
//! fixed seed no matter how many workers run.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    chi_squared_quantile, kde_density, linspace, std_normal_quantile, Density, StudentTSampler,
};
use crate::error::{Error, Result};
use crate::fmt::format_sig;
use crate::lottery::{simulate_null_counts, LotteryConfig};
use crate::normality::{NormalityStats, Statistic};
use crate::rng::RngState;

/// Documented floor on replications for any distributional output.
pub const MIN_REPLICATIONS: u64 = 1000;

/// Stream-id tag for the Gaussian (size) scenario.
const SCENARIO_NULL: u64 = 0;
/// Stream-id tag for the alternative (power) scenario.
const SCENARIO_ALTERNATIVE: u64 = 1;

fn scenario_state(seed: u64, scenario: u64, replication: u64) -> RngState {
    debug_assert!(replication < 1 << 48);
    RngState::with_stream(seed, (scenario << 48) | replication)
}

/// Data-generating process for the normality power study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alternative {
    Gaussian,
    StudentT { df: u32 },
}

impl std::fmt::Display for Alternative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Alternative::Gaussian => write!(f, "gaussian"),
            Alternative::StudentT { df } => write!(f, "t{df}"),
        }
    }
}

/// Full configuration of a Monte Carlo run. `lottery` drives the minimum
/// count study; `sample_size` and `alternative` drive the normality
/// study. The seed is part of the result's identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub replications: u64,
    pub seed: u64,
    pub lottery: LotteryConfig,
    pub sample_size: usize,
    pub alternative: Alternative,
}

impl SimulationConfig {
    /// The published minimum-count setup: 10^4 replications of 10^4 games
    /// of 6 out of 49.
    pub fn zmin_defaults(seed: u64) -> Self {
        SimulationConfig {
            replications: 10_000,
            seed,
            lottery: LotteryConfig {
                pool_size: 49,
                draw_size: 6,
                games: 10_000,
            },
            sample_size: 1000,
            alternative: Alternative::StudentT { df: 10 },
        }
    }

    /// Desk-scale normality study: 10^5 replications of samples of 1000
    /// against t(10). The published scale uses 10^6 replications.
    pub fn normality_defaults(seed: u64) -> Self {
        SimulationConfig {
            replications: 100_000,
            seed,
            lottery: LotteryConfig {
                pool_size: 49,
                draw_size: 6,
                games: 10_000,
            },
            sample_size: 1000,
            alternative: Alternative::StudentT { df: 10 },
        }
    }

    fn check_replications(&self) -> Result<()> {
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::config(format!(
                "distributional output needs at least {MIN_REPLICATIONS} replications, got {}",
                self.replications
            )));
        }
        Ok(())
    }
}

/// Monte Carlo standard error of an estimated probability.
pub fn mc_standard_error(p_hat: f64, replications: u64) -> f64 {
    (p_hat * (1.0 - p_hat) / replications as f64).sqrt()
}

/// A sorted Monte Carlo sample with ECDF and quantile queries.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Sorts and wraps a Monte Carlo sample. Rejects empty or NaN input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("empirical distribution needs values"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("empirical distribution rejects NaN"));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Ascending sample values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    /// Right-continuous ECDF: the fraction of values <= x.
    pub fn ecdf(&self, x: f64) -> f64 {
        debug_assert!(!x.is_nan());
        self.values.partition_point(|v| *v <= x) as f64 / self.values.len() as f64
    }

    /// Smallest sample value whose ECDF reaches `p`; `ecdf(quantile(p)) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain(format!(
                "quantile needs p in (0,1], got {p}"
            )));
        }
        let r = self.values.len();
        let idx = ((p * r as f64).ceil() as usize).clamp(1, r) - 1;
        Ok(self.values[idx])
    }

    /// Kernel density of the sample on an automatic grid spanning the
    /// range plus three bandwidths.
    pub fn density(&self, points: usize) -> Result<Density> {
        let h = crate::distributions::silverman_bandwidth(&self.values)?;
        let grid = linspace(self.min() - 3.0 * h, self.max() + 3.0 * h, points);
        kde_density(&self.values, &grid)
    }

    /// Single-column CSV (`value` header), LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value\n");
        for v in &self.values {
            out.push_str(&format!("{v}\n"));
        }
        out
    }
}

/// Simulates the distribution of the standardized minimum count
/// min_m (S_m - n/V) / sigma_(K) under the uniform null.
pub fn simulate_zmin(config: &SimulationConfig) -> Result<EmpiricalDistribution> {
    config.check_replications()?;
    config.lottery.validate()?;
    let lot = config.lottery;
    let v = lot.pool_size;
    let k = lot.draw_size;
    let n = lot.total_draws() as f64;
    let expected = n / f64::from(v);
    // Per-game binomial variance K*N*(V-K)/V^2, equal to the corrected
    // per-ball variance sigma_(K)^2 times n.
    let sigma_k = (f64::from(k) * lot.games as f64 * f64::from(v - k)
        / (f64::from(v) * f64::from(v)))
    .sqrt();

    let values: Vec<f64> = (0..config.replications)
        .into_par_iter()
        .map_init(
            || {
                let pool: Vec<u32> = (1..=v).collect();
                let counts = vec![0u64; v as usize];
                (pool, counts)
            },
            |(pool, counts), rep| {
                let mut stream = scenario_state(config.seed, SCENARIO_NULL, rep).stream();
                simulate_null_counts(v, k, lot.games, pool, counts, &mut stream);
                let min = *counts.iter().min().expect("nonempty counts");
                (min as f64 - expected) / sigma_k
            },
        )
        .collect();
    EmpiricalDistribution::new(values)
}

/// Left-tail ECDF value at an observed statistic: the p-value corrected
/// for picking the most extreme number after inspection.
pub fn corrected_p_value(dist: &EmpiricalDistribution, z_observed: f64) -> Result<f64> {
    if z_observed.is_nan() {
        return Err(Error::domain("observed statistic must not be NaN"));
    }
    Ok(dist.ecdf(z_observed))
}

/// One row of the size-distortion table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DistortionRow {
    pub alpha: f64,
    /// Actual null rejection rate of the snooped test at nominal level
    /// `alpha`.
    pub rejection_rate: f64,
    pub std_error: f64,
    /// rejection_rate / alpha.
    pub inflation_factor: f64,
}

/// Size distortions of the minimum-count test at several nominal levels.
#[derive(Clone, Debug, Serialize)]
pub struct SizeDistortionTable {
    pub rows: Vec<DistortionRow>,
    pub replications: u64,
}

impl SizeDistortionTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,rejection_rate,std_error,inflation_factor\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                format_sig(r.alpha, 6),
                format_sig(r.rejection_rate, 6),
                format_sig(r.std_error, 6),
                format_sig(r.inflation_factor, 6),
            ));
        }
        out
    }

    pub fn render(&self) -> String {
        let mut out = String::from("alpha     actual size   mc se      inflation\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:<8}  {:<12}  {:<9}  x{:.1}\n",
                format_sig(r.alpha, 4),
                format_sig(r.rejection_rate, 4),
                format_sig(r.std_error, 2),
                r.inflation_factor
            ));
        }
        out
    }
}

/// Evaluates the null rejection rate of the snooped minimum test at each
/// nominal level: ECDF of the simulated distribution at the normal
/// alpha-quantile.
pub fn size_distortion_table(
    dist: &EmpiricalDistribution,
    alphas: &[f64],
) -> Result<SizeDistortionTable> {
    let replications = dist.len() as u64;
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        let z_alpha = std_normal_quantile(alpha)?;
        let rate = dist.ecdf(z_alpha);
        rows.push(DistortionRow {
            alpha,
            rejection_rate: rate,
            std_error: mc_standard_error(rate, replications),
            inflation_factor: rate / alpha,
        });
    }
    Ok(SizeDistortionTable { rows, replications })
}

/// Size and power of one statistic, with Monte Carlo standard errors.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SizePowerEntry {
    pub size: f64,
    pub size_se: f64,
    pub power: f64,
    pub power_se: f64,
}

/// Simulated sizes (Gaussian data) and powers (configured alternative) of
/// the five normality statistics at one nominal level.
#[derive(Clone, Debug, Serialize)]
pub struct SizePowerTable {
    pub alpha: f64,
    pub replications: u64,
    pub sample_size: usize,
    pub alternative: Alternative,
    pub seed: u64,
    pub entries: BTreeMap<Statistic, SizePowerEntry>,
}

#[derive(Clone, Copy, Default)]
struct RejectionCounts {
    gamma1: u64,
    gamma2: u64,
    jb: u64,
    gmax: u64,
    gmin: u64,
}

impl RejectionCounts {
    fn merge(self, other: Self) -> Self {
        RejectionCounts {
            gamma1: self.gamma1 + other.gamma1,
            gamma2: self.gamma2 + other.gamma2,
            jb: self.jb + other.jb,
            gmax: self.gmax + other.gmax,
            gmin: self.gmin + other.gmin,
        }
    }
}

fn fill_sample(
    alternative: Alternative,
    state: RngState,
    buffer: &mut [f64],
) {
    match alternative {
        Alternative::Gaussian => {
            let mut stream = state.stream();
            for slot in buffer.iter_mut() {
                *slot = stream.next_normal();
            }
        }
        Alternative::StudentT { df } => {
            let mut sampler = StudentTSampler::new(df, state).expect("df validated");
            for slot in buffer.iter_mut() {
                *slot = sampler.next();
            }
        }
    }
}

fn moment_pass(buffer: &[f64]) -> (f64, f64) {
    let n = buffer.len() as f64;
    let mean = buffer.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0f64, 0.0f64, 0.0f64);
    for &v in buffer {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let d = m2.sqrt();
    (m3 / (d * d * d), m4 / (m2 * m2))
}

fn run_rejection_scenario(
    seed: u64,
    scenario: u64,
    replications: u64,
    sample_size: usize,
    alternative: Alternative,
    crit_chi1: f64,
    crit_chi2: f64,
) -> RejectionCounts {
    (0..replications)
        .into_par_iter()
        .fold(
            || (vec![0.0f64; sample_size], RejectionCounts::default()),
            |(mut buffer, acc), rep| {
                let state = scenario_state(seed, scenario, rep);
                fill_sample(alternative, state, &mut buffer);
                let (skew, kurt) = moment_pass(&buffer);
                let s = NormalityStats::from_moments(sample_size, skew, kurt);
                let add = RejectionCounts {
                    gamma1: u64::from(s.gamma1_sq > crit_chi1),
                    gamma2: u64::from(s.gamma2_sq > crit_chi1),
                    jb: u64::from(s.jb > crit_chi2),
                    gmax: u64::from(s.gamma_max_sq > crit_chi1),
                    gmin: u64::from(s.gamma_min_sq > crit_chi1),
                };
                (buffer, acc.merge(add))
            },
        )
        .map(|(_, acc)| acc)
        .reduce(RejectionCounts::default, RejectionCounts::merge)
}

/// Simulates the Table-style size/power study: Gaussian data for the size
/// row, the configured alternative for the power row. Rejection rules are
/// `JB > chi2_{1-alpha}(2)` and each single- or selected-moment statistic
/// against `chi2_{1-alpha}(1)`.
pub fn normality_size_power(config: &SimulationConfig, alpha: f64) -> Result<SizePowerTable> {
    config.check_replications()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    if config.sample_size < 4 {
        return Err(Error::domain(format!(
            "sample size must be at least 4, got {}",
            config.sample_size
        )));
    }
    if let Alternative::StudentT { df } = config.alternative {
        if df < 1 {
            return Err(Error::domain("Student-t alternative needs df >= 1"));
        }
    }
    let crit_chi1 = chi_squared_quantile(1.0 - alpha, 1)?;
    let crit_chi2 = chi_squared_quantile(1.0 - alpha, 2)?;

    let size_counts = run_rejection_scenario(
        config.seed,
        SCENARIO_NULL,
        config.replications,
        config.sample_size,
        Alternative::Gaussian,
        crit_chi1,
        crit_chi2,
    );
    let power_counts = run_rejection_scenario(
        config.seed,
        SCENARIO_ALTERNATIVE,
        config.replications,
        config.sample_size,
        config.alternative,
        crit_chi1,
        crit_chi2,
    );

    let r = config.replications;
    let rate = |c: u64| c as f64 / r as f64;
    let entry = |size_c: u64, power_c: u64| SizePowerEntry {
        size: rate(size_c),
        size_se: mc_standard_error(rate(size_c), r),
        power: rate(power_c),
        power_se: mc_standard_error(rate(power_c), r),
    };
    let mut entries = BTreeMap::new();
    entries.insert(Statistic::Gamma1Sq, entry(size_counts.gamma1, power_counts.gamma1));
    entries.insert(Statistic::Gamma2Sq, entry(size_counts.gamma2, power_counts.gamma2));
    entries.insert(Statistic::Jb, entry(size_counts.jb, power_counts.jb));
    entries.insert(Statistic::GammaMaxSq, entry(size_counts.gmax, power_counts.gmax));
    entries.insert(Statistic::GammaMinSq, entry(size_counts.gmin, power_counts.gmin));

    Ok(SizePowerTable {
        alpha,
        replications: config.replications,
        sample_size: config.sample_size,
        alternative: config.alternative,
        seed: config.seed,
        entries,
    })
}

impl SizePowerTable {
    /// CSV in the published table layout: one column per statistic, rows
    /// for size and power plus their Monte Carlo standard errors.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for stat in Statistic::ALL {
            out.push(',');
            out.push_str(stat.key());
        }
        out.push('\n');
        let mut push_row = |label: &str, f: &dyn Fn(&SizePowerEntry) -> f64| {
            out.push_str(label);
            for stat in Statistic::ALL {
                out.push(',');
                out.push_str(&format_sig(f(&self.entries[&stat]), 6));
            }
            out.push('\n');
        };
        push_row("size", &|e| e.size);
        push_row("power", &|e| e.power);
        push_row("size_se", &|e| e.size_se);
        push_row("power_se", &|e| e.power_se);
        out
    }

    /// Console table mirroring the published layout.
    pub fn render(&self) -> String {
        let mut out = format!(
            "size/power at alpha = {} (n = {}, R = {}, alternative = {})\n",
            format_sig(self.alpha, 4),
            self.sample_size,
            self.replications,
            self.alternative
        );
        out.push_str(&format!("{:<14}", "test statistic"));
        for stat in Statistic::ALL {
            out.push_str(&format!("{:>10}", stat.to_string()));
        }
        out.push('\n');
        let mut line = |label: &str, f: &dyn Fn(&SizePowerEntry) -> f64| {
            out.push_str(&format!("{label:<14}"));
            for stat in Statistic::ALL {
                out.push_str(&format!("{:>10.4}", f(&self.entries[&stat])));
            }
            out.push('\n');
        };
        line("size", &|e| e.size);
        line("power", &|e| e.power);
        out
    }
}
