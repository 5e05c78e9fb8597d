//! Uniformity tests for lottery counts with the finite-population
//! variance correction.
//!
//! Drawing K balls per game without replacement makes the per-ball
//! indicators negatively dependent, which shrinks the count variance by
//! (V-K)/(V-1) relative to the i.i.d. binomial model. Both tests here
//! report the naive i.i.d. statistic and the corrected one: the single
//! number z-test scales by sqrt((V-1)/(V-K)), the Pearson statistic by
//! (V-1)/(V-K). With K = 1 both corrections vanish.

use serde::{Deserialize, Serialize};

use crate::distributions::{chi_squared_sf, std_normal_cdf};
use crate::error::{Error, Result};
use crate::fmt::format_sig;
use crate::lottery::{counts_from_history, CountVector, DrawHistory, SampleKind};

/// Which tail of the reference distribution supplies the p-value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailSide {
    Left,
    Right,
    TwoSided,
}

impl std::fmt::Display for TailSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TailSide::Left => write!(f, "left"),
            TailSide::Right => write!(f, "right"),
            TailSide::TwoSided => write!(f, "two-sided"),
        }
    }
}

/// The null hypothesis: every number has probability 1/V per ball, with
/// `n` balls drawn in games of `draw_size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullModel {
    pub pool_size: u32,
    pub draw_size: u32,
    pub n: u64,
}

impl NullModel {
    pub fn new(pool_size: u32, draw_size: u32, n: u64) -> Result<Self> {
        if draw_size < 1 || draw_size >= pool_size {
            return Err(Error::domain(format!(
                "need 1 <= K < V, got K={draw_size} V={pool_size}"
            )));
        }
        if n == 0 {
            return Err(Error::domain("null model needs n >= 1"));
        }
        Ok(NullModel {
            pool_size,
            draw_size,
            n,
        })
    }

    /// Per-ball hit probability 1/V.
    pub fn p0(&self) -> f64 {
        1.0 / f64::from(self.pool_size)
    }

    /// Expected count n/V, kept at full precision (display may floor it,
    /// the arithmetic never does).
    pub fn expected_count(&self) -> f64 {
        self.n as f64 / f64::from(self.pool_size)
    }

    /// i.i.d. binomial variance n(V-1)/V^2.
    pub fn sigma_iid_sq(&self) -> f64 {
        let v = f64::from(self.pool_size);
        self.n as f64 * (v - 1.0) / (v * v)
    }

    /// Without-replacement variance (V-K)/(V-1) * sigma_iid^2.
    pub fn sigma_k_sq(&self) -> f64 {
        let v = f64::from(self.pool_size);
        let k = f64::from(self.draw_size);
        (v - k) / (v - 1.0) * self.sigma_iid_sq()
    }

    /// Scale factor sqrt((V-1)/(V-K)) taking the i.i.d. z to the
    /// corrected one.
    pub fn z_correction(&self) -> f64 {
        let v = f64::from(self.pool_size);
        let k = f64::from(self.draw_size);
        ((v - 1.0) / (v - k)).sqrt()
    }

    /// Scale factor (V-1)/(V-K) taking the i.i.d. Pearson statistic to
    /// the corrected one.
    pub fn chi_sq_correction(&self) -> f64 {
        let v = f64::from(self.pool_size);
        let k = f64::from(self.draw_size);
        (v - 1.0) / (v - k)
    }
}

/// Single-number test result: naive and corrected statistics with their
/// standard deviations, and the p-value of the corrected statistic.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZTestResult {
    pub statistic_iid: f64,
    pub statistic_corrected: f64,
    pub sigma_iid: f64,
    pub sigma_k: f64,
    pub p_value: f64,
    pub side: TailSide,
}

/// Pearson goodness-of-fit result against the uniform null.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChiSqTestResult {
    pub statistic_iid: f64,
    pub statistic_corrected: f64,
    pub df: u32,
    pub p_value: f64,
}

fn tail_p_value(z: f64, side: TailSide) -> Result<f64> {
    let left = std_normal_cdf(z)?;
    Ok(match side {
        TailSide::Left => left,
        TailSide::Right => 1.0 - left,
        TailSide::TwoSided => (2.0 * left.min(1.0 - left)).min(1.0),
    })
}

/// Tests H0: p_m = 1/V for one fixed number from its count S_m.
pub fn z_test_number(count: u64, model: &NullModel, side: TailSide) -> Result<ZTestResult> {
    if count > model.n {
        return Err(Error::domain(format!(
            "count {count} exceeds total draws {}",
            model.n
        )));
    }
    let sigma_iid = model.sigma_iid_sq().sqrt();
    let sigma_k = model.sigma_k_sq().sqrt();
    let deviation = count as f64 - model.expected_count();
    let statistic_iid = deviation / sigma_iid;
    let statistic_corrected = statistic_iid * model.z_correction();
    let p_value = tail_p_value(statistic_corrected, side)?;
    Ok(ZTestResult {
        statistic_iid,
        statistic_corrected,
        sigma_iid,
        sigma_k,
        p_value,
        side,
    })
}

/// Pearson uniformity test over all V counts, corrected for drawing
/// without replacement; the reference distribution is chi-squared(V-1).
pub fn pearson_test(counts: &CountVector, model: &NullModel) -> Result<ChiSqTestResult> {
    if counts.pool_size() != model.pool_size {
        return Err(Error::domain(format!(
            "count vector covers {} numbers, model expects {}",
            counts.pool_size(),
            model.pool_size
        )));
    }
    if counts.total() != model.n {
        return Err(Error::domain(format!(
            "count total {} does not match model n = {}",
            counts.total(),
            model.n
        )));
    }
    let expected = model.expected_count();
    let statistic_iid: f64 = counts
        .counts()
        .iter()
        .map(|&s| {
            let d = s as f64 - expected;
            d * d / expected
        })
        .sum();
    let statistic_corrected = statistic_iid * model.chi_sq_correction();
    let df = model.pool_size - 1;
    let p_value = chi_squared_sf(statistic_corrected, df)?;
    Ok(ChiSqTestResult {
        statistic_iid,
        statistic_corrected,
        df,
        p_value,
    })
}

/// Sample II mixes games with K and K+1 draws, so no single correction is
/// valid; the p-value is only bracketed by applying both corrections.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MixedKResult {
    /// Corrected with the main draw size K (understates the correction).
    pub with_k: ChiSqTestResult,
    /// Corrected with K+1 (overstates the correction).
    pub with_k_plus_one: ChiSqTestResult,
    /// Lower p-value bound, from the K+1 correction.
    pub p_lower: f64,
    /// Upper p-value bound, from the K correction.
    pub p_upper: f64,
}

impl MixedKResult {
    /// Fixed caveat attached to every mixed-K row.
    pub const NOTE: &'static str = "bounds only (mixed K)";
}

/// Table-style uniformity report over the three count reductions of one
/// history: sample I (main draws, K-corrected), sample II (main plus
/// additional, p-value bracketed) and sample III (additional only,
/// i.i.d.).
#[derive(Clone, Debug, Serialize)]
pub struct SampleChainReport {
    pub pool_size: u32,
    pub draw_size: u32,
    pub games: u64,
    pub games_with_additional: u64,
    pub n_main: u64,
    pub sample_i: ChiSqTestResult,
    pub sample_ii: Option<MixedKResult>,
    pub sample_iii: Option<ChiSqTestResult>,
    /// Present when samples II/III are omitted.
    pub notice: Option<String>,
}

/// Runs the three-sample uniformity chain on a history.
pub fn sample_chain_report(history: &DrawHistory) -> Result<SampleChainReport> {
    let config = history.config();
    let v = config.pool_size;
    let k = config.draw_size;

    let counts_i = counts_from_history(history, SampleKind::MainOnly)?;
    let model_i = NullModel::new(v, k, counts_i.total())?;
    let sample_i = pearson_test(&counts_i, &model_i)?;

    let extra = history.games_with_additional();
    if extra == 0 {
        return Ok(SampleChainReport {
            pool_size: v,
            draw_size: k,
            games: config.games,
            games_with_additional: 0,
            n_main: counts_i.total(),
            sample_i,
            sample_ii: None,
            sample_iii: None,
            notice: Some("no additional numbers in history; samples II and III omitted".into()),
        });
    }
    if k + 1 >= v {
        return Err(Error::domain(format!(
            "mixed-K bracket needs K+1 < V, got K={k} V={v}"
        )));
    }

    let counts_ii = counts_from_history(history, SampleKind::WithAdditional)?;
    let with_k = pearson_test(&counts_ii, &NullModel::new(v, k, counts_ii.total())?)?;
    let with_k_plus_one = pearson_test(&counts_ii, &NullModel::new(v, k + 1, counts_ii.total())?)?;
    let sample_ii = MixedKResult {
        with_k,
        with_k_plus_one,
        p_lower: with_k_plus_one.p_value,
        p_upper: with_k.p_value,
    };

    let counts_iii = counts_from_history(history, SampleKind::AdditionalOnly)?;
    let sample_iii = pearson_test(&counts_iii, &NullModel::new(v, 1, counts_iii.total())?)?;

    Ok(SampleChainReport {
        pool_size: v,
        draw_size: k,
        games: config.games,
        games_with_additional: extra,
        n_main: counts_i.total(),
        sample_i,
        sample_ii: Some(sample_ii),
        sample_iii: Some(sample_iii),
        notice: None,
    })
}

impl SampleChainReport {
    fn rows(&self) -> Vec<[String; 5]> {
        let k = self.draw_size;
        let v = self.pool_size;
        let mut rows = vec![[
            "I".to_string(),
            format!("{k}/{v}"),
            self.n_main.to_string(),
            format!("chi2_({k}) = {:.2}", self.sample_i.statistic_corrected),
            format_sig(self.sample_i.p_value, 4),
        ]];
        if let Some(ii) = &self.sample_ii {
            rows.push([
                "II".to_string(),
                format!("{k}/{v} + add. num."),
                (self.n_main + self.games_with_additional).to_string(),
                format!(
                    "chi2_({}) = {:.2}",
                    k + 1,
                    ii.with_k_plus_one.statistic_corrected
                ),
                format!(
                    "{} (p in [{}, {}], {})",
                    format_sig(ii.p_lower, 4),
                    format_sig(ii.p_lower, 4),
                    format_sig(ii.p_upper, 4),
                    MixedKResult::NOTE
                ),
            ]);
        }
        if let Some(iii) = &self.sample_iii {
            rows.push([
                "III".to_string(),
                "add. num. only".to_string(),
                self.games_with_additional.to_string(),
                format!("chi2_iid = {:.2}", iii.statistic_iid),
                format_sig(iii.p_value, 4),
            ]);
        }
        rows
    }

    /// Console table with the columns sample, type, n, statistic, p-value.
    pub fn render(&self) -> String {
        let header = ["sample", "type", "n", "statistic", "p-value"];
        let rows = self.rows();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row.iter()) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let fmt_row = |cells: &[String], widths: &[usize]| -> String {
            cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        out.push_str(&fmt_row(
            &header.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            &widths,
        ));
        out.push('\n');
        for row in &rows {
            out.push_str(&fmt_row(row, &widths));
            out.push('\n');
        }
        if let Some(n) = &self.notice {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }

    /// CSV form of the same table, with explicit p-value bounds columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample,type,n,statistic,p_value,p_lower,p_upper,note\n");
        let k = self.draw_size;
        let v = self.pool_size;
        out.push_str(&format!(
            "I,{k}/{v},{},{},{},,,\n",
            self.n_main,
            format_sig(self.sample_i.statistic_corrected, 6),
            format_sig(self.sample_i.p_value, 6),
        ));
        if let Some(ii) = &self.sample_ii {
            out.push_str(&format!(
                "II,{k}/{v} + add. num.,{},{},,{},{},{}\n",
                self.n_main + self.games_with_additional,
                format_sig(ii.with_k_plus_one.statistic_corrected, 6),
                format_sig(ii.p_lower, 6),
                format_sig(ii.p_upper, 6),
                MixedKResult::NOTE,
            ));
        }
        if let Some(iii) = &self.sample_iii {
            out.push_str(&format!(
                "III,add. num. only,{},{},{},,,\n",
                self.games_with_additional,
                format_sig(iii.statistic_iid, 6),
                format_sig(iii.p_value, 6),
            ));
        }
        out
    }
}
