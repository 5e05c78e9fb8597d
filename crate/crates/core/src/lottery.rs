//! The "K out of V" lottery: simulated and ingested draw histories, and
//! their reduction to per-number count statistics.
//!
//! A history is a sequence of games; each game draws `K` distinct numbers
//! from `{1, ..., V}` without replacement, optionally followed by one
//! additional number from the remaining `V - K`. Three count reductions
//! matter downstream: sample I (main numbers only), sample II (main plus
//! additional) and sample III (additional numbers alone).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{partial_shuffle, RngState, Stream};

/// Pool size of the classic German lottery.
pub const DEFAULT_POOL_SIZE: u32 = 49;
/// Numbers drawn per game in the classic German lottery.
pub const DEFAULT_DRAW_SIZE: u32 = 6;

const DRAW_CSV_HEADER: &str = "date,n1,n2,n3,n4,n5,n6,add";

/// Urn parameters of a "K out of V" lottery with N games.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LotteryConfig {
    /// V: number of balls in the urn.
    pub pool_size: u32,
    /// K: balls drawn per game.
    pub draw_size: u32,
    /// N: games per history.
    pub games: u64,
}

impl LotteryConfig {
    pub fn new(pool_size: u32, draw_size: u32, games: u64) -> Result<Self> {
        let cfg = LotteryConfig {
            pool_size,
            draw_size,
            games,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.draw_size < 1 || self.draw_size >= self.pool_size {
            return Err(Error::config(format!(
                "need 1 <= draw_size < pool_size, got K={} V={}",
                self.draw_size, self.pool_size
            )));
        }
        if self.games < 1 {
            return Err(Error::config("need at least one game"));
        }
        Ok(())
    }

    /// Total main-number draws n = N * K.
    pub fn total_draws(&self) -> u64 {
        self.games * u64::from(self.draw_size)
    }
}

/// One game: `draw_size` distinct main numbers (in draw order) and an
/// optional additional number outside the main set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    numbers: Vec<u32>,
    additional: Option<u32>,
}

impl Game {
    pub fn new(numbers: Vec<u32>, additional: Option<u32>, pool_size: u32) -> Result<Self> {
        for &n in &numbers {
            if n < 1 || n > pool_size {
                return Err(Error::domain(format!(
                    "number {n} outside 1..={pool_size}"
                )));
            }
        }
        for (i, &a) in numbers.iter().enumerate() {
            if numbers[i + 1..].contains(&a) {
                return Err(Error::domain(format!("duplicate number {a} in game")));
            }
        }
        if let Some(a) = additional {
            if a < 1 || a > pool_size {
                return Err(Error::domain(format!(
                    "additional number {a} outside 1..={pool_size}"
                )));
            }
            if numbers.contains(&a) {
                return Err(Error::domain(format!(
                    "additional number {a} duplicates a main number"
                )));
            }
        }
        Ok(Game { numbers, additional })
    }

    pub fn numbers(&self) -> &[u32] {
        &self.numbers
    }

    pub fn additional(&self) -> Option<u32> {
        self.additional
    }

    pub fn has_additional(&self) -> bool {
        self.additional.is_some()
    }

    /// Whether `m` is among the main numbers.
    pub fn contains(&self, m: u32) -> bool {
        self.numbers.contains(&m)
    }
}

/// An ordered draw history with validated games. Immutable after
/// construction and safe to share across workers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrawHistory {
    config: LotteryConfig,
    games: Vec<Game>,
    dates: Vec<String>,
}

impl DrawHistory {
    /// Builds a history from games already validated against `pool_size`
    /// and `draw_size`. `dates` may be empty (simulated histories) or one
    /// label per game (parsed histories).
    pub fn new(
        pool_size: u32,
        draw_size: u32,
        games: Vec<Game>,
        dates: Vec<String>,
    ) -> Result<Self> {
        let config = LotteryConfig::new(pool_size, draw_size, games.len() as u64)?;
        for g in &games {
            if g.numbers().len() != draw_size as usize {
                return Err(Error::config(format!(
                    "game has {} numbers, expected {draw_size}",
                    g.numbers().len()
                )));
            }
        }
        if !dates.is_empty() && dates.len() != games.len() {
            return Err(Error::config("dates must be empty or one per game"));
        }
        Ok(DrawHistory {
            config,
            games,
            dates,
        })
    }

    pub fn config(&self) -> LotteryConfig {
        self.config
    }

    pub fn games(&self) -> &[Game] {
        &self.games
    }

    pub fn len(&self) -> usize {
        self.games.len()
    }

    pub fn is_empty(&self) -> bool {
        self.games.is_empty()
    }

    pub fn games_with_additional(&self) -> u64 {
        self.games.iter().filter(|g| g.has_additional()).count() as u64
    }
}

/// Per-number counts S_1..S_V with their total n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
    total: u64,
}

impl CountVector {
    /// Wraps raw counts indexed by number (index 0 is number 1).
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        CountVector { counts, total }
    }

    pub fn pool_size(&self) -> u32 {
        self.counts.len() as u32
    }

    /// S_m for number `m` (1-based).
    pub fn count(&self, m: u32) -> u64 {
        self.counts[(m - 1) as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn min_count(&self) -> u64 {
        *self.counts.iter().min().expect("nonempty counts")
    }

    pub fn max_count(&self) -> u64 {
        *self.counts.iter().max().expect("nonempty counts")
    }
}

/// Which count reduction to take from a history: sample I, II or III.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleKind {
    /// Sample I: main numbers only, n = N * K.
    MainOnly,
    /// Sample II: main numbers plus the additional number where present.
    WithAdditional,
    /// Sample III: additional numbers alone.
    AdditionalOnly,
}

/// Simulates a draw history. Each game is a uniform random K-subset of
/// the pool; the first `floor(fraction * N)` games also get an additional
/// number drawn uniformly from the remaining V - K. Putting the
/// additional-bearing games first is a fixed convention; every count
/// statistic downstream is order-invariant.
pub fn simulate_history(
    config: LotteryConfig,
    include_additional_fraction: f64,
    rng: RngState,
) -> Result<DrawHistory> {
    config.validate()?;
    if !(0.0..=1.0).contains(&include_additional_fraction) {
        return Err(Error::domain(format!(
            "additional fraction must lie in [0,1], got {include_additional_fraction}"
        )));
    }
    let with_additional = (include_additional_fraction * config.games as f64).floor() as u64;
    let mut stream = rng.stream();
    let mut pool: Vec<u32> = (1..=config.pool_size).collect();
    let k = config.draw_size as usize;

    let games = (0..config.games)
        .map(|j| {
            let take = if j < with_additional { k + 1 } else { k };
            partial_shuffle(&mut pool, take, &mut stream);
            let additional = (take > k).then(|| pool[k]);
            Game {
                numbers: pool[..k].to_vec(),
                additional,
            }
        })
        .collect();
    DrawHistory::new(config.pool_size, config.draw_size, games, Vec::new())
}

/// Simulates one history under the uniform null and reduces it straight
/// to sample-I counts, without materializing the games. Draws the same
/// stream as `simulate_history` with fraction 0, so
/// `counts_from_history(simulate_history(cfg, 0.0, rng), MainOnly)`
/// produces the identical vector.
pub fn simulate_counts(config: LotteryConfig, rng: RngState) -> Result<CountVector> {
    config.validate()?;
    let mut pool: Vec<u32> = (1..=config.pool_size).collect();
    let mut counts = vec![0u64; config.pool_size as usize];
    let mut stream = rng.stream();
    simulate_null_counts(
        config.pool_size,
        config.draw_size,
        config.games,
        &mut pool,
        &mut counts,
        &mut stream,
    );
    Ok(CountVector::from_counts(counts))
}

/// Count-only simulation of one history under the uniform null: the same
/// draw stream as `simulate_history` with fraction 0, without
/// materializing the games. Used by the Monte Carlo studies.
pub(crate) fn simulate_null_counts(
    pool_size: u32,
    draw_size: u32,
    games: u64,
    pool: &mut [u32],
    counts: &mut [u64],
    stream: &mut Stream,
) {
    counts.fill(0);
    let k = draw_size as usize;
    debug_assert_eq!(pool.len(), pool_size as usize);
    for _ in 0..games {
        partial_shuffle(pool, k, stream);
        for &x in &pool[..k] {
            counts[(x - 1) as usize] += 1;
        }
    }
}

/// Reduces a history to a count vector for the requested sample.
pub fn counts_from_history(history: &DrawHistory, kind: SampleKind) -> Result<CountVector> {
    let v = history.config().pool_size as usize;
    let mut counts = vec![0u64; v];
    match kind {
        SampleKind::MainOnly | SampleKind::WithAdditional => {
            for game in history.games() {
                for &n in game.numbers() {
                    counts[(n - 1) as usize] += 1;
                }
                if kind == SampleKind::WithAdditional {
                    if let Some(a) = game.additional() {
                        counts[(a - 1) as usize] += 1;
                    }
                }
            }
        }
        SampleKind::AdditionalOnly => {
            if history.games_with_additional() == 0 {
                return Err(Error::EmptySample(
                    "history has no additional numbers".into(),
                ));
            }
            for game in history.games() {
                if let Some(a) = game.additional() {
                    counts[(a - 1) as usize] += 1;
                }
            }
        }
    }
    Ok(CountVector::from_counts(counts))
}

/// Per-game indicator of number `m` appearing among the main numbers.
/// Summing the indicators recovers the sample-I count of `m`.
pub fn game_indicators(history: &DrawHistory, m: u32) -> Result<Vec<bool>> {
    if m < 1 || m > history.config().pool_size {
        return Err(Error::domain(format!(
            "number {m} outside 1..={}",
            history.config().pool_size
        )));
    }
    Ok(history.games().iter().map(|g| g.contains(m)).collect())
}

fn parse_number(field: &str, what: &str, pool_size: u32, line: usize) -> Result<u32> {
    let n: u32 = field
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("{what} is not an integer: {field:?}")))?;
    if n < 1 || n > pool_size {
        return Err(Error::parse(
            line,
            format!("{what} = {n} outside 1..={pool_size}"),
        ));
    }
    Ok(n)
}

fn validate_date(field: &str, line: usize) -> Result<String> {
    let bytes = field.as_bytes();
    let ok = bytes.len() == 10
        && bytes[4] == b'-'
        && bytes[7] == b'-'
        && bytes
            .iter()
            .enumerate()
            .all(|(i, &b)| i == 4 || i == 7 || b.is_ascii_digit());
    if !ok {
        return Err(Error::parse(
            line,
            format!("date must be ISO yyyy-mm-dd, got {field:?}"),
        ));
    }
    Ok(field.to_string())
}

/// Parses a draw-history CSV (schema `date,n1,...,n6,add`; `add` empty for
/// games without an additional number). Rows keep file order; every
/// violation reports its 1-based line number.
pub fn parse_draw_csv(text: &str, pool_size: u32) -> Result<DrawHistory> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty input".to_string()))?;
    if header.trim_end_matches('\r') != DRAW_CSV_HEADER {
        return Err(Error::parse(
            1,
            format!("expected header {DRAW_CSV_HEADER:?}, got {header:?}"),
        ));
    }

    let mut games = Vec::new();
    let mut dates = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1; // 1-based, counting the header
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::parse(
                line,
                format!("expected 8 fields, got {}", fields.len()),
            ));
        }
        let date = validate_date(fields[0], line)?;
        let mut numbers = Vec::with_capacity(6);
        for (i, field) in fields[1..7].iter().enumerate() {
            let n = parse_number(field, &format!("n{}", i + 1), pool_size, line)?;
            if numbers.contains(&n) {
                return Err(Error::parse(line, format!("duplicate number {n}")));
            }
            numbers.push(n);
        }
        let additional = if fields[7].trim().is_empty() {
            None
        } else {
            let a = parse_number(fields[7], "add", pool_size, line)?;
            if numbers.contains(&a) {
                return Err(Error::parse(
                    line,
                    format!("additional number {a} duplicates a main number"),
                ));
            }
            Some(a)
        };
        games.push(Game { numbers, additional });
        dates.push(date);
    }
    if games.is_empty() {
        return Err(Error::parse(1, "no data rows".to_string()));
    }
    DrawHistory::new(pool_size, 6, games, dates)
}

/// Canonical CSV serialization of a history (inverse of
/// [`parse_draw_csv`] up to line-ending and blank-line normalization).
/// Simulated histories without dates get a running game index instead.
pub fn write_draw_csv(history: &DrawHistory) -> String {
    let mut out = String::from(DRAW_CSV_HEADER);
    out.push('\n');
    for (j, game) in history.games().iter().enumerate() {
        let date = history
            .dates
            .get(j)
            .cloned()
            .unwrap_or_else(|| format!("0001-01-{:02}", (j % 28) + 1));
        out.push_str(&date);
        for n in game.numbers() {
            out.push(',');
            out.push_str(&n.to_string());
        }
        out.push(',');
        if let Some(a) = game.additional() {
            out.push_str(&a.to_string());
        }
        out.push('\n');
    }
    out
}

/// Published summary statistics: a (possibly partial) count map plus a
/// grand total, parsed from rows `m,count` and one `total,n` row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryCounts {
    counts: std::collections::BTreeMap<u32, u64>,
    total: u64,
    pool_size: u32,
}

impl SummaryCounts {
    pub fn count(&self, m: u32) -> Option<u64> {
        self.counts.get(&m).copied()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn pool_size(&self) -> u32 {
        self.pool_size
    }

    /// Full count vector, available only when every number is present and
    /// the entries add up to the stated total.
    pub fn full_count_vector(&self) -> Option<CountVector> {
        if self.counts.len() != self.pool_size as usize {
            return None;
        }
        let counts: Vec<u64> = (1..=self.pool_size).map(|m| self.counts[&m]).collect();
        let cv = CountVector::from_counts(counts);
        (cv.total() == self.total).then_some(cv)
    }
}

/// Parses a `summary.csv` fixture: header `m,count`, one row per known
/// number, and a final `total,n` row.
pub fn parse_summary_csv(text: &str, pool_size: u32) -> Result<SummaryCounts> {
    let mut counts = std::collections::BTreeMap::new();
    let mut total = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() || (line == 1 && row == "m,count") {
            continue;
        }
        let (key, value) = row
            .split_once(',')
            .ok_or_else(|| Error::parse(line, format!("expected two fields, got {row:?}")))?;
        let value: u64 = value
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("count is not an integer: {value:?}")))?;
        if key.trim() == "total" {
            if total.replace(value).is_some() {
                return Err(Error::parse(line, "duplicate total row".to_string()));
            }
        } else {
            let m = parse_number(key, "m", pool_size, line)?;
            if counts.insert(m, value).is_some() {
                return Err(Error::parse(line, format!("duplicate row for m={m}")));
            }
        }
    }
    let total = total.ok_or_else(|| Error::parse(1, "missing total row".to_string()))?;
    let known: u64 = counts.values().sum();
    if known > total {
        return Err(Error::parse(
            1,
            format!("counts sum to {known}, more than total {total}"),
        ));
    }
    Ok(SummaryCounts {
        counts,
        total,
        pool_size,
    })
}
