//! Ratio tables from bench CSV files.
//!
//! For every benchmark (instance ids grouped by [`benchmark_of`]) and every
//! configuration the mean solving time, or the mean final core set size, is
//! divided by the best mean of that benchmark. The unsolved run count is
//! shown in parentheses.

use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use thiserror::Error;

use crate::row::{benchmark_of, BenchRow, HEADER};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("CSV header does not match the bench schema: expected `{expected}`, found `{found}`")]
    Schema { expected: String, found: String },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    TimeRatio,
    CoreRatio,
    Speedup,
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "time-ratio" => Ok(Kind::TimeRatio),
            "core-ratio" => Ok(Kind::CoreRatio),
            "speedup" => Ok(Kind::Speedup),
            _ => Err(format!("unknown table kind `{s}`")),
        }
    }
}

/// How runs that did not finish enter time means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeoutMode {
    /// Counted at the run's time limit.
    #[default]
    Clamp,
    /// Left out of the mean.
    Exclude,
}

impl FromStr for TimeoutMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "clamp" => Ok(TimeoutMode::Clamp),
            "exclude" => Ok(TimeoutMode::Exclude),
            _ => Err(format!("unknown timeout mode `{s}`")),
        }
    }
}

pub fn read_rows(input: impl Read) -> Result<Vec<BenchRow>, TableError> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != HEADER {
        return Err(TableError::Schema {
            expected: HEADER.join(","),
            found: found.join(","),
        });
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Configuration key: hv, core, merge, disjoint.
pub type ConfigKey = (String, String, String, String);

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub config: ConfigKey,
    pub mean: Option<f64>,
    pub ratio: Option<f64>,
    pub runs: usize,
    pub unsolved: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub benchmark: String,
    pub instances: usize,
    pub cells: Vec<Cell>,
}

fn value(row: &BenchRow, kind: Kind, mode: TimeoutMode) -> Option<f64> {
    match kind {
        Kind::CoreRatio => row.solved().then_some(row.core_set_size as f64),
        _ if row.solved() => Some(row.total_time_ms),
        _ => match mode {
            TimeoutMode::Clamp => row.time_limit_ms.map(|l| l as f64),
            TimeoutMode::Exclude => None,
        },
    }
}

/// Groups rows by benchmark, keeping first-appearance order of benchmarks
/// and configurations.
fn grouped(rows: &[BenchRow]) -> Vec<(String, Vec<(ConfigKey, Vec<&BenchRow>)>)> {
    let mut out: Vec<(String, Vec<(ConfigKey, Vec<&BenchRow>)>)> = Vec::new();
    for r in rows {
        let b = benchmark_of(&r.instance);
        let pos = match out.iter().position(|(name, _)| name == b) {
            Some(p) => p,
            None => {
                out.push((b.to_string(), Vec::new()));
                out.len() - 1
            }
        };
        let configs = &mut out[pos].1;
        let key = r.config_key();
        match configs.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => configs.push((key, vec![r])),
        }
    }
    out
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn ratio(mean: f64, best: f64) -> f64 {
    if best > 0.0 {
        mean / best
    } else if mean == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Ratio blocks for `time-ratio` or `core-ratio`.
pub fn ratio_blocks(rows: &[BenchRow], kind: Kind, mode: TimeoutMode) -> Vec<Block> {
    grouped(rows)
        .into_iter()
        .map(|(benchmark, configs)| {
            let mut instances: Vec<&str> = configs
                .iter()
                .flat_map(|(_, v)| v.iter().map(|r| r.instance.as_str()))
                .collect();
            instances.sort_unstable();
            instances.dedup();
            let mut cells: Vec<Cell> = configs
                .into_iter()
                .map(|(config, runs)| Cell {
                    mean: mean(runs.iter().filter_map(|r| value(r, kind, mode))),
                    ratio: None,
                    runs: runs.len(),
                    unsolved: runs.iter().filter(|r| !r.solved()).count(),
                    config,
                })
                .collect();
            let best = cells.iter().filter_map(|c| c.mean).min_by(f64::total_cmp);
            if let Some(best) = best {
                for c in &mut cells {
                    c.ratio = c.mean.map(|m| ratio(m, best));
                }
            }
            Block {
                benchmark,
                instances: instances.len(),
                cells,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Speedup {
    pub benchmark: String,
    /// Best mean time with merging off and on.
    pub best_off: Option<f64>,
    pub best_on: Option<f64>,
    /// `best_off / best_on`; above 1 means merging helped.
    pub ratio: Option<f64>,
}

pub fn speedups(rows: &[BenchRow], mode: TimeoutMode) -> Vec<Speedup> {
    ratio_blocks(rows, Kind::TimeRatio, mode)
        .into_iter()
        .map(|b| {
            let best = |m: &str| {
                b.cells
                    .iter()
                    .filter(|c| c.config.2 == m)
                    .filter_map(|c| c.mean)
                    .min_by(f64::total_cmp)
            };
            let (best_off, best_on) = (best("off"), best("on"));
            let ratio = match (best_off, best_on) {
                (Some(off), Some(on)) => Some(ratio(off, on)),
                _ => None,
            };
            Speedup {
                benchmark: b.benchmark,
                best_off,
                best_on,
                ratio,
            }
        })
        .collect()
}

fn mode_note(mode: TimeoutMode) -> &'static str {
    match mode {
        TimeoutMode::Clamp => "unsolved runs counted at the time limit",
        TimeoutMode::Exclude => "unsolved runs left out of the means",
    }
}

fn fmt_ratio(r: Option<f64>) -> String {
    match r {
        Some(r) if r.is_finite() => format!("{r:.2}"),
        Some(_) => "inf".into(),
        None => "-".into(),
    }
}

/// Markdown rendering: one block per benchmark, rows are core strategy and
/// merge/disjoint settings, columns are hitting-vector strategies.
pub fn render_blocks(blocks: &[Block], kind: Kind, mode: TimeoutMode) -> String {
    let mut s = String::new();
    let what = match kind {
        Kind::CoreRatio => "mean final core set size over solved runs",
        _ => "mean total_time_ms",
    };
    let _ = writeln!(s, "# {what}, divided by the best configuration of each benchmark");
    if kind == Kind::TimeRatio {
        let _ = writeln!(s, "# {}", mode_note(mode));
    }
    let _ = writeln!(s, "# (k): number of unsolved runs");
    for b in blocks {
        let mut cols: Vec<&str> = Vec::new();
        let mut lines: Vec<(&str, &str, &str)> = Vec::new();
        for c in &b.cells {
            if !cols.contains(&c.config.0.as_str()) {
                cols.push(&c.config.0);
            }
            let line = (c.config.1.as_str(), c.config.2.as_str(), c.config.3.as_str());
            if !lines.contains(&line) {
                lines.push(line);
            }
        }
        let _ = writeln!(s, "\n## {} ({} instances)\n", b.benchmark, b.instances);
        let _ = writeln!(s, "| core | merge | disjoint | {} |", cols.join(" | "));
        let _ = writeln!(s, "|---|---|---|{}", "---|".repeat(cols.len()));
        for (core, merge, disjoint) in lines {
            let cells: Vec<String> = cols
                .iter()
                .map(|hv| {
                    match b.cells.iter().find(|c| {
                        c.config.0 == *hv && c.config.1 == core && c.config.2 == merge && c.config.3 == disjoint
                    }) {
                        None => String::new(),
                        Some(c) if c.unsolved > 0 => format!("{} ({})", fmt_ratio(c.ratio), c.unsolved),
                        Some(c) => fmt_ratio(c.ratio),
                    }
                })
                .collect();
            let _ = writeln!(s, "| {core} | {merge} | {disjoint} | {} |", cells.join(" | "));
        }
    }
    s
}

pub fn render_speedups(rows: &[Speedup], mode: TimeoutMode) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# best mean time with merging off divided by best mean time with merging on"
    );
    let _ = writeln!(s, "# {}", mode_note(mode));
    let _ = writeln!(s, "\n| benchmark | best off (ms) | best on (ms) | speedup |");
    let _ = writeln!(s, "|---|---|---|---|");
    let ms = |x: Option<f64>| x.map_or("-".to_string(), |x| format!("{x:.3}"));
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} |",
            r.benchmark,
            ms(r.best_off),
            ms(r.best_on),
            fmt_ratio(r.ratio)
        );
    }
    s
}

/// Reads a bench CSV and renders the requested table.
pub fn render(input: impl Read, kind: Kind, mode: TimeoutMode) -> Result<String, TableError> {
    let rows = read_rows(input)?;
    Ok(match kind {
        Kind::Speedup => render_speedups(&speedups(&rows, mode), mode),
        _ => render_blocks(&ratio_blocks(&rows, kind, mode), kind, mode),
    })
}
