//! One CSV row per (instance, configuration) run.

use serde::{Deserialize, Serialize};
use wcsp_ihs::{RunReport, SolverConfig};

use crate::on_off;

/// Column names, in CSV order.
pub const HEADER: [&str; 17] = [
    "instance",
    "hv",
    "core",
    "merge",
    "disjoint",
    "status",
    "optimum",
    "lb",
    "ub",
    "iterations",
    "core_set_size",
    "hv_time_ms",
    "sat_time_ms",
    "improve_time_ms",
    "total_time_ms",
    "seed",
    "time_limit_ms",
];

/// Columns that hold wall-clock measurements.
pub const TIMING_COLUMNS: [&str; 4] = ["hv_time_ms", "sat_time_ms", "improve_time_ms", "total_time_ms"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub hv: String,
    pub core: String,
    pub merge: String,
    pub disjoint: String,
    /// `optimal`, `timeout`, `infeasible` or `error`.
    pub status: String,
    pub optimum: Option<u64>,
    pub lb: Option<u64>,
    pub ub: Option<u64>,
    pub iterations: u64,
    pub core_set_size: u64,
    pub hv_time_ms: f64,
    pub sat_time_ms: f64,
    pub improve_time_ms: f64,
    pub total_time_ms: f64,
    pub seed: u64,
    pub time_limit_ms: Option<u64>,
}

fn ms(d: std::time::Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

impl BenchRow {
    fn blank(instance: &str, cfg: &SolverConfig, status: &str) -> Self {
        BenchRow {
            instance: instance.to_string(),
            hv: cfg.hv.to_string(),
            core: cfg.core.to_string(),
            merge: on_off(cfg.merge).into(),
            disjoint: on_off(cfg.disjoint_cores).into(),
            status: status.into(),
            optimum: None,
            lb: None,
            ub: None,
            iterations: 0,
            core_set_size: 0,
            hv_time_ms: 0.0,
            sat_time_ms: 0.0,
            improve_time_ms: 0.0,
            total_time_ms: 0.0,
            seed: cfg.seed,
            time_limit_ms: cfg.time_limit.map(|d| d.as_millis() as u64),
        }
    }

    pub fn from_report(instance: &str, cfg: &SolverConfig, r: &RunReport) -> Self {
        BenchRow {
            optimum: r.optimum,
            lb: Some(r.final_lb),
            ub: r.final_ub,
            iterations: r.iterations,
            core_set_size: r.core_set_size as u64,
            hv_time_ms: ms(r.times.hitting),
            sat_time_ms: ms(r.times.sat),
            improve_time_ms: ms(r.times.improve),
            total_time_ms: ms(r.times.total),
            ..BenchRow::blank(instance, cfg, &r.status.to_string())
        }
    }

    pub fn error(instance: &str, cfg: &SolverConfig) -> Self {
        BenchRow::blank(instance, cfg, "error")
    }

    /// Configuration label used as a table row/column key.
    pub fn config_key(&self) -> (String, String, String, String) {
        (
            self.hv.clone(),
            self.core.clone(),
            self.merge.clone(),
            self.disjoint.clone(),
        )
    }

    pub fn solved(&self) -> bool {
        self.status == "optimal" || self.status == "infeasible"
    }
}

/// Benchmark family of an instance id: the id without a trailing `_<digits>`.
pub fn benchmark_of(instance: &str) -> &str {
    match instance.rsplit_once('_') {
        Some((head, tail)) if !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()) => head,
        _ => instance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_names() {
        assert_eq!(benchmark_of("uniform_12"), "uniform");
        assert_eq!(benchmark_of("scale_free_3"), "scale_free");
        assert_eq!(benchmark_of("celar"), "celar");
        assert_eq!(benchmark_of("x_"), "x_");
        assert_eq!(benchmark_of("a_b1"), "a_b1");
    }

    #[test]
    fn header_matches_fields() {
        let row = BenchRow::error("x_1", &SolverConfig::default());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(&row).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), HEADER.join(","));
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "x_1,lb,maximal,off,off,error,,,,0,0,0.0,0.0,0.0,0.0,0,"
        );
    }
}
