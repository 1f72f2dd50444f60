//! Runs a configuration matrix over a directory of `.wcsp` files.

use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use wcsp_ihs::instance::parse_wcsp;
use wcsp_ihs::{solve, SolverConfig, WcspInstance};

use crate::row::BenchRow;

/// `.wcsp` files directly inside `dir`, sorted by name.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        bail!("instance directory {} does not exist", dir.display());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "wcsp"))
        .collect();
    files.sort();
    Ok(files)
}

fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load(path: &Path) -> Option<WcspInstance> {
    let text = fs::read_to_string(path).ok()?;
    parse_wcsp(&text).ok()
}

fn run_one(id: &str, w: Option<&WcspInstance>, cfg: &SolverConfig) -> BenchRow {
    let Some(w) = w else {
        return BenchRow::error(id, cfg);
    };
    match catch_unwind(AssertUnwindSafe(|| solve(w, cfg))) {
        Ok(Ok(report)) => BenchRow::from_report(id, cfg, &report),
        _ => BenchRow::error(id, cfg),
    }
}

/// Runs every configuration on every instance with `jobs` worker threads
/// (0: one per core). Rows come back in (instance, configuration) order no
/// matter how the work was scheduled. Unreadable instances and failed runs
/// give `error` rows.
pub fn run_matrix(files: &[PathBuf], configs: &[SolverConfig], jobs: usize) -> Result<Vec<BenchRow>> {
    let instances: Vec<(String, Arc<Option<WcspInstance>>)> =
        files.iter().map(|p| (instance_id(p), Arc::new(load(p)))).collect();
    let tasks: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..configs.len()).map(move |c| (i, c)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let rows = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, c)| {
                let (id, w) = &instances[i];
                run_one(id, w.as_ref().as_ref(), &configs[c])
            })
            .collect()
    });
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(crate::row::HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
