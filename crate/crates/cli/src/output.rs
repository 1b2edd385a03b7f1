//! Result files: the versioned runs CSV, per-run JSON traces and atomic
//! writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::algorithms::slug;
use crate::experiment::RunResult;

pub const RUNS_HEADER: &str = "# mlcc-runs v1";

/// One line of the runs CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub algorithm: String,
    pub problem: String,
    pub category: String,
    pub run: usize,
    pub seed: u64,
    pub final_error: f64,
    pub evaluations: u64,
    pub generations: usize,
}

impl From<&RunResult> for RunRow {
    fn from(r: &RunResult) -> Self {
        Self {
            algorithm: r.algorithm.clone(),
            problem: r.problem.clone(),
            category: r.category.clone(),
            run: r.run,
            seed: r.record.seed,
            final_error: r.record.final_error,
            evaluations: r.record.evaluations,
            generations: r.record.generations,
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn runs_csv(rows: &[RunRow]) -> Result<Vec<u8>> {
    let mut buf = format!("{RUNS_HEADER}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

pub fn parse_runs_csv(text: &str) -> Result<Vec<RunRow>> {
    let first = text.lines().next().unwrap_or_default();
    if first.trim() != RUNS_HEADER {
        bail!("missing `{RUNS_HEADER}` header line");
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .enumerate()
        .map(|(k, row)| row.with_context(|| format!("data row {}", k + 1)))
        .collect()
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRow>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_runs_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn trace_path(dir: &Path, r: &RunResult) -> PathBuf {
    dir.join("traces")
        .join(slug(&r.algorithm))
        .join(&r.problem)
        .join(format!("run-{:03}-seed-{}.json", r.run, r.record.seed))
}

/// `runs.csv` plus one trace per run under `dir`. Returns the CSV path.
pub fn write_results(dir: &Path, results: &[RunResult]) -> Result<PathBuf> {
    for r in results {
        let mut json = serde_json::to_vec_pretty(&r.record)?;
        json.push(b'\n');
        write_atomic(&trace_path(dir, r), &json)?;
    }
    let rows: Vec<RunRow> = results.iter().map(RunRow::from).collect();
    let path = dir.join("runs.csv");
    write_atomic(&path, &runs_csv(&rows)?)?;
    Ok(path)
}
