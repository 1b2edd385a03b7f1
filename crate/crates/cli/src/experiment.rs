//! Runs an (algorithm × problem × run) matrix on a worker pool.

use anyhow::{bail, Context, Result};
use mlcc::bench::{make_suite, BenchProblem};
use mlcc::problem::Problem;
use mlcc::{run, RunRecord, RunSettings};
use rayon::prelude::*;

use crate::algorithms::NamedAlgorithm;
use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub algorithm: String,
    pub problem: String,
    pub category: String,
    pub run: usize,
    pub record: RunRecord,
}

/// The configured subset of the suite, in suite order.
pub fn select_problems(cfg: &ExperimentConfig) -> Result<Vec<BenchProblem>> {
    let suite = make_suite(cfg.suite.dimension, cfg.suite.seed)?;
    if cfg.suite.problems.is_empty() {
        return Ok(suite);
    }
    for id in &cfg.suite.problems {
        if !suite.iter().any(|p| p.id() == id) {
            bail!("unknown problem `{id}`");
        }
    }
    Ok(suite
        .into_iter()
        .filter(|p| cfg.suite.problems.iter().any(|id| id == p.id()))
        .collect())
}

pub fn settings(cfg: &ExperimentConfig, run_index: usize) -> RunSettings {
    let mut s = RunSettings::new(
        cfg.population(),
        cfg.max_evaluations(),
        cfg.run.base_seed + run_index as u64,
    );
    s.share_interval = cfg.run.share_interval;
    s
}

/// Every run of every algorithm on every selected problem. Results come back
/// in (algorithm, problem, run) order whatever the worker count.
pub fn run_matrix(
    cfg: &ExperimentConfig,
    algorithms: &[NamedAlgorithm],
    workers: usize,
) -> Result<Vec<RunResult>> {
    for (k, a) in algorithms.iter().enumerate() {
        if algorithms[..k].iter().any(|b| b.name == a.name) {
            bail!("algorithm `{}` listed twice", a.name);
        }
    }
    let problems = select_problems(cfg)?;
    let jobs: Vec<(usize, usize, usize)> = (0..algorithms.len())
        .flat_map(|a| {
            (0..problems.len()).flat_map(move |p| (0..cfg.run.runs).map(move |r| (a, p, r)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("building worker pool")?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(a, p, r)| {
                let named = &algorithms[a];
                let problem = &problems[p];
                let record = run(&named.algorithm, problem, &settings(cfg, r))
                    .with_context(|| format!("{} on {}", named.name, problem.id()))?;
                Ok(RunResult {
                    algorithm: named.name.clone(),
                    problem: problem.id().to_string(),
                    category: problem.category().to_string(),
                    run: r,
                    record,
                })
            })
            .collect()
    })
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
