//! Subcommand bodies. Each writes its files under the output directory and
//! returns what should go to stdout.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use mlcc::bench::SuiteManifest;
use serde::Serialize;

use crate::algorithms::sweep_setting;
use crate::config::ExperimentConfig;
use crate::experiment::{run_matrix, select_problems, RunResult};
use crate::output::{read_runs_csv, runs_csv, write_atomic, write_results, RunRow};
use crate::report::{ablation, ablation_text, ar_report, compare, rows_of, ErrorTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Clone)]
pub struct Context {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub workers: usize,
    pub format: Format,
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

pub fn suite(ctx: &Context) -> Result<String> {
    let cfg = &ctx.config;
    let problems = select_problems(cfg)?;
    let manifest = SuiteManifest::new(cfg.suite.dimension, cfg.suite.seed, &problems);
    let body = json(&manifest)?;
    write_text(&ctx.out.join("suite.json"), &body)?;
    Ok(match ctx.format {
        Format::Json => body,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "name", "category", "bias", "fingerprint"])?;
            for p in &manifest.problems {
                w.write_record([&p.id, &p.name, &p.category.to_string(), &p.bias.to_string(), &p.fingerprint])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Text => {
            let mut s = format!("D = {}, seed = {}\n", manifest.dimension, manifest.seed);
            for p in &manifest.problems {
                s += &format!("{:<4} {:<12} bias {:>6}  {}\n", p.id, p.category.to_string(), p.bias, p.name);
            }
            s
        }
    })
}

fn run_and_store(ctx: &Context, names: &[String], dir: &Path) -> Result<Vec<RunResult>> {
    let algorithms = ctx.config.algorithms(names)?;
    let results = run_matrix(&ctx.config, &algorithms, ctx.workers)?;
    write_results(dir, &results)?;
    Ok(results)
}

pub fn run(ctx: &Context, names: &[String]) -> Result<String> {
    let names = if names.is_empty() { ctx.config.run.algorithms.clone() } else { names.to_vec() };
    let results = run_and_store(ctx, &names, &ctx.out)?;
    let rows = rows_of(&results);
    Ok(match ctx.format {
        Format::Csv => String::from_utf8(runs_csv(&rows)?)?,
        Format::Json => json(&rows)?,
        Format::Text => summary_text(&rows),
    })
}

fn summary_text(rows: &[RunRow]) -> String {
    let table = ErrorTable::from_rows(rows);
    let mut s = String::new();
    for (a, alg) in table.algorithms.iter().enumerate() {
        for (p, prob) in table.problems.iter().enumerate() {
            let e = table.errors(a, p);
            s += &format!("{alg:<20} {prob:<4} runs {:>3}  mean error {:.4e}\n", e.len(), mlcc::stats::mean(&e));
        }
    }
    s
}

fn emit_comparison(ctx: &Context, dir: &Path, name: &str, report: &crate::report::ComparisonReport) -> Result<String> {
    let text = report.to_text();
    let body = json(report)?;
    let csv = report.to_csv()?;
    write_text(&dir.join(format!("{name}.json")), &body)?;
    write_text(&dir.join(format!("{name}.txt")), &text)?;
    write_text(&dir.join(format!("{name}.csv")), &csv)?;
    Ok(match ctx.format {
        Format::Json => body,
        Format::Text => text,
        Format::Csv => csv,
    })
}

pub fn compare_files(ctx: &Context, inputs: &[PathBuf], baseline: Option<&str>) -> Result<String> {
    if inputs.is_empty() {
        bail!("compare needs at least one runs CSV");
    }
    let mut rows = Vec::new();
    for path in inputs {
        rows.extend(read_runs_csv(path)?);
    }
    let table = ErrorTable::from_rows(&rows);
    let baseline = baseline.map(str::to_string).or_else(|| table.algorithms.first().cloned());
    let report = compare(&table, baseline.as_deref().unwrap_or_default(), ctx.config.stats.alpha)?;
    emit_comparison(ctx, &ctx.out, "compare", &report)
}

pub fn motivate(ctx: &Context) -> Result<String> {
    let dir = ctx.out.join("motivate");
    let results = run_and_store(ctx, &ctx.config.motivate.algorithms, &dir)?;
    let report = ar_report(&results, ctx.config.population());
    let ar = report.ar_csv()?;
    write_text(&dir.join("ar.csv"), &ar)?;
    write_text(&dir.join("histogram.csv"), &report.histogram_csv()?)?;
    let body = json(&report)?;
    write_text(&dir.join("ar.json"), &body)?;
    let text = report.to_text();
    write_text(&dir.join("ar.txt"), &text)?;
    Ok(match ctx.format {
        Format::Json => body,
        Format::Text => text,
        Format::Csv => ar,
    })
}

pub fn sweep_n(ctx: &Context, settings: &[String]) -> Result<String> {
    ctx.config.require_statistics()?;
    let settings = if settings.is_empty() { ctx.config.sweep.settings.clone() } else { settings.to_vec() };
    if settings.len() < 2 {
        bail!("sweep-n needs a baseline and at least one other setting");
    }
    let algorithms = settings
        .iter()
        .map(|s| sweep_setting(s, &ctx.config).with_context(|| format!("setting `{s}`")))
        .collect::<Result<Vec<_>>>()?;
    let dir = ctx.out.join("sweep-n");
    let results = run_matrix(&ctx.config, &algorithms, ctx.workers)?;
    write_results(&dir, &results)?;
    let table = ErrorTable::from_rows(&rows_of(&results));
    let report = compare(&table, &algorithms[0].name, ctx.config.stats.alpha)?;
    emit_comparison(ctx, &dir, "sweep", &report)
}

pub fn ablate(ctx: &Context) -> Result<String> {
    ctx.config.require_statistics()?;
    let cfg = &ctx.config;
    let names: Vec<String> = cfg.ablate.variants.iter().chain(&cfg.ablate.baselines).cloned().collect();
    let dir = ctx.out.join("ablate");
    let results = run_and_store(ctx, &names, &dir)?;
    let table = ErrorTable::from_rows(&rows_of(&results));
    let rows = ablation(&table, &cfg.ablate.variants, &cfg.ablate.baselines, cfg.stats.alpha)?;
    let text = ablation_text(&rows);
    let body = json(&rows)?;
    write_text(&dir.join("ablation.json"), &body)?;
    write_text(&dir.join("ablation.txt"), &text)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["variant", "baseline", "minus", "equal", "plus", "p_n"])?;
    for r in &rows {
        for (b, s) in &r.versus {
            w.write_record([&r.variant, b, &s.minus.to_string(), &s.equal.to_string(), &s.plus.to_string(), &s.p_n.to_string()])?;
        }
    }
    let csv = String::from_utf8(w.into_inner()?)?;
    write_text(&dir.join("ablation.csv"), &csv)?;
    Ok(match ctx.format {
        Format::Json => body,
        Format::Text => text,
        Format::Csv => csv,
    })
}
