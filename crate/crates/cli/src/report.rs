//! Statistical reports computed from runs CSV rows alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use mlcc::stats::{
    expected_ar, friedman_mean_ranks, mean, median_index, multi_problem_wilcoxon,
    single_problem_compare, std_dev, Sign, SignSummary, StatsError,
};
use serde::{Deserialize, Serialize};

use crate::experiment::RunResult;
use crate::output::RunRow;

/// Final errors per (algorithm, problem), ordered by seed.
#[derive(Debug, Clone)]
pub struct ErrorTable {
    pub algorithms: Vec<String>,
    pub problems: Vec<String>,
    pub categories: Vec<String>,
    cells: BTreeMap<(usize, usize), Vec<(u64, f64)>>,
}

impl ErrorTable {
    /// Groups rows, keeping first-appearance order of algorithms and problems.
    pub fn from_rows(rows: &[RunRow]) -> Self {
        let mut algorithms: Vec<String> = Vec::new();
        let mut problems: Vec<String> = Vec::new();
        let mut categories = Vec::new();
        let mut cells: BTreeMap<(usize, usize), Vec<(u64, f64)>> = BTreeMap::new();
        for r in rows {
            let a = position_or_push(&mut algorithms, &r.algorithm);
            let before = problems.len();
            let p = position_or_push(&mut problems, &r.problem);
            if problems.len() > before {
                categories.push(r.category.clone());
            }
            cells.entry((a, p)).or_default().push((r.seed, r.final_error));
        }
        for v in cells.values_mut() {
            v.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
        }
        Self {
            algorithms,
            problems,
            categories,
            cells,
        }
    }

    pub fn errors(&self, algorithm: usize, problem: usize) -> Vec<f64> {
        self.cells
            .get(&(algorithm, problem))
            .map(|v| v.iter().map(|c| c.1).collect())
            .unwrap_or_default()
    }

    pub fn algorithm_index(&self, name: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a == name)
    }

    /// Every algorithm must cover every problem with the same seeds, and at
    /// least two runs each.
    pub fn check_coverage(&self) -> Result<()> {
        if self.algorithms.len() < 2 {
            bail!("need at least two algorithms, found {}", self.algorithms.len());
        }
        for p in 0..self.problems.len() {
            let seeds = |a: usize| -> Vec<u64> {
                self.cells
                    .get(&(a, p))
                    .map(|v| v.iter().map(|c| c.0).collect())
                    .unwrap_or_default()
            };
            let reference = seeds(0);
            if reference.len() < 2 {
                bail!(
                    "statistical comparison needs at least 2 runs per problem; {} has {} on {}",
                    self.algorithms[0],
                    reference.len(),
                    self.problems[p]
                );
            }
            for a in 1..self.algorithms.len() {
                if seeds(a) != reference {
                    bail!(
                        "mismatched coverage: {} and {} differ on {} runs",
                        self.algorithms[0],
                        self.algorithms[a],
                        self.problems[p]
                    );
                }
            }
        }
        Ok(())
    }

    pub fn mean_errors(&self, algorithm: usize) -> Vec<f64> {
        (0..self.problems.len())
            .map(|p| mean(&self.errors(algorithm, p)))
            .collect()
    }
}

fn position_or_push(list: &mut Vec<String>, name: &str) -> usize {
    match list.iter().position(|x| x == name) {
        Some(k) => k,
        None => {
            list.push(name.to_string());
            list.len() - 1
        }
    }
}

pub fn rows_of(results: &[RunResult]) -> Vec<RunRow> {
    results.iter().map(RunRow::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionRow {
    pub problem: String,
    pub category: String,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Smallest mean error on this function (ties all marked).
    pub best: Vec<bool>,
    /// Sign of each algorithm against the baseline; `None` for the baseline.
    pub sign: Vec<Option<Sign>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseRow {
    pub algorithm: String,
    pub signs: SignSummary,
    pub r_plus: f64,
    pub r_minus: f64,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub baseline: String,
    pub alpha: f64,
    pub algorithms: Vec<String>,
    pub functions: Vec<FunctionRow>,
    /// Baseline against every other algorithm. In the −/=/+ counts "−"
    /// means the other algorithm is significantly worse; R+ sums the ranks
    /// of functions where the baseline has the smaller mean error.
    pub pairwise: Vec<PairwiseRow>,
    pub friedman: Vec<f64>,
}

/// Compares `baseline` against every other algorithm in `table`.
pub fn compare(table: &ErrorTable, baseline: &str, alpha: f64) -> Result<ComparisonReport> {
    table.check_coverage()?;
    let Some(b) = table.algorithm_index(baseline) else {
        bail!("baseline `{baseline}` not present in the results");
    };
    let k = table.algorithms.len();
    let means: Vec<Vec<f64>> = (0..k).map(|a| table.mean_errors(a)).collect();

    let mut functions = Vec::new();
    for p in 0..table.problems.len() {
        let base_errors = table.errors(b, p);
        let m: Vec<f64> = (0..k).map(|a| means[a][p]).collect();
        let lowest = m.iter().copied().fold(f64::INFINITY, f64::min);
        let sign = (0..k)
            .map(|a| {
                (a != b)
                    .then(|| single_problem_compare(&base_errors, &table.errors(a, p), alpha))
                    .transpose()
            })
            .collect::<Result<Vec<_>, StatsError>>()?;
        functions.push(FunctionRow {
            problem: table.problems[p].clone(),
            category: table.categories[p].clone(),
            std: (0..k).map(|a| std_dev(&table.errors(a, p))).collect(),
            best: m.iter().map(|&v| v == lowest).collect(),
            mean: m,
            sign,
        });
    }

    let mut pairwise = Vec::new();
    for a in (0..k).filter(|&a| a != b) {
        let signs: SignSummary = functions.iter().filter_map(|f| f.sign[a]).collect();
        let (r_plus, r_minus, p_value, significant) =
            match multi_problem_wilcoxon(&means[b], &means[a], alpha) {
                Ok(w) => (w.r_plus, w.r_minus, w.p_value, w.significant),
                Err(StatsError::AllZero) => (0.0, 0.0, 1.0, false),
                Err(e) => return Err(e.into()),
            };
        pairwise.push(PairwiseRow {
            algorithm: table.algorithms[a].clone(),
            signs,
            r_plus,
            r_minus,
            p_value,
            significant,
        });
    }

    let matrix: Vec<Vec<f64>> = (0..table.problems.len())
        .map(|p| (0..k).map(|a| means[a][p]).collect())
        .collect();
    Ok(ComparisonReport {
        baseline: baseline.to_string(),
        alpha,
        algorithms: table.algorithms.clone(),
        functions,
        pairwise,
        friedman: friedman_mean_ranks(&matrix)?,
    })
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut header = vec!["function".to_string()];
        header.extend(self.algorithms.iter().cloned());
        let mut rows = vec![header];
        for f in &self.functions {
            let mut row = vec![f.problem.clone()];
            for a in 0..self.algorithms.len() {
                let mark = match f.sign[a] {
                    Some(s) => s.to_string(),
                    None => String::new(),
                };
                let star = if f.best[a] { "*" } else { "" };
                row.push(format!("{star}{:.3e} ± {:.2e} {mark}", f.mean[a], f.std[a]).trim_end().to_string());
            }
            rows.push(row);
        }
        let mut ranks = vec!["friedman".to_string()];
        ranks.extend(self.friedman.iter().map(|r| format!("{r:.3}")));
        rows.push(ranks);
        out.push_str(&align(&rows));
        let _ = writeln!(out, "\nbaseline {} (alpha = {})", self.baseline, self.alpha);
        let mut pair = vec![["vs", "-/=/+ (P-N)", "R+", "R-", "p", "significant"].map(String::from).to_vec()];
        for p in &self.pairwise {
            pair.push(vec![
                p.algorithm.clone(),
                p.signs.to_string(),
                format!("{}", p.r_plus),
                format!("{}", p.r_minus),
                format!("{:.4}", p.p_value),
                if p.significant { "yes" } else { "no" }.into(),
            ]);
        }
        out.push_str(&align(&pair));
        out
    }

    /// Per-function table in long form.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["problem", "category", "algorithm", "mean", "std", "best", "sign"])?;
        for f in &self.functions {
            for (a, name) in self.algorithms.iter().enumerate() {
                w.write_record([
                    f.problem.clone(),
                    f.category.clone(),
                    name.clone(),
                    f.mean[a].to_string(),
                    f.std[a].to_string(),
                    f.best[a].to_string(),
                    f.sign[a].map(|s| s.to_string()).unwrap_or_default(),
                ])?;
            }
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub variant: String,
    /// (baseline, signs of the variant against it).
    pub versus: Vec<(String, SignSummary)>,
    pub total_p_n: i64,
}

/// P−N of each variant against each baseline.
pub fn ablation(
    table: &ErrorTable,
    variants: &[String],
    baselines: &[String],
    alpha: f64,
) -> Result<Vec<AblationRow>> {
    variants
        .iter()
        .map(|v| {
            let report = compare(table, v, alpha)?;
            let versus: Vec<(String, SignSummary)> = baselines
                .iter()
                .map(|b| {
                    report
                        .pairwise
                        .iter()
                        .find(|p| &p.algorithm == b)
                        .map(|p| (b.clone(), p.signs))
                        .ok_or_else(|| anyhow::anyhow!("baseline `{b}` not present"))
                })
                .collect::<Result<_>>()?;
            Ok(AblationRow {
                variant: v.clone(),
                total_p_n: versus.iter().map(|(_, s)| s.p_n).sum(),
                versus,
            })
        })
        .collect()
}

pub fn ablation_text(rows: &[AblationRow]) -> String {
    let mut table = vec![vec!["variant".to_string()]];
    if let Some(first) = rows.first() {
        table[0].extend(first.versus.iter().map(|(b, _)| format!("vs {b}")));
    }
    table[0].push("total P-N".into());
    for r in rows {
        let mut line = vec![r.variant.clone()];
        line.extend(r.versus.iter().map(|(_, s)| s.to_string()));
        line.push(r.total_p_n.to_string());
        table.push(line);
    }
    align(&table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArEntry {
    pub problem: String,
    pub category: String,
    pub algorithm: String,
    /// Seed of the median-final-error run.
    pub seed: u64,
    pub final_error: f64,
    /// Mean archived rank; `None` when the run never improved its best.
    pub ar: Option<f64>,
    pub events: usize,
    /// Events produced by the best and the worst fifth of the ranks.
    pub top_mass: u64,
    pub bottom_mass: u64,
    pub frequency: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArReport {
    pub np: usize,
    pub ar_expected: f64,
    pub entries: Vec<ArEntry>,
}

/// Rank-archive summary of the median run per (problem, algorithm).
pub fn ar_report(results: &[RunResult], np: usize) -> ArReport {
    let mut groups: Vec<((String, String), Vec<&RunResult>)> = Vec::new();
    for r in results {
        let key = (r.problem.clone(), r.algorithm.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    let fifth = ((np as f64 * 0.2).round() as usize).max(1);
    let entries = groups
        .into_iter()
        .map(|((problem, algorithm), runs)| {
            let errors: Vec<f64> = runs.iter().map(|r| r.record.final_error).collect();
            let med = runs[median_index(&errors).expect("non-empty group")];
            let archive = &med.record.rank_archive;
            ArEntry {
                problem,
                category: med.category.clone(),
                algorithm,
                seed: med.record.seed,
                final_error: med.record.final_error,
                ar: archive.ar().ok(),
                events: archive.len(),
                top_mass: archive.mass(1, fifth),
                bottom_mass: archive.mass(np + 1 - fifth, np),
                frequency: archive.frequency.clone(),
            }
        })
        .collect();
    ArReport {
        np,
        ar_expected: expected_ar(np),
        entries,
    }
}

impl ArReport {
    pub fn header(&self) -> String {
        format!("# mlcc-ar v1 np={} ar_exp={}", self.np, self.ar_expected)
    }

    pub fn ar_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "problem", "category", "algorithm", "seed", "final_error", "ar", "ar_exp", "events",
            "top_mass", "bottom_mass",
        ])?;
        for e in &self.entries {
            w.write_record([
                e.problem.clone(),
                e.category.clone(),
                e.algorithm.clone(),
                e.seed.to_string(),
                e.final_error.to_string(),
                e.ar.map(|v| v.to_string()).unwrap_or_default(),
                self.ar_expected.to_string(),
                e.events.to_string(),
                e.top_mass.to_string(),
                e.bottom_mass.to_string(),
            ])?;
        }
        Ok(format!("{}\n{}", self.header(), String::from_utf8(w.into_inner()?)?))
    }

    pub fn histogram_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["problem", "algorithm", "rank", "frequency"])?;
        for e in &self.entries {
            for (k, f) in e.frequency.iter().enumerate() {
                w.write_record([
                    e.problem.clone(),
                    e.algorithm.clone(),
                    (k + 1).to_string(),
                    f.to_string(),
                ])?;
            }
        }
        Ok(format!("{}\n{}", self.header(), String::from_utf8(w.into_inner()?)?))
    }

    pub fn to_text(&self) -> String {
        let mut rows = vec![["problem", "algorithm", "AR", "events", "top 20%", "bottom 20%"]
            .map(String::from)
            .to_vec()];
        for e in &self.entries {
            rows.push(vec![
                e.problem.clone(),
                e.algorithm.clone(),
                e.ar.map_or("-".into(), |v| format!("{v:.2}")),
                e.events.to_string(),
                e.top_mass.to_string(),
                e.bottom_mass.to_string(),
            ]);
        }
        format!("AR^exp = {} (NP = {})\n{}", self.ar_expected, self.np, align(&rows))
    }
}
