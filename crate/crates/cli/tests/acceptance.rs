//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//! Exits nonzero on a failure only when `MLCC_ACCEPTANCE_STRICT` is set.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mlcc::bench::{make_suite, random_rotation, Category};
use mlcc::de_ops::{
    crossover_binomial, current_to_pbest_mutant, mutate_classic, mutate_current_to_pbest,
    sample_distinct, select_survivor, Archive, MutationStrategy,
};
use mlcc::framework::{ipls_update, PreferenceEvent, PreferenceTable};
use mlcc::layers::{Layer, ShadeLayer};
use mlcc::problem::Problem;
use mlcc::rng::RandomSource;
use mlcc::stats::{friedman_mean_ranks, wilcoxon_signed_rank, PValueMethod};
use mlcc::{run, Error, Genome, Individual, Population};
use mlcc_cli::experiment::{default_workers, run_matrix, RunResult};
use mlcc_cli::report::{ablation, ar_report, compare, rows_of, ErrorTable};
use mlcc_cli::ExperimentConfig;

/// Failed checks of one criterion plus a one-line summary.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    summary: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    fn within(&mut self, elapsed: Duration, limit: Duration) {
        self.note(format!("{:.1}s of {}s", elapsed.as_secs_f64(), limit.as_secs()));
        self.check(elapsed < limit, format!("took {:.1}s", elapsed.as_secs_f64()));
    }
}

fn population(points: &[&[f64]]) -> Population {
    Population::new(
        points
            .iter()
            .enumerate()
            .map(|(k, p)| Individual::new(Genome::new(p.to_vec()), k as f64))
            .collect(),
    )
}

fn operators(c: &mut Checks) {
    let start = Instant::now();
    let mut rng = RandomSource::new(1);

    let mut s = sample_distinct(3, &[0], 4, &mut rng).unwrap();
    s.sort();
    c.check(s == vec![1, 2, 3], "sample_distinct forced set");
    c.check(sample_distinct(1, &[], 1, &mut rng).unwrap() == vec![0], "sample_distinct NP=1");
    c.check(
        matches!(sample_distinct(5, &[0], 5, &mut rng), Err(Error::InsufficientPopulation { .. })),
        "sample_distinct insufficient",
    );

    let pop = population(&[&[9.0, 9.0], &[1.0, 2.0], &[3.0, 4.0], &[1.0, 1.0]]);
    for _ in 0..50 {
        let m = mutate_classic(MutationStrategy::Rand1, 0, &pop, 0, 0.0, &mut rng).unwrap();
        c.check(&m.genome[..] == pop.genome(m.donors[0]).as_ref() as &[f64], "rand/1 with F=0");
    }
    let m = mlcc::de_ops::classic_mutant(
        MutationStrategy::Rand1,
        &[0.0, 0.0],
        &[0.0, 0.0],
        &[&[1.0, 2.0], &[3.0, 4.0], &[1.0, 1.0]],
        0.5,
    );
    c.check(&m[..] == [2.0, 3.5], "rand/1 arithmetic");
    let same = population(&[&[2.0, 2.0], &[5.0, 5.0], &[5.0, 5.0], &[5.0, 5.0]]);
    let m = mutate_classic(MutationStrategy::CurrentToBest1, 0, &same, 0, 0.8, &mut rng).unwrap();
    c.check(&m.genome[..] == [2.0, 2.0], "current-to-best/1 degenerate");

    let ranking = [0, 1, 2, 3];
    let m = mutate_current_to_pbest(0, &same, &ranking, &Archive::new(4), 0.7, 0.25, &mut rng).unwrap();
    c.check(&m.genome[..] == [2.0, 2.0], "current-to-pbest/1 degenerate");
    let v = current_to_pbest_mutant(&[0.0, 0.0], &[2.0, 2.0], &[1.0, 0.0], &[0.0, 1.0], 0.5);
    c.check(&v[..] == [1.5, 0.5], "current-to-pbest/1 arithmetic");
    let mut support = [0usize; 4];
    for _ in 0..20_000 {
        let m = mutate_current_to_pbest(0, &pop, &ranking, &Archive::new(4), 0.5, 0.25, &mut rng).unwrap();
        let (r1, r2) = (m.donors[1], m.donors[2]);
        c.check(r2 < 4 && r2 != 0 && r2 != r1, "r2 support with empty archive");
        support[r2] += 1;
    }
    c.check(support[1] > 0 && support[2] > 0 && support[3] > 0, "r2 reaches every candidate");

    let t = [0.0; 5];
    let mu = [1.0; 5];
    c.check(crossover_binomial(&t, &mu, 1.0, &mut rng)[..] == mu, "crossover CR=1");
    for _ in 0..100 {
        let u = crossover_binomial(&t, &mu, 0.0, &mut rng);
        c.check(u.iter().filter(|&&x| x == 1.0).count() == 1, "crossover CR=0");
        c.check(crossover_binomial(&[0.0], &[1.0], 0.0, &mut rng)[..] == [1.0], "crossover D=1");
    }

    let ind = |f: f64| Individual::new(Genome::new(vec![f]), f);
    c.check(select_survivor(ind(2.0), ind(1.0)) == (ind(1.0), true), "selection better");
    let (s, ok) = select_survivor(Individual::new(Genome::new(vec![0.0]), 2.0), ind(2.0));
    c.check(ok && s.genome[0] == 2.0, "selection tie keeps trial");
    c.check(select_survivor(ind(2.0), ind(3.0)) == (ind(2.0), false), "selection worse");

    let d = 10;
    let draws = 100_000;
    let cr = 0.5;
    let mut counts = vec![0u64; d];
    for _ in 0..draws {
        let u = crossover_binomial(&vec![0.0; d], &vec![1.0; d], cr, &mut rng);
        for (k, v) in u.iter().enumerate() {
            counts[k] += *v as u64;
        }
    }
    let p = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * cr;
    let e = draws as f64 * p;
    let chi2: f64 = counts
        .iter()
        .map(|&o| (o as f64 - e).powi(2) * (1.0 / e + 1.0 / (draws as f64 - e)))
        .sum();
    let limit = d as f64 + 3.0 * (2.0 * d as f64).sqrt();
    c.note(format!("chi2 {chi2:.2} < {limit:.2}"));
    c.check(chi2 < limit, format!("chi-square {chi2}"));
    c.within(start.elapsed(), Duration::from_secs(10));
}

fn desk_config(runs: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.run.runs = runs;
    cfg
}

fn matrix(cfg: &ExperimentConfig, names: &[&str]) -> Vec<RunResult> {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    run_matrix(cfg, &cfg.algorithms(&names).unwrap(), default_workers()).unwrap()
}

struct Motivation {
    results: Vec<RunResult>,
    elapsed: Duration,
}

fn motivation() -> Motivation {
    let cfg = desk_config(11);
    let start = Instant::now();
    let results = matrix(&cfg, &["de/rand/1", "de/best/1"]);
    Motivation {
        results,
        elapsed: start.elapsed(),
    }
}

fn rank_replication(c: &mut Checks, m: &Motivation) {
    let report = ar_report(&m.results, 50);
    c.check(report.ar_expected == 25.5, "AR^exp");
    for alg in ["de/rand/1", "de/best/1"] {
        let entries: Vec<_> = report.entries.iter().filter(|e| e.algorithm == alg).collect();
        let below = entries
            .iter()
            .filter(|e| e.ar.is_some_and(|a| a < report.ar_expected))
            .count();
        let ars: Vec<String> = entries
            .iter()
            .map(|e| e.ar.map_or("-".into(), |a| format!("{a:.1}")))
            .collect();
        c.note(format!("{alg} {below}/{} below [{}]", entries.len(), ars.join(" ")));
        c.check(below >= 10, format!("{alg}: only {below} functions below AR^exp"));
    }
    c.within(m.elapsed, Duration::from_secs(300));
}

fn rank_monotonicity(c: &mut Checks, m: &Motivation) {
    let report = ar_report(&m.results, 50);
    for e in report.entries.iter().filter(|e| e.category == Category::Unimodal.to_string()) {
        c.note(format!("{} {} top {} bottom {}", e.problem, e.algorithm, e.top_mass, e.bottom_mass));
        c.check(
            e.top_mass > e.bottom_mass,
            format!("{} {}: top {} <= bottom {}", e.problem, e.algorithm, e.top_mass, e.bottom_mass),
        );
    }
}

struct Comparison {
    table: ErrorTable,
    core_elapsed: Duration,
}

fn comparison() -> Comparison {
    let cfg = desk_config(25);
    let start = Instant::now();
    let mut results = matrix(&cfg, &["mlcc", "shade", "bide"]);
    let core_elapsed = start.elapsed();
    results.extend(matrix(&cfg, &["variant-iii", "mlcc:n=0.1", "mlcc:n=1.0"]));
    Comparison {
        table: ErrorTable::from_rows(&rows_of(&results)),
        core_elapsed,
    }
}

fn subset(table: &ErrorTable, names: &[&str]) -> ErrorTable {
    let rows: Vec<_> = (0..table.algorithms.len())
        .filter(|&a| names.contains(&table.algorithms[a].as_str()))
        .flat_map(|a| {
            (0..table.problems.len()).flat_map(move |p| {
                table.errors(a, p).into_iter().enumerate().map(move |(k, e)| mlcc_cli::output::RunRow {
                    algorithm: table.algorithms[a].clone(),
                    problem: table.problems[p].clone(),
                    category: table.categories[p].clone(),
                    run: k,
                    seed: k as u64,
                    final_error: e,
                    evaluations: 0,
                    generations: 0,
                })
            })
        })
        .collect();
    ErrorTable::from_rows(&rows)
}

fn improvement(c: &mut Checks, cmp: &Comparison) {
    let table = subset(&cmp.table, &["mlcc", "shade", "bide"]);
    let report = compare(&table, "mlcc", 0.05).unwrap();
    for p in &report.pairwise {
        c.note(format!(
            "vs {}: R+ {} R- {} p {:.3} [{}]",
            p.algorithm, p.r_plus, p.r_minus, p.p_value, p.signs
        ));
        c.check(p.r_plus > p.r_minus, format!("vs {}: R+ {} <= R- {}", p.algorithm, p.r_plus, p.r_minus));
    }
    let ranks: Vec<String> = report
        .algorithms
        .iter()
        .zip(&report.friedman)
        .map(|(a, r)| format!("{a} {r:.3}"))
        .collect();
    c.note(format!("friedman {}", ranks.join(", ")));
    let mlcc_rank = report.friedman[0];
    c.check(
        report.friedman[1..].iter().all(|&r| mlcc_rank < r),
        "mlcc does not have the smallest mean rank",
    );
    c.within(cmp.core_elapsed, Duration::from_secs(900));
}

fn ablation_order(c: &mut Checks, cmp: &Comparison) {
    let table = subset(&cmp.table, &["mlcc", "variant-iii", "shade", "bide"]);
    let rows = ablation(
        &table,
        &["mlcc".into(), "variant-iii".into()],
        &["shade".into(), "bide".into()],
        0.05,
    )
    .unwrap();
    for r in &rows {
        let parts: Vec<String> = r.versus.iter().map(|(b, s)| format!("{b} {s}")).collect();
        c.note(format!("{}: {} total {}", r.variant, parts.join(", "), r.total_p_n));
    }
    c.check(
        rows[0].total_p_n >= rows[1].total_p_n,
        format!("full {} < variant-iii {}", rows[0].total_p_n, rows[1].total_p_n),
    );
}

fn n_sensitivity(c: &mut Checks, cmp: &Comparison) {
    let table = subset(&cmp.table, &["mlcc", "mlcc:n=0.1", "mlcc:n=1.0"]);
    let report = compare(&table, "mlcc", 0.05).unwrap();
    for p in &report.pairwise {
        c.note(format!("N=0.05 vs {}: {}", p.algorithm, p.signs));
    }
    let row = |name: &str| report.pairwise.iter().find(|p| p.algorithm == name).unwrap().signs;
    let large = row("mlcc:n=1.0");
    c.check(large.minus >= large.plus, format!("N=1.0 row {large}"));
    let close = row("mlcc:n=0.1");
    c.check(2 * close.equal > close.total(), format!("N=0.1 row {close}"));
}

fn accounting(c: &mut Checks) {
    let suite = make_suite(10, 2024).unwrap();
    let cfg = desk_config(1);
    let algorithm = cfg.algorithms(&["mlcc".into()]).unwrap().remove(0).algorithm;
    let record = run(&algorithm, &suite[4], &mlcc_cli::experiment::settings(&cfg, 0)).unwrap();
    let np = 50u64;
    let layers = cfg.mlcc.layers.len() as u64;
    let mut checked = 0;
    for w in record.trace.windows(2).take(100) {
        if !w[1].complete {
            break;
        }
        let spent = w[1].evaluations - w[0].evaluations;
        c.check(
            spent == np + (layers - 1) * w[1].top_g as u64,
            format!("generation {}: {} evaluations, top_G {}", w[1].generation, spent, w[1].top_g),
        );
        checked += 1;
    }
    c.check(checked == 100, format!("only {checked} complete generations"));
    for s in &record.layer_shares {
        c.check((s.shares.iter().sum::<f64>() - 1.0).abs() < 1e-12, "layer shares sum to 1");
    }

    let mut rng = RandomSource::new(70);
    let m = 3;
    let mut table = PreferenceTable::random(50, m, &mut rng);
    let mut violations = 0u64;
    for _ in 0..1_000_000 {
        let i = rng.below(50);
        let before = table.get(i);
        let event = match rng.below(4) {
            0 => PreferenceEvent::Inferior { succeeded: true },
            1 => PreferenceEvent::Inferior { succeeded: false },
            2 => PreferenceEvent::Top { succeeded: false, best_layer: rng.below(m) },
            _ => PreferenceEvent::Top { succeeded: true, best_layer: rng.below(m) },
        };
        ipls_update(&mut table, i, event, &mut rng);
        let after = table.get(i);
        let ok = after < m
            && match event {
                PreferenceEvent::Inferior { succeeded: false } => after != before,
                PreferenceEvent::Top { succeeded: true, best_layer } => after == best_layer,
                _ => after == before,
            };
        violations += u64::from(!ok);
    }
    c.note(format!("{checked} generations exact, 10^6 preference events, {violations} violations"));
    c.check(violations == 0, format!("{violations} preference violations"));
}

fn brute_force_p(diffs: &[f64]) -> (f64, f64, f64) {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let rank: Vec<f64> = abs
        .iter()
        .map(|a| {
            let below = abs.iter().filter(|b| *b < a).count() as f64;
            let equal = abs.iter().filter(|b| *b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let total: f64 = rank.iter().sum();
    let r_plus: f64 = rank.iter().zip(&d).filter(|(_, x)| **x > 0.0).map(|(r, _)| r).sum();
    let observed = (r_plus - total / 2.0).abs();
    let n = d.len();
    let extreme = (0u32..(1 << n))
        .filter(|mask| {
            let s: f64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| rank[k]).sum();
            (s - total / 2.0).abs() >= observed - 1e-9
        })
        .count();
    (r_plus, total - r_plus, extreme as f64 / (1u64 << n) as f64)
}

fn statistics(c: &mut Checks) {
    let mut rng = RandomSource::new(80);
    let mut instances = 0;
    let mut worst = 0.0f64;
    while instances < 50 {
        let n = 1 + rng.below(12);
        let diffs: Vec<f64> = (0..n).map(|_| (rng.below(11) as f64 - 5.0) * 0.25).collect();
        let Ok(w) = wilcoxon_signed_rank(&diffs, 0.05) else {
            continue;
        };
        let (rp, rm, p) = brute_force_p(&diffs);
        c.check(w.method == PValueMethod::Exact, "exact path used");
        c.check((w.r_plus, w.r_minus) == (rp, rm), format!("rank sums for {diffs:?}"));
        worst = worst.max((w.p_value - p).abs());
        instances += 1;
    }
    c.check(worst < 1e-12, format!("p mismatch {worst:e}"));

    let w = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, -4.0], 0.05).unwrap();
    c.check((w.p_value - brute_force_p(&[1.0, 2.0, 3.0, -4.0]).2).abs() < 1e-12, "(+1,+2,+3,-4)");
    let w = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.05).unwrap();
    c.check((w.r_plus, w.r_minus) == (15.0, 0.0), "n=5 all positive");

    let fixture = vec![vec![0.1, 0.2, 0.3], vec![5.0, 1.0, 5.0], vec![9.0, 2.0, 4.0]];
    let ranks = friedman_mean_ranks(&fixture).unwrap();
    let hand = [6.5 / 3.0, 4.0 / 3.0, 7.5 / 3.0];
    c.check(ranks.iter().zip(hand).all(|(a, b)| (a - b).abs() < 1e-12), "friedman fixture");
    c.check(friedman_mean_ranks(&vec![vec![1.0; 3]; 4]).unwrap() == vec![2.0; 3], "friedman all tied");

    let mut conserved = 0;
    for _ in 0..1000 {
        let n = 1 + rng.below(60);
        let diffs: Vec<f64> = (0..n).map(|_| rng.normal(0.0, 2.0).round()).collect();
        if let Ok(w) = wilcoxon_signed_rank(&diffs, 0.05) {
            let m = w.n as f64;
            c.check(w.r_plus + w.r_minus == m * (m + 1.0) / 2.0, "R+ + R- conservation");
        }
        conserved += 1;
    }
    c.note(format!("50 exact instances (max |dp| {worst:.1e}), fixture ok, {conserved} conservation inputs"));
}

fn shade_memory(c: &mut Checks) {
    let mut rng = RandomSource::new(90);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let count = 1 + rng.below(25);
        let f: Vec<f64> = (0..count).map(|_| rng.uniform()).collect();
        let cr: Vec<f64> = (0..count).map(|_| rng.uniform()).collect();
        let gain: Vec<f64> = (0..count).map(|_| rng.uniform() * 1e3).collect();
        let mut layer = ShadeLayer::new(0, 5, 0.7, 0.5, 5);
        for k in 0..count {
            layer.record_success(f[k], cr[k], gain[k]);
        }
        layer.end_generation();
        let total: f64 = gain.iter().sum();
        let w: Vec<f64> = gain.iter().map(|g| g / total).collect();
        let lehmer = (0..count).map(|k| w[k] * f[k] * f[k]).sum::<f64>()
            / (0..count).map(|k| w[k] * f[k]).sum::<f64>();
        let arith: f64 = (0..count).map(|k| w[k] * cr[k]).sum();
        worst = worst
            .max((layer.memory_f()[0] - lehmer).abs() / lehmer)
            .max((layer.memory_cr()[0] - arith).abs() / arith);
    }
    c.check(worst < 1e-12, format!("relative error {worst:e}"));
    let mut layer = ShadeLayer::new(0, 5, 0.7, 0.5, 5);
    layer.record_success(0.5, 0.2, 1.0);
    layer.record_success(0.7, 0.4, 3.0);
    layer.end_generation();
    let (mf, mcr) = (layer.memory_f()[0], layer.memory_cr()[0]);
    c.note(format!("max rel err {worst:.1e}; worked example M_F {mf:.9} M_CR {mcr:.9}"));
    c.check((mf - 0.661_538_461_538).abs() < 1e-11, "worked M_F");
    c.check((mcr - 0.35).abs() < 1e-12, "worked M_CR");
}

fn determinism(c: &mut Checks) {
    let dir = tempfile::tempdir().unwrap();
    let config = "[run]\nruns = 2\nbudget_multiplier = 2000\nalgorithms = [\"mlcc\", \"shade\"]\n";
    std::fs::write(dir.path().join("exp.toml"), config).unwrap();
    let invoke = |out: &str, seed: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_mlcc"))
            .current_dir(dir.path())
            .env_remove("MLCC_OUT_DIR")
            .args(["--config", "exp.toml", "--out", out, "--seed", seed, "run"])
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read_to_string(dir.path().join(out).join("runs.csv")).unwrap()
    };
    let a = invoke("a", "1");
    let b = invoke("b", "1");
    let other = invoke("c", "2");
    c.check(a == b, "identical invocations differ");
    let errors = |csv: &str| -> Vec<f64> {
        mlcc_cli::output::parse_runs_csv(csv)
            .unwrap()
            .iter()
            .map(|r| r.final_error)
            .collect()
    };
    let changed = errors(&a).iter().zip(errors(&other)).filter(|(x, y)| **x != *y).count();
    c.note(format!("{} bytes identical; new seed changed {changed} final errors", a.len()));
    c.check(changed > 0, "seed change had no effect");
}

fn benchmark(c: &mut Checks) {
    let mut rotations = 0;
    let mut worst = 0.0f64;
    for d in [2, 10, 30] {
        for p in make_suite(d, 2024).unwrap() {
            for q in p.rotations() {
                worst = worst.max(q.orthogonality_error());
                rotations += 1;
            }
            if p.category() != Category::Composition {
                let v = p.eval(p.optimum_location()).unwrap();
                c.check(v == p.bias(), format!("{} D={d}: f(o) = {v}", p.id()));
            }
            for comp in p.components() {
                let v = p.eval(&comp.shift).unwrap();
                c.check(
                    v == p.bias() + comp.offset,
                    format!("{} D={d}: center value {v}", p.id()),
                );
            }
            c.check(p.optimum_value() == p.bias(), "optimum value");
        }
    }
    let mut rng = RandomSource::new(100);
    for d in 1..=50 {
        worst = worst.max(random_rotation(d, &mut rng).orthogonality_error());
    }
    c.check(worst < 1e-10, format!("orthogonality error {worst:e}"));
    c.note(format!("{rotations} suite rotations + 50 random, max |QtQ - I| {worst:.1e}"));
}

fn main() -> ExitCode {
    let motivation_data = std::cell::OnceCell::new();
    let comparison_data = std::cell::OnceCell::new();
    type Criterion<'a> = (&'static str, Box<dyn Fn(&mut Checks) + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("operator correctness", Box::new(operators)),
        ("rank archive: AR below AR^exp", Box::new(|c: &mut Checks| {
            rank_replication(c, motivation_data.get_or_init(motivation))
        })),
        ("rank archive: top-rank mass on unimodal", Box::new(|c: &mut Checks| {
            rank_monotonicity(c, motivation_data.get_or_init(motivation))
        })),
        ("mlcc beats single layers", Box::new(|c: &mut Checks| {
            improvement(c, comparison_data.get_or_init(comparison))
        })),
        ("ablation ordering", Box::new(|c: &mut Checks| {
            ablation_order(c, comparison_data.get_or_init(comparison))
        })),
        ("N sensitivity", Box::new(|c: &mut Checks| {
            n_sensitivity(c, comparison_data.get_or_init(comparison))
        })),
        ("framework accounting", Box::new(accounting)),
        ("statistics oracles", Box::new(statistics)),
        ("SHADE memory oracle", Box::new(shade_memory)),
        ("determinism", Box::new(determinism)),
        ("benchmark integrity", Box::new(benchmark)),
    ];
    let mut failed = 0;
    for (k, (name, body)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut checks = Checks::default();
        let outcome = catch_unwind(AssertUnwindSafe(|| body(&mut checks)));
        if let Err(panic) = outcome {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            checks.failures.push(msg);
        }
        let status = if checks.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "{status} {:>2} {name} ({:.1}s): {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            checks.summary.join("; ")
        );
        for f in checks.failures.iter().take(10) {
            println!("       {f}");
        }
        if !checks.failures.is_empty() {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 || std::env::var_os("MLCC_ACCEPTANCE_STRICT").is_none() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
