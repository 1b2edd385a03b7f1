//! The multi-layer competitive-cooperative generation loop.
//!
//! Every generation the population is ranked by fitness and a fresh
//! `top_G = ⌈u·NP·N⌉` is drawn. The `top_G` best individuals get one trial
//! from every layer and keep the fittest (resource-allocation bias); the
//! rest get a single trial from the layer they prefer. A preference is kept
//! while its layer keeps succeeding, switched to a different random layer
//! on failure, and reset to the winning layer when a top individual
//! improves.
//!
//! Layer and preference indices are zero-based; fitness ranks are one-based
//! (rank 1 is the best individual).

use serde::{Deserialize, Serialize};

use crate::de_ops::{sample_distinct, select_survivor};
use crate::error::{Error, Result};
use crate::layers::{GenerationView, Layer, LayerSpec, TrialProposal};
use crate::problem::{error_value, evaluate, Budget, Problem};
use crate::rng::RandomSource;
use crate::stats::RankArchive;
use crate::types::{Individual, Population};

/// Smallest population accepted by [`run`].
pub const MIN_POPULATION: usize = 5;
/// Default fraction of the population eligible for multi-layer evolution.
pub const DEFAULT_N: f64 = 0.05;
/// Generations per layer-share interval.
pub const DEFAULT_SHARE_INTERVAL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ablation {
    Full,
    /// Variant-I: every individual uses only its preferred layer.
    NoRab,
    /// Variant-II: top individuals use all layers, the rest a random one.
    NoIpls,
    /// Variant-III: every individual uses one random layer.
    Neither,
    /// Variant-IV: the multi-layer individuals are a random subset.
    NoFitnessBias,
}

impl Ablation {
    fn uses_rab(self) -> bool {
        !matches!(self, Ablation::NoRab | Ablation::Neither)
    }

    fn uses_ipls(self) -> bool {
        !matches!(self, Ablation::NoIpls | Ablation::Neither)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlccConfig {
    pub layers: Vec<LayerSpec>,
    #[serde(default = "default_n")]
    pub n: f64,
    /// Constant `top_G` instead of the per-generation draw.
    #[serde(default)]
    pub top_g_override: Option<TopGOverride>,
    #[serde(default = "default_ablation")]
    pub ablation: Ablation,
    /// Write survivors into the next generation instead of in place.
    #[serde(default)]
    pub synchronous: bool,
}

fn default_n() -> f64 {
    DEFAULT_N
}

fn default_ablation() -> Ablation {
    Ablation::Full
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopGOverride {
    Count(usize),
    /// The whole population.
    All,
}

impl TopGOverride {
    pub fn resolve(self, np: usize) -> usize {
        match self {
            TopGOverride::Count(k) => k,
            TopGOverride::All => np,
        }
    }
}

impl MlccConfig {
    pub fn new(layers: Vec<LayerSpec>) -> Self {
        Self {
            layers,
            n: DEFAULT_N,
            top_g_override: None,
            ablation: Ablation::Full,
            synchronous: false,
        }
    }

    pub fn with_n(mut self, n: f64) -> Self {
        self.n = n;
        self
    }

    pub fn with_ablation(mut self, ablation: Ablation) -> Self {
        self.ablation = ablation;
        self
    }

    pub fn with_top_g(mut self, top_g: TopGOverride) -> Self {
        self.top_g_override = Some(top_g);
        self
    }

    pub fn synchronous(mut self, on: bool) -> Self {
        self.synchronous = on;
        self
    }

    pub fn m(&self) -> usize {
        self.layers.len()
    }
}

/// What to run: one layer on its own, or several under the framework.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Single(LayerSpec),
    Mlcc(MlccConfig),
}

impl Algorithm {
    pub fn label(&self) -> String {
        match self {
            Algorithm::Single(spec) => spec.label(),
            Algorithm::Mlcc(cfg) => format!(
                "mlcc[{}]",
                cfg.layers.iter().map(LayerSpec::label).collect::<Vec<_>>().join("+")
            ),
        }
    }

    pub fn layers(&self) -> &[LayerSpec] {
        match self {
            Algorithm::Single(spec) => std::slice::from_ref(spec),
            Algorithm::Mlcc(cfg) => &cfg.layers,
        }
    }

    pub fn validate(&self, np: usize) -> Result<()> {
        if np < MIN_POPULATION {
            return Err(Error::InvalidConfig(format!(
                "population size {np} below minimum {MIN_POPULATION}"
            )));
        }
        for spec in self.layers() {
            spec.validate()?;
            if let LayerSpec::FixedDe { strategy, .. } = spec {
                if np <= strategy.donor_count() {
                    return Err(Error::InvalidConfig(format!(
                        "{strategy} needs a population larger than {}",
                        strategy.donor_count()
                    )));
                }
            }
        }
        if let Algorithm::Mlcc(cfg) = self {
            if cfg.m() < 2 {
                return Err(Error::InvalidConfig(format!(
                    "framework needs at least two layers, got {}",
                    cfg.m()
                )));
            }
            if !(cfg.n > 0.0 && cfg.n <= 1.0) {
                return Err(Error::InvalidConfig(format!("N = {} not in (0, 1]", cfg.n)));
            }
            if let Some(o) = cfg.top_g_override {
                let k = o.resolve(np);
                if k == 0 || k > np {
                    return Err(Error::InvalidConfig(format!("top_G = {k} not in [1, {np}]")));
                }
            }
        }
        Ok(())
    }
}

/// Per-individual fitness ranks (1 = best, ties by lower index) and the
/// matching best-to-worst order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitnessRanks {
    pub ranks: Vec<usize>,
    pub order: Vec<usize>,
}

pub fn fitness_ranks(population: &Population) -> FitnessRanks {
    let order = population.sorted_indices();
    let mut ranks = vec![0; order.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    FitnessRanks { ranks, order }
}

/// `⌈u·NP·N⌉` for a given uniform `u ∈ (0, 1)`.
pub fn top_g_from_uniform(u: f64, np: usize, n: f64) -> usize {
    ((u * np as f64 * n).ceil() as usize).clamp(1, np)
}

pub fn draw_top_g(rng: &mut RandomSource, np: usize, n: f64) -> usize {
    top_g_from_uniform(rng.uniform(), np, n)
}

/// One preferred layer per individual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceTable {
    entries: Vec<usize>,
    m: usize,
}

impl PreferenceTable {
    /// `⌈u·M⌉` per individual, i.e. a uniform layer.
    pub fn random(np: usize, m: usize, rng: &mut RandomSource) -> Self {
        Self {
            entries: (0..np)
                .map(|_| ((rng.uniform() * m as f64).ceil() as usize).clamp(1, m) - 1)
                .collect(),
            m,
        }
    }

    pub fn from_entries(entries: Vec<usize>, m: usize) -> Self {
        assert!(entries.iter().all(|&e| e < m));
        Self { entries, m }
    }

    pub fn get(&self, i: usize) -> usize {
        self.entries[i]
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn shares(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.m];
        for &e in &self.entries {
            counts[e] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / self.entries.len() as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreferenceEvent {
    Inferior { succeeded: bool },
    Top { succeeded: bool, best_layer: usize },
}

pub fn ipls_update(
    table: &mut PreferenceTable,
    i: usize,
    event: PreferenceEvent,
    rng: &mut RandomSource,
) {
    match event {
        PreferenceEvent::Inferior { succeeded: true } => {}
        PreferenceEvent::Inferior { succeeded: false } => {
            if table.m > 1 {
                let current = table.entries[i];
                let r = rng.below(table.m - 1);
                table.entries[i] = if r >= current { r + 1 } else { r };
            }
        }
        PreferenceEvent::Top {
            succeeded: true,
            best_layer,
        } => table.entries[i] = best_layer,
        PreferenceEvent::Top { succeeded: false, .. } => {}
    }
}

/// Best fitness seen in the run and the ranks of the targets that improved it.
#[derive(Debug, Clone)]
pub struct BestTracker {
    pub best: f64,
    pub archive: RankArchive,
}

impl BestTracker {
    pub fn new(initial_best: f64, np: usize) -> Self {
        Self {
            best: initial_best,
            archive: RankArchive::new(np),
        }
    }

    pub fn observe(&mut self, fitness: f64, rank: usize) {
        if fitness < self.best {
            self.best = fitness;
            self.archive.record(rank);
        }
    }
}

/// Mutable run resources threaded through a single trial step.
pub struct StepContext<'a> {
    pub problem: &'a dyn Problem,
    pub budget: &'a mut Budget,
    pub rng: &'a mut RandomSource,
    pub tracker: &'a mut BestTracker,
}

impl StepContext<'_> {
    fn evaluate(&mut self, proposal: &TrialProposal, rank: usize) -> Result<f64> {
        let f = evaluate(self.problem, &proposal.trial, self.budget)?;
        self.tracker.observe(f, rank);
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopOutcome {
    pub survivor: Individual,
    pub best_layer: usize,
    pub succeeded: bool,
    /// Layers whose trial was evaluated, in layer order.
    pub evaluated_layers: Vec<usize>,
    /// The budget ran out inside the batch.
    pub truncated: bool,
}

/// Index of the smallest value; ties go to the lowest index.
pub fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

/// Evolves a top-ranked target with one trial from every layer.
///
/// All proposals are built against the same population state. Each layer
/// gets feedback on its own trial before the fittest trial competes with
/// the target. If the budget runs out mid-batch the evaluated trials still
/// compete and the unevaluated layers get no feedback.
pub fn rab_evolve_top(
    i: usize,
    rank: usize,
    layers: &mut [Box<dyn Layer>],
    view: &GenerationView<'_>,
    ctx: &mut StepContext<'_>,
) -> Result<TopOutcome> {
    let target = &view.population.members[i];
    let proposals = layers
        .iter()
        .map(|layer| layer.propose(i, view, ctx.rng))
        .collect::<Result<Vec<_>>>()?;
    let mut fitness = Vec::with_capacity(proposals.len());
    let mut truncated = false;
    for p in &proposals {
        match ctx.evaluate(p, rank) {
            Ok(f) => fitness.push(f),
            Err(Error::BudgetExhausted { .. }) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if fitness.is_empty() {
        return Err(Error::BudgetExhausted {
            used: ctx.budget.used(),
        });
    }
    for (m, f) in fitness.iter().enumerate() {
        layers[m].feedback(i, &proposals[m], target, *f, ctx.rng);
    }
    let b = argmin(&fitness);
    let trial = Individual::new(proposals[b].trial.clone(), fitness[b]);
    let (survivor, succeeded) = select_survivor(target.clone(), trial);
    Ok(TopOutcome {
        survivor,
        best_layer: b,
        succeeded,
        evaluated_layers: (0..fitness.len()).collect(),
        truncated,
    })
}

/// Evolves a target with a single trial from `layer`.
pub fn evolve_inferior(
    i: usize,
    rank: usize,
    layer: &mut dyn Layer,
    view: &GenerationView<'_>,
    ctx: &mut StepContext<'_>,
) -> Result<(Individual, bool)> {
    let target = &view.population.members[i];
    let proposal = layer.propose(i, view, ctx.rng)?;
    let f = ctx.evaluate(&proposal, rank)?;
    layer.feedback(i, &proposal, target, f, ctx.rng);
    Ok(select_survivor(
        target.clone(),
        Individual::new(proposal.trial, f),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub generation: usize,
    /// Cumulative objective calls at the end of the generation.
    pub evaluations: u64,
    pub best_error: f64,
    pub top_g: usize,
    /// False for a generation cut short by the budget.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerShareInterval {
    pub first_generation: usize,
    pub last_generation: usize,
    /// Trials generated by each layer in the interval.
    pub trials: Vec<u64>,
    /// `trials` normalized to sum to one.
    pub shares: Vec<f64>,
    /// Preference-table composition at the end of the interval.
    pub preference_shares: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub problem: String,
    pub seed: u64,
    pub final_error: f64,
    pub best_fitness: f64,
    pub evaluations: u64,
    pub generations: usize,
    pub layers: Vec<String>,
    pub trace: Vec<TracePoint>,
    pub layer_shares: Vec<LayerShareInterval>,
    pub rank_archive: RankArchive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub np: usize,
    pub max_evaluations: u64,
    pub seed: u64,
    pub share_interval: usize,
}

impl RunSettings {
    pub fn new(np: usize, max_evaluations: u64, seed: u64) -> Self {
        Self {
            np,
            max_evaluations,
            seed,
            share_interval: DEFAULT_SHARE_INTERVAL,
        }
    }
}

/// Layer routing for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Single,
    Framework { ablation: Ablation },
}

struct Engine<'p> {
    problem: &'p dyn Problem,
    mode: Mode,
    n: f64,
    top_g_override: Option<usize>,
    synchronous: bool,
    population: Population,
    layers: Vec<Box<dyn Layer>>,
    preferences: Option<PreferenceTable>,
    budget: Budget,
    rng: RandomSource,
    tracker: BestTracker,
    trace: Vec<TracePoint>,
    share_interval: usize,
    interval_start: usize,
    interval_trials: Vec<u64>,
    layer_shares: Vec<LayerShareInterval>,
}

impl Engine<'_> {
    fn best_error(&self) -> f64 {
        error_value(self.tracker.best, self.problem.optimum_value())
    }

    fn push_trace(&mut self, top_g: usize, complete: bool) {
        self.trace.push(TracePoint {
            generation: self.population.generation,
            evaluations: self.budget.used(),
            best_error: self.best_error(),
            top_g,
            complete,
        });
    }

    fn close_interval(&mut self, last: usize) {
        if last < self.interval_start {
            return;
        }
        let total: u64 = self.interval_trials.iter().sum();
        if total == 0 {
            return;
        }
        let trials = std::mem::replace(&mut self.interval_trials, vec![0; self.layers.len()]);
        self.layer_shares.push(LayerShareInterval {
            first_generation: self.interval_start,
            last_generation: last,
            shares: trials.iter().map(|&t| t as f64 / total as f64).collect(),
            trials,
            preference_shares: self.preferences.as_ref().map(PreferenceTable::shares),
        });
        self.interval_start = last + 1;
    }

    fn top_mask(&mut self, ranks: &FitnessRanks) -> (Vec<bool>, usize) {
        let np = self.population.len();
        let ablation = match self.mode {
            Mode::Framework { ablation } if ablation.uses_rab() => ablation,
            _ => return (vec![false; np], 0),
        };
        let top_g = match self.top_g_override {
            Some(k) => k,
            None => draw_top_g(&mut self.rng, np, self.n),
        };
        let mut mask = vec![false; np];
        if ablation == Ablation::NoFitnessBias {
            for i in sample_distinct(top_g, &[], np, &mut self.rng)
                .expect("top_G never exceeds NP")
            {
                mask[i] = true;
            }
        } else {
            for (i, &r) in ranks.ranks.iter().enumerate() {
                mask[i] = r <= top_g;
            }
        }
        (mask, top_g)
    }

    /// Runs one generation. Returns `Err(BudgetExhausted)` when the run ends
    /// inside it.
    fn generation(&mut self) -> Result<()> {
        let ranks = fitness_ranks(&self.population);
        let (is_top, top_g) = self.top_mask(&ranks);
        let np = self.population.len();
        let snapshot = self.synchronous.then(|| self.population.clone());
        let mut outcome = Ok(());

        for i in 0..np {
            let rank = ranks.ranks[i];
            let current = snapshot.as_ref().unwrap_or(&self.population);
            let view = GenerationView {
                population: current,
                ranking: &ranks.order,
                bounds: self.problem.bounds(),
            };
            let mut ctx = StepContext {
                problem: self.problem,
                budget: &mut self.budget,
                rng: &mut self.rng,
                tracker: &mut self.tracker,
            };
            let step = if is_top[i] {
                rab_evolve_top(i, rank, &mut self.layers, &view, &mut ctx).map(|out| {
                    for &m in &out.evaluated_layers {
                        self.interval_trials[m] += 1;
                    }
                    let event = PreferenceEvent::Top {
                        succeeded: out.succeeded,
                        best_layer: out.best_layer,
                    };
                    (out.survivor, Some(event), out.truncated)
                })
            } else {
                let m = match (&self.preferences, self.mode) {
                    (Some(table), _) => table.get(i),
                    (None, Mode::Framework { .. }) => ctx.rng.below(self.layers.len()),
                    (None, Mode::Single) => 0,
                };
                evolve_inferior(i, rank, self.layers[m].as_mut(), &view, &mut ctx).map(
                    |(survivor, succeeded)| {
                        self.interval_trials[m] += 1;
                        (survivor, Some(PreferenceEvent::Inferior { succeeded }), false)
                    },
                )
            };
            match step {
                Ok((survivor, event, truncated)) => {
                    self.population.members[i] = survivor;
                    if let (Some(table), Some(event)) = (self.preferences.as_mut(), event) {
                        ipls_update(table, i, event, &mut self.rng);
                    }
                    if truncated {
                        outcome = Err(Error::BudgetExhausted {
                            used: self.budget.used(),
                        });
                        break;
                    }
                }
                Err(e) => {
                    outcome = Err(e);
                    break;
                }
            }
        }

        // Synchronous mode reads the snapshot and writes into the live
        // population, which becomes the next generation.
        drop(snapshot);
        match outcome {
            Ok(()) => {
                for layer in &mut self.layers {
                    layer.end_generation();
                }
                self.population.generation += 1;
                self.push_trace(top_g, true);
                if self.population.generation + 1 - self.interval_start >= self.share_interval {
                    self.close_interval(self.population.generation);
                }
                Ok(())
            }
            Err(e) => {
                if matches!(e, Error::BudgetExhausted { .. }) {
                    self.push_trace(top_g, false);
                }
                Err(e)
            }
        }
    }
}

/// Runs `algorithm` on `problem` until the evaluation budget is spent.
///
/// The initial population depends only on the seed, the problem bounds and
/// NP, so different algorithms with the same seed start from the same
/// population. Initialization evaluations count against the budget.
pub fn run(algorithm: &Algorithm, problem: &dyn Problem, settings: &RunSettings) -> Result<RunRecord> {
    let np = settings.np;
    algorithm.validate(np)?;
    if settings.max_evaluations < np as u64 {
        return Err(Error::InvalidConfig(format!(
            "budget {} cannot evaluate the initial population of {np}",
            settings.max_evaluations
        )));
    }
    if settings.share_interval == 0 {
        return Err(Error::InvalidConfig("share interval must be >= 1".into()));
    }

    let base = RandomSource::new(settings.seed);
    let mut init_rng = base.fork(0);
    let mut rng = base.fork(1);
    let mut budget = Budget::new(settings.max_evaluations);

    let mut members = Vec::with_capacity(np);
    for _ in 0..np {
        let genome = problem.bounds().sample(&mut init_rng);
        let fitness = evaluate(problem, &genome, &mut budget)?;
        members.push(Individual::new(genome, fitness));
    }
    let population = Population::new(members);
    let initial_best = population.fitness(population.best_index());

    let layers: Vec<Box<dyn Layer>> = algorithm
        .layers()
        .iter()
        .enumerate()
        .map(|(id, spec)| spec.build(id, np, &mut rng))
        .collect();
    let m = layers.len();

    let (mode, n, top_g_override, synchronous) = match algorithm {
        Algorithm::Single(_) => (Mode::Single, DEFAULT_N, None, false),
        Algorithm::Mlcc(cfg) => (
            Mode::Framework {
                ablation: cfg.ablation,
            },
            cfg.n,
            cfg.top_g_override.map(|o| o.resolve(np)),
            cfg.synchronous,
        ),
    };
    let preferences = match mode {
        Mode::Framework { ablation } if ablation.uses_ipls() => {
            Some(PreferenceTable::random(np, m, &mut rng))
        }
        _ => None,
    };

    let mut engine = Engine {
        problem,
        mode,
        n,
        top_g_override,
        synchronous,
        population,
        layers,
        preferences,
        budget,
        rng,
        tracker: BestTracker::new(initial_best, np),
        trace: Vec::new(),
        share_interval: settings.share_interval,
        interval_start: 1,
        interval_trials: vec![0; m],
        layer_shares: Vec::new(),
    };
    engine.push_trace(0, true);

    loop {
        match engine.generation() {
            Ok(()) => {}
            Err(Error::BudgetExhausted { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let partial = engine.trace.last().is_some_and(|t| !t.complete);
    engine.close_interval(engine.population.generation + usize::from(partial));

    Ok(RunRecord {
        algorithm: algorithm.label(),
        problem: problem.id().to_string(),
        seed: settings.seed,
        final_error: engine.best_error(),
        best_fitness: engine.tracker.best,
        evaluations: engine.budget.used(),
        generations: engine.population.generation,
        layers: algorithm.layers().iter().map(LayerSpec::label).collect(),
        trace: engine.trace,
        layer_shares: engine.layer_shares,
        rank_archive: engine.tracker.archive,
    })
}
