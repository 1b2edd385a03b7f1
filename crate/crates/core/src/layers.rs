//! Layer optimizers. Every layer sees the whole population when it builds a
//! trial, keeps its adaptation state private, and learns from the outcome of
//! its own trials through [`Layer::feedback`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::de_ops::{
    crossover_binomial, mutate_classic, mutate_current_to_pbest, Archive, MutationStrategy,
};
use crate::error::Result;
use crate::problem::repair_bounds;
use crate::rng::RandomSource;
use crate::types::{Bounds, Genome, Individual, Population};

/// Scale of the Cauchy/normal parameter draws.
pub const PARAMETER_SCALE: f64 = 0.1;
/// Upper end of the pbest fraction range.
pub const PBEST_MAX: f64 = 0.2;

/// Read-only view handed to layers while they propose.
#[derive(Clone, Copy)]
pub struct GenerationView<'a> {
    pub population: &'a Population,
    /// Member indices from best to worst, fixed at generation start.
    pub ranking: &'a [usize],
    pub bounds: &'a Bounds,
}

impl GenerationView<'_> {
    pub fn best(&self) -> usize {
        self.ranking[0]
    }
}

/// A bound-repaired trial with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialProposal {
    pub trial: Genome,
    pub layer_id: usize,
    pub f: f64,
    pub cr: f64,
    pub donors: Vec<usize>,
}

pub trait Layer: Send + fmt::Debug {
    fn id(&self) -> usize;

    fn name(&self) -> &'static str;

    fn propose(
        &self,
        i: usize,
        view: &GenerationView<'_>,
        rng: &mut RandomSource,
    ) -> Result<TrialProposal>;

    /// Outcome of this layer's trial for target `i`.
    fn feedback(
        &mut self,
        i: usize,
        proposal: &TrialProposal,
        target: &Individual,
        trial_fitness: f64,
        rng: &mut RandomSource,
    );

    fn end_generation(&mut self);
}

/// Declarative layer description, resolved against a population size when
/// a run starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LayerSpec {
    Shade {
        #[serde(default = "default_memory_f")]
        memory_f: f64,
        #[serde(default = "default_memory_cr")]
        memory_cr: f64,
        /// History length; `None` means NP.
        #[serde(default)]
        history: Option<usize>,
        #[serde(default = "default_true")]
        archive: bool,
    },
    Bide {
        #[serde(default = "default_true")]
        archive: bool,
    },
    FixedDe {
        strategy: MutationStrategy,
        f: f64,
        cr: f64,
    },
}

fn default_memory_f() -> f64 {
    0.7
}

fn default_memory_cr() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

impl LayerSpec {
    pub fn shade() -> Self {
        LayerSpec::Shade {
            memory_f: default_memory_f(),
            memory_cr: default_memory_cr(),
            history: None,
            archive: true,
        }
    }

    pub fn bide() -> Self {
        LayerSpec::Bide { archive: true }
    }

    pub fn fixed_de(strategy: MutationStrategy, f: f64, cr: f64) -> Self {
        LayerSpec::FixedDe { strategy, f, cr }
    }

    pub fn label(&self) -> String {
        match self {
            LayerSpec::Shade { .. } => "shade".into(),
            LayerSpec::Bide { .. } => "bide".into(),
            LayerSpec::FixedDe { strategy, .. } => format!("de/{strategy}/bin"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        match *self {
            LayerSpec::Shade {
                memory_f,
                memory_cr,
                history,
                ..
            } => {
                if !(memory_f > 0.0 && memory_f <= 1.0) {
                    return Err(Error::InvalidConfig(format!("memory_f {memory_f} not in (0,1]")));
                }
                if !(0.0..=1.0).contains(&memory_cr) {
                    return Err(Error::InvalidConfig(format!("memory_cr {memory_cr} not in [0,1]")));
                }
                if history == Some(0) {
                    return Err(Error::InvalidConfig("history length must be >= 1".into()));
                }
            }
            LayerSpec::Bide { .. } => {}
            LayerSpec::FixedDe { f, cr, .. } => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::InvalidConfig(format!("F {f} not in (0,1]")));
                }
                if !(0.0..=1.0).contains(&cr) {
                    return Err(Error::InvalidConfig(format!("CR {cr} not in [0,1]")));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self, id: usize, np: usize, rng: &mut RandomSource) -> Box<dyn Layer> {
        match *self {
            LayerSpec::Shade {
                memory_f,
                memory_cr,
                history,
                archive,
            } => Box::new(ShadeLayer::new(
                id,
                history.unwrap_or(np),
                memory_f,
                memory_cr,
                if archive { np } else { 0 },
            )),
            LayerSpec::Bide { archive } => {
                Box::new(BideLayer::new(id, np, if archive { np } else { 0 }, rng))
            }
            LayerSpec::FixedDe { strategy, f, cr } => {
                Box::new(FixedDeLayer::new(id, strategy, f, cr))
            }
        }
    }
}

/// Redraws until the value is positive, then caps it at 1.
pub fn positive_capped(mut draw: impl FnMut() -> f64) -> f64 {
    loop {
        let v = draw();
        if v > 0.0 {
            return v.min(1.0);
        }
    }
}

pub fn weighted_lehmer_mean(values: &[f64], weights: &[f64]) -> f64 {
    let num: f64 = values.iter().zip(weights).map(|(v, w)| w * v * v).sum();
    let den: f64 = values.iter().zip(weights).map(|(v, w)| w * v).sum();
    num / den
}

pub fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(v, w)| w * v).sum()
}

/// Shared current-to-pbest/1/bin engine of the SHADE and BiDE layers.
fn pbest_trial(
    i: usize,
    view: &GenerationView<'_>,
    archive: &Archive,
    f: f64,
    cr: f64,
    rng: &mut RandomSource,
) -> Result<(Genome, Vec<usize>)> {
    let np = view.population.len();
    let p_min = 2.0 / np as f64;
    let p = if p_min < PBEST_MAX {
        rng.uniform_in(p_min, PBEST_MAX)
    } else {
        p_min
    };
    let mutant = mutate_current_to_pbest(i, view.population, view.ranking, archive, f, p, rng)?;
    let target = view.population.genome(i);
    let trial = crossover_binomial(target, &mutant.genome, cr, rng);
    Ok((repair_bounds(trial, target, view.bounds), mutant.donors))
}

/// Success-history parameter adaptation over current-to-pbest/1/bin.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadeLayer {
    id: usize,
    memory_f: Vec<f64>,
    memory_cr: Vec<f64>,
    write_index: usize,
    archive: Archive,
    success_f: Vec<f64>,
    success_cr: Vec<f64>,
    success_gain: Vec<f64>,
}

impl ShadeLayer {
    pub fn new(
        id: usize,
        history: usize,
        memory_f: f64,
        memory_cr: f64,
        archive_capacity: usize,
    ) -> Self {
        Self {
            id,
            memory_f: vec![memory_f; history],
            memory_cr: vec![memory_cr; history],
            write_index: 0,
            archive: Archive::new(archive_capacity),
            success_f: Vec::new(),
            success_cr: Vec::new(),
            success_gain: Vec::new(),
        }
    }

    pub fn memory_f(&self) -> &[f64] {
        &self.memory_f
    }

    pub fn memory_cr(&self) -> &[f64] {
        &self.memory_cr
    }

    pub fn write_index(&self) -> usize {
        self.write_index
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    /// Successful (F, CR, Δf) triples recorded this generation.
    pub fn successes(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.success_f, &self.success_cr, &self.success_gain)
    }

    pub fn record_success(&mut self, f: f64, cr: f64, gain: f64) {
        self.success_f.push(f);
        self.success_cr.push(cr);
        self.success_gain.push(gain);
    }

    pub fn sample_parameters(&self, rng: &mut RandomSource) -> (f64, f64) {
        let r = rng.below(self.memory_f.len());
        let cr = rng
            .normal(self.memory_cr[r], PARAMETER_SCALE)
            .clamp(0.0, 1.0);
        let loc = self.memory_f[r];
        let f = positive_capped(|| rng.cauchy(loc, PARAMETER_SCALE));
        (f, cr)
    }
}

impl Layer for ShadeLayer {
    fn id(&self) -> usize {
        self.id
    }

    fn name(&self) -> &'static str {
        "shade"
    }

    fn propose(
        &self,
        i: usize,
        view: &GenerationView<'_>,
        rng: &mut RandomSource,
    ) -> Result<TrialProposal> {
        let (f, cr) = self.sample_parameters(rng);
        let (trial, donors) = pbest_trial(i, view, &self.archive, f, cr, rng)?;
        Ok(TrialProposal {
            trial,
            layer_id: self.id,
            f,
            cr,
            donors,
        })
    }

    fn feedback(
        &mut self,
        _i: usize,
        proposal: &TrialProposal,
        target: &Individual,
        trial_fitness: f64,
        rng: &mut RandomSource,
    ) {
        if trial_fitness < target.fitness {
            self.record_success(proposal.f, proposal.cr, target.fitness - trial_fitness);
            self.archive.insert(target.genome.clone(), rng);
        }
    }

    fn end_generation(&mut self) {
        if self.success_f.is_empty() {
            return;
        }
        let total: f64 = self.success_gain.iter().sum();
        let weights: Vec<f64> = self.success_gain.iter().map(|g| g / total).collect();
        let k = self.write_index;
        self.memory_f[k] = weighted_lehmer_mean(&self.success_f, &weights);
        self.memory_cr[k] = weighted_mean(&self.success_cr, &weights).clamp(0.0, 1.0);
        self.write_index = (k + 1) % self.memory_f.len();
        self.success_f.clear();
        self.success_cr.clear();
        self.success_gain.clear();
    }
}

/// Location pairs of the bimodal Cauchy parameter draws.
pub const BIMODAL_F: (f64, f64) = (0.65, 1.0);
pub const BIMODAL_CR: (f64, f64) = (0.1, 0.95);

/// One (F, CR) pair from the bimodal self-adaptive scheme.
pub fn bimodal_sample(rng: &mut RandomSource) -> (f64, f64) {
    let f_loc = if rng.coin() { BIMODAL_F.0 } else { BIMODAL_F.1 };
    let f = positive_capped(|| rng.cauchy(f_loc, PARAMETER_SCALE));
    let cr_loc = if rng.coin() { BIMODAL_CR.0 } else { BIMODAL_CR.1 };
    let cr = rng.cauchy(cr_loc, PARAMETER_SCALE).clamp(0.0, 1.0);
    (f, cr)
}

/// SHADE's mutation engine with per-individual bimodal parameters that are
/// kept on success and resampled on failure.
#[derive(Debug, Clone, PartialEq)]
pub struct BideLayer {
    id: usize,
    memory: Vec<(f64, f64)>,
    archive: Archive,
}

impl BideLayer {
    pub fn new(id: usize, np: usize, archive_capacity: usize, rng: &mut RandomSource) -> Self {
        Self {
            id,
            memory: (0..np).map(|_| bimodal_sample(rng)).collect(),
            archive: Archive::new(archive_capacity),
        }
    }

    pub fn parameters(&self, i: usize) -> (f64, f64) {
        self.memory[i]
    }

    pub fn set_parameters(&mut self, i: usize, f: f64, cr: f64) {
        self.memory[i] = (f, cr);
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }
}

impl Layer for BideLayer {
    fn id(&self) -> usize {
        self.id
    }

    fn name(&self) -> &'static str {
        "bide"
    }

    fn propose(
        &self,
        i: usize,
        view: &GenerationView<'_>,
        rng: &mut RandomSource,
    ) -> Result<TrialProposal> {
        let (f, cr) = self.memory[i];
        let (trial, donors) = pbest_trial(i, view, &self.archive, f, cr, rng)?;
        Ok(TrialProposal {
            trial,
            layer_id: self.id,
            f,
            cr,
            donors,
        })
    }

    fn feedback(
        &mut self,
        i: usize,
        _proposal: &TrialProposal,
        target: &Individual,
        trial_fitness: f64,
        rng: &mut RandomSource,
    ) {
        if trial_fitness < target.fitness {
            self.archive.insert(target.genome.clone(), rng);
        } else {
            self.memory[i] = bimodal_sample(rng);
        }
    }

    fn end_generation(&mut self) {}
}

/// Classic DE with constant F, CR and strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedDeLayer {
    id: usize,
    strategy: MutationStrategy,
    f: f64,
    cr: f64,
}

impl FixedDeLayer {
    pub fn new(id: usize, strategy: MutationStrategy, f: f64, cr: f64) -> Self {
        Self { id, strategy, f, cr }
    }
}

impl Layer for FixedDeLayer {
    fn id(&self) -> usize {
        self.id
    }

    fn name(&self) -> &'static str {
        "fixed-de"
    }

    fn propose(
        &self,
        i: usize,
        view: &GenerationView<'_>,
        rng: &mut RandomSource,
    ) -> Result<TrialProposal> {
        let mutant = mutate_classic(self.strategy, i, view.population, view.best(), self.f, rng)?;
        let target = view.population.genome(i);
        let trial = crossover_binomial(target, &mutant.genome, self.cr, rng);
        Ok(TrialProposal {
            trial: repair_bounds(trial, target, view.bounds),
            layer_id: self.id,
            f: self.f,
            cr: self.cr,
            donors: mutant.donors,
        })
    }

    fn feedback(&mut self, _: usize, _: &TrialProposal, _: &Individual, _: f64, _: &mut RandomSource) {}

    fn end_generation(&mut self) {}
}
