//! Classic DE variation operators: the five textbook mutation strategies,
//! current-to-pbest/1 with an optional archive, binomial crossover and
//! one-to-one survivor selection.
//!
//! Population indices are zero-based throughout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::types::{Genome, Individual, Population};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MutationStrategy {
    #[serde(rename = "rand/1")]
    Rand1,
    #[serde(rename = "best/1")]
    Best1,
    #[serde(rename = "rand/2")]
    Rand2,
    #[serde(rename = "best/2")]
    Best2,
    #[serde(rename = "current-to-best/1")]
    CurrentToBest1,
}

impl MutationStrategy {
    pub const ALL: [MutationStrategy; 5] = [
        MutationStrategy::Rand1,
        MutationStrategy::Best1,
        MutationStrategy::Rand2,
        MutationStrategy::Best2,
        MutationStrategy::CurrentToBest1,
    ];

    /// Distinct donors required, none equal to the target.
    pub fn donor_count(self) -> usize {
        match self {
            MutationStrategy::Rand1 => 3,
            MutationStrategy::Best1 => 2,
            MutationStrategy::Rand2 => 5,
            MutationStrategy::Best2 => 4,
            MutationStrategy::CurrentToBest1 => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MutationStrategy::Rand1 => "rand/1",
            MutationStrategy::Best1 => "best/1",
            MutationStrategy::Rand2 => "rand/2",
            MutationStrategy::Best2 => "best/2",
            MutationStrategy::CurrentToBest1 => "current-to-best/1",
        }
    }
}

impl fmt::Display for MutationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MutationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown mutation strategy `{s}`")))
    }
}

/// External archive of defeated parents, bounded by `capacity`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Archive {
    members: Vec<Genome>,
    capacity: usize,
}

impl Archive {
    pub fn new(capacity: usize) -> Self {
        Self {
            members: Vec::with_capacity(capacity + 1),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Genome] {
        &self.members
    }

    pub fn get(&self, k: usize) -> &Genome {
        &self.members[k]
    }

    /// Adds a genome; on overflow a uniformly random member is evicted.
    pub fn insert(&mut self, genome: Genome, rng: &mut RandomSource) {
        if self.capacity == 0 {
            return;
        }
        self.members.push(genome);
        if self.members.len() > self.capacity {
            let victim = rng.below(self.members.len());
            self.members.swap_remove(victim);
        }
    }
}

/// A mutant vector with the donor indices that built it, in formula order.
/// For current-to-pbest/1 the last index may point past the population, in
/// which case it addresses `archive[index - NP]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mutant {
    pub genome: Genome,
    pub donors: Vec<usize>,
}

/// Draws `count` distinct indices from `0..np`, avoiding `exclude`.
pub fn sample_distinct(
    count: usize,
    exclude: &[usize],
    np: usize,
    rng: &mut RandomSource,
) -> Result<Vec<usize>> {
    let excluded = exclude.iter().filter(|&&e| e < np).count();
    let free = np.saturating_sub(excluded);
    if count > free {
        return Err(Error::InsufficientPopulation {
            needed: count + excluded,
            available: np,
        });
    }
    let mut picked = Vec::with_capacity(count);
    if 2 * count <= free {
        while picked.len() < count {
            let r = rng.below(np);
            if !exclude.contains(&r) && !picked.contains(&r) {
                picked.push(r);
            }
        }
    } else {
        let mut pool: Vec<usize> = (0..np).filter(|r| !exclude.contains(r)).collect();
        for k in 0..count {
            let j = k + rng.below(pool.len() - k);
            pool.swap(k, j);
            picked.push(pool[k]);
        }
    }
    Ok(picked)
}

fn add_scaled_difference(out: &mut [f64], f: f64, a: &[f64], b: &[f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o += f * (x - y);
    }
}

/// Builds the mutant of `strategy` from explicit vectors. `donors` must hold
/// at least `strategy.donor_count()` genomes.
pub fn classic_mutant(
    strategy: MutationStrategy,
    target: &[f64],
    best: &[f64],
    donors: &[&[f64]],
    f: f64,
) -> Genome {
    let d = donors;
    let mut v = match strategy {
        MutationStrategy::Rand1 | MutationStrategy::Rand2 => d[0].to_vec(),
        MutationStrategy::Best1 | MutationStrategy::Best2 => best.to_vec(),
        MutationStrategy::CurrentToBest1 => target.to_vec(),
    };
    match strategy {
        MutationStrategy::Rand1 => add_scaled_difference(&mut v, f, d[1], d[2]),
        MutationStrategy::Best1 => add_scaled_difference(&mut v, f, d[0], d[1]),
        MutationStrategy::Rand2 => {
            add_scaled_difference(&mut v, f, d[1], d[2]);
            add_scaled_difference(&mut v, f, d[3], d[4]);
        }
        MutationStrategy::Best2 => {
            add_scaled_difference(&mut v, f, d[0], d[1]);
            add_scaled_difference(&mut v, f, d[2], d[3]);
        }
        MutationStrategy::CurrentToBest1 => {
            add_scaled_difference(&mut v, f, best, target);
            add_scaled_difference(&mut v, f, d[0], d[1]);
        }
    }
    Genome(v)
}

/// Mutation by one of the classic strategies. `best` is the index of the
/// generation's best member, fixed by the caller at generation start.
pub fn mutate_classic(
    strategy: MutationStrategy,
    target: usize,
    population: &Population,
    best: usize,
    f: f64,
    rng: &mut RandomSource,
) -> Result<Mutant> {
    let donors = sample_distinct(strategy.donor_count(), &[target], population.len(), rng)?;
    let vectors: Vec<&[f64]> = donors.iter().map(|&r| &population.genome(r)[..]).collect();
    let genome = classic_mutant(
        strategy,
        population.genome(target),
        population.genome(best),
        &vectors,
        f,
    );
    Ok(Mutant { genome, donors })
}

/// `x_i + F(x_pbest − x_i) + F(x_r1 − x_r2)`.
pub fn current_to_pbest_mutant(
    target: &[f64],
    pbest: &[f64],
    r1: &[f64],
    r2: &[f64],
    f: f64,
) -> Genome {
    let mut v = target.to_vec();
    add_scaled_difference(&mut v, f, pbest, target);
    add_scaled_difference(&mut v, f, r1, r2);
    Genome(v)
}

/// current-to-pbest/1. `ranking` lists member indices from best to worst;
/// `x_pbest` is drawn uniformly from its first ⌈p·NP⌉ entries.
pub fn mutate_current_to_pbest(
    target: usize,
    population: &Population,
    ranking: &[usize],
    archive: &Archive,
    f: f64,
    p: f64,
    rng: &mut RandomSource,
) -> Result<Mutant> {
    let np = population.len();
    if np < 3 {
        return Err(Error::InsufficientPopulation {
            needed: 3,
            available: np,
        });
    }
    let top = ((p * np as f64).ceil() as usize).clamp(1, np);
    let pbest = ranking[rng.below(top)];
    let r1 = sample_distinct(1, &[target], np, rng)?[0];
    let pool = np + archive.len();
    let r2 = loop {
        let r = rng.below(pool);
        if r != target && r != r1 {
            break r;
        }
    };
    let r2_genome = if r2 < np {
        population.genome(r2)
    } else {
        archive.get(r2 - np)
    };
    let genome = current_to_pbest_mutant(
        population.genome(target),
        population.genome(pbest),
        population.genome(r1),
        r2_genome,
        f,
    );
    Ok(Mutant {
        genome,
        donors: vec![pbest, r1, r2],
    })
}

/// Binomial crossover: each coordinate comes from the mutant with
/// probability `cr`, and coordinate `j_rand` always does.
pub fn crossover_binomial(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut RandomSource,
) -> Genome {
    debug_assert_eq!(target.len(), mutant.len());
    let j_rand = rng.below(target.len());
    Genome(
        target
            .iter()
            .zip(mutant)
            .enumerate()
            .map(|(j, (&t, &m))| {
                if rng.uniform() < cr || j == j_rand {
                    m
                } else {
                    t
                }
            })
            .collect(),
    )
}

/// The trial replaces the target when `f(trial) ≤ f(target)`.
pub fn select_survivor(target: Individual, trial: Individual) -> (Individual, bool) {
    if trial.fitness <= target.fitness {
        (trial, true)
    } else {
        (target, false)
    }
}
