use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Box constraints `lower[j] < upper[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidConfig(format!(
                "bounds length mismatch: {} lower vs {} upper",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::InvalidConfig("bounds must have dimension >= 1".into()));
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "bounds at coordinate {j} are not an interval: [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Same interval on every coordinate.
    pub fn uniform(dimension: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dimension], vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// First coordinate outside the box, if any.
    pub fn violation(&self, x: &[f64]) -> Option<(usize, f64)> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .position(|(v, (lo, hi))| !(*v >= *lo && *v <= *hi))
            .map(|j| (j, x[j]))
    }

    pub fn sample(&self, rng: &mut RandomSource) -> Genome {
        Genome(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(&lo, &hi)| rng.uniform_in(lo, hi))
                .collect(),
        )
    }
}

/// A point in the search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genome(pub Vec<f64>);

impl Genome {
    pub fn new(coordinates: Vec<f64>) -> Self {
        Self(coordinates)
    }

    pub fn zeros(dimension: usize) -> Self {
        Self(vec![0.0; dimension])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Genome {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Genome {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Genome {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// An evaluated candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Genome,
    pub fitness: f64,
}

impl Individual {
    pub fn new(genome: Genome, fitness: f64) -> Self {
        Self { genome, fitness }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Self {
            members,
            generation: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn genome(&self, i: usize) -> &Genome {
        &self.members[i].genome
    }

    pub fn fitness(&self, i: usize) -> f64 {
        self.members[i].fitness
    }

    /// Index of the smallest fitness; ties go to the lower index.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, m) in self.members.iter().enumerate().skip(1) {
            if m.fitness < self.members[best].fitness {
                best = i;
            }
        }
        best
    }

    /// Member indices ordered from best to worst fitness, ties by index.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by(|&a, &b| {
            self.members[a]
                .fitness
                .total_cmp(&self.members[b].fitness)
                .then(a.cmp(&b))
        });
        order
    }
}
