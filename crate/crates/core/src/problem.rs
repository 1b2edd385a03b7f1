//! Objective functions, evaluation budgeting, bound repair and error reporting.

use crate::error::{Error, Result};
use crate::types::{Bounds, Genome};

/// Error values strictly below this floor are reported as zero.
pub const ERROR_FLOOR: f64 = 1e-8;

/// A box-constrained minimization problem with a known optimum value.
///
/// `value` must be deterministic and free of side effects; runs on
/// different threads may call it concurrently.
pub trait Problem: Send + Sync {
    fn id(&self) -> &str;

    fn bounds(&self) -> &Bounds;

    fn optimum_value(&self) -> f64;

    fn value(&self, x: &[f64]) -> f64;

    fn dimension(&self) -> usize {
        self.bounds().dimension()
    }
}

/// Problem backed by a plain function.
pub struct FunctionProblem {
    id: String,
    bounds: Bounds,
    optimum: f64,
    f: fn(&[f64]) -> f64,
}

impl FunctionProblem {
    pub fn new(id: impl Into<String>, bounds: Bounds, optimum: f64, f: fn(&[f64]) -> f64) -> Self {
        Self {
            id: id.into(),
            bounds,
            optimum,
            f,
        }
    }

    /// Σx² on [lower, upper]^D.
    pub fn sphere(dimension: usize, lower: f64, upper: f64) -> Result<Self> {
        Ok(Self::new(
            "sphere",
            Bounds::uniform(dimension, lower, upper)?,
            0.0,
            |x| x.iter().map(|v| v * v).sum(),
        ))
    }
}

impl Problem for FunctionProblem {
    fn id(&self) -> &str {
        &self.id
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn optimum_value(&self) -> f64 {
        self.optimum
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Objective-call allowance for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    max_evaluations: u64,
    used: u64,
}

impl Budget {
    pub fn new(max_evaluations: u64) -> Self {
        Self {
            max_evaluations,
            used: 0,
        }
    }

    /// `multiplier × D` evaluations (10⁴ × D is the usual benchmark rule).
    pub fn for_dimension(dimension: usize, multiplier: u64) -> Self {
        Self::new(multiplier * dimension as u64)
    }

    pub fn max_evaluations(&self) -> u64 {
        self.max_evaluations
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.max_evaluations - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max_evaluations
    }
}

/// Evaluates `genome`, charging one call to `budget`.
pub fn evaluate(problem: &dyn Problem, genome: &[f64], budget: &mut Budget) -> Result<f64> {
    if budget.is_exhausted() {
        return Err(Error::BudgetExhausted { used: budget.used });
    }
    if genome.len() != problem.dimension() {
        return Err(Error::DimensionMismatch {
            expected: problem.dimension(),
            actual: genome.len(),
        });
    }
    if let Some((index, value)) = problem.bounds().violation(genome) {
        return Err(Error::DomainViolation { index, value });
    }
    budget.used += 1;
    Ok(problem.value(genome))
}

/// Pulls out-of-range coordinates back to the midpoint between the violated
/// bound and the parent's coordinate.
pub fn repair_bounds(mut child: Genome, parent: &[f64], bounds: &Bounds) -> Genome {
    for (j, c) in child.iter_mut().enumerate() {
        let (lo, hi) = (bounds.lower()[j], bounds.upper()[j]);
        if *c < lo {
            *c = (lo + parent[j]) / 2.0;
        } else if *c > hi {
            *c = (hi + parent[j]) / 2.0;
        } else if c.is_nan() {
            *c = parent[j];
        }
    }
    child
}

/// `max(fitness − optimum, 0)`, floored to zero below [`ERROR_FLOOR`].
pub fn error_value(fitness: f64, optimum: f64) -> f64 {
    let err = (fitness - optimum).max(0.0);
    if err < ERROR_FLOOR {
        0.0
    } else {
        err
    }
}
