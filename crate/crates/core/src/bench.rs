//! A seeded twelve-function benchmark suite with the four classic CEC
//! categories: unimodal, simple multimodal, hybrid and composition.
//!
//! All problems live on `[-100, 100]^D`. Shift vectors are drawn from
//! `[-80, 80]^D` and rotations are random orthogonal matrices, all derived
//! deterministically from the suite seed.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::{E, PI};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::RandomSource;
use crate::types::Bounds;

pub const DOMAIN: (f64, f64) = (-100.0, 100.0);
pub const SHIFT_RANGE: f64 = 80.0;
pub const SUITE_SIZE: usize = 12;

/// Optimum of `z·sin(√z)` used by the modified Schwefel function.
const SCHWEFEL_SHIFT: f64 = 420.968_746_227_503_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseFunction {
    Sphere,
    Elliptic,
    BentCigar,
    Discus,
    Rosenbrock,
    Ackley,
    Rastrigin,
    Griewank,
    ModSchwefel,
}

impl BaseFunction {
    pub const ALL: [BaseFunction; 9] = [
        BaseFunction::Sphere,
        BaseFunction::Elliptic,
        BaseFunction::BentCigar,
        BaseFunction::Discus,
        BaseFunction::Rosenbrock,
        BaseFunction::Ackley,
        BaseFunction::Rastrigin,
        BaseFunction::Griewank,
        BaseFunction::ModSchwefel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseFunction::Sphere => "sphere",
            BaseFunction::Elliptic => "elliptic",
            BaseFunction::BentCigar => "bent_cigar",
            BaseFunction::Discus => "discus",
            BaseFunction::Rosenbrock => "rosenbrock",
            BaseFunction::Ackley => "ackley",
            BaseFunction::Rastrigin => "rastrigin",
            BaseFunction::Griewank => "griewank",
            BaseFunction::ModSchwefel => "mod_schwefel",
        }
    }

    /// Value at `z`, already shifted and rotated. Minimum 0 at the origin.
    pub fn eval(self, z: &[f64]) -> f64 {
        let d = z.len();
        if d == 0 {
            return 0.0;
        }
        let v = match self {
            BaseFunction::Sphere => z.iter().map(|x| x * x).sum(),
            BaseFunction::Elliptic => {
                let denom = (d.max(2) - 1) as f64;
                z.iter()
                    .enumerate()
                    .map(|(i, x)| 1e6f64.powf(i as f64 / denom) * x * x)
                    .sum()
            }
            BaseFunction::BentCigar => {
                z[0] * z[0] + 1e6 * z[1..].iter().map(|x| x * x).sum::<f64>()
            }
            BaseFunction::Discus => 1e6 * z[0] * z[0] + z[1..].iter().map(|x| x * x).sum::<f64>(),
            BaseFunction::Rosenbrock => {
                let y: Vec<f64> = z.iter().map(|x| x * 2.048 / 100.0 + 1.0).collect();
                y.windows(2)
                    .map(|w| {
                        let a = w[0] * w[0] - w[1];
                        let b = w[0] - 1.0;
                        100.0 * a * a + b * b
                    })
                    .sum()
            }
            BaseFunction::Ackley => {
                let n = d as f64;
                let sq = (z.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
                let cs = z.iter().map(|x| (2.0 * PI * x).cos()).sum::<f64>() / n;
                (20.0 - 20.0 * (-0.2 * sq).exp()) + (E - cs.exp())
            }
            BaseFunction::Rastrigin => z
                .iter()
                .map(|x| {
                    let y = x * 5.12 / 100.0;
                    y * y - 10.0 * (2.0 * PI * y).cos() + 10.0
                })
                .sum(),
            BaseFunction::Griewank => {
                let mut sum = 0.0;
                let mut prod = 1.0;
                for (i, x) in z.iter().enumerate() {
                    let y = x * 600.0 / 100.0;
                    sum += y * y / 4000.0;
                    prod *= (y / ((i + 1) as f64).sqrt()).cos();
                }
                sum - prod + 1.0
            }
            BaseFunction::ModSchwefel => {
                let peak = SCHWEFEL_SHIFT * SCHWEFEL_SHIFT.sqrt().sin();
                let n = d as f64;
                z.iter()
                    .map(|x| {
                        let y = x * 1000.0 / 100.0 + SCHWEFEL_SHIFT;
                        let g = if y > 500.0 {
                            let h = 500.0 - y % 500.0;
                            h * h.sqrt().sin() - (y - 500.0) * (y - 500.0) / (10_000.0 * n)
                        } else if y < -500.0 {
                            let h = y.abs() % 500.0 - 500.0;
                            h * h.abs().sqrt().sin() - (y + 500.0) * (y + 500.0) / (10_000.0 * n)
                        } else {
                            y * y.abs().sqrt().sin()
                        };
                        peak - g
                    })
                    .sum()
            }
        };
        v.max(0.0)
    }
}

impl fmt::Display for BaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Unimodal,
    Multimodal,
    Hybrid,
    Composition,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Unimodal => "unimodal",
            Category::Multimodal => "multimodal",
            Category::Hybrid => "hybrid",
            Category::Composition => "composition",
        })
    }
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        if self.n == 0 {
            return Vec::new();
        }
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `max |(QᵀQ − I)_{ij}|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.get(k, i) * self.get(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    fn hash_into(&self, h: &mut impl Hasher) {
        self.n.hash(h);
        for v in &self.data {
            v.to_bits().hash(h);
        }
    }
}

/// Random orthogonal matrix: Gram–Schmidt (applied twice) on the columns
/// of a standard-normal matrix.
pub fn random_rotation(dimension: usize, rng: &mut RandomSource) -> Matrix {
    let n = dimension;
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.normal(0.0, 1.0)).collect())
        .collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let dot: f64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a * b).sum();
                let (head, tail) = cols.split_at_mut(j);
                for (a, b) in tail[0].iter_mut().zip(&head[k]) {
                    *a -= dot * b;
                }
            }
        }
        let norm = cols[j].iter().map(|a| a * a).sum::<f64>().sqrt();
        for a in &mut cols[j] {
            *a /= norm;
        }
    }
    let mut data = vec![0.0; n * n];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            data[i * n + j] = *v;
        }
    }
    Matrix { n, data }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridBlock {
    pub base: BaseFunction,
    pub rotation: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub base: BaseFunction,
    pub shift: Vec<f64>,
    pub rotation: Matrix,
    pub sigma: f64,
    pub lambda: f64,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Simple {
        base: BaseFunction,
        shift: Vec<f64>,
        rotation: Option<Matrix>,
    },
    Hybrid {
        shift: Vec<f64>,
        permutation: Vec<usize>,
        blocks: Vec<HybridBlock>,
    },
    Composition {
        components: Vec<Component>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchProblem {
    id: String,
    name: String,
    category: Category,
    bias: f64,
    bounds: Bounds,
    kind: Kind,
}

fn domain(dimension: usize) -> Bounds {
    Bounds::uniform(dimension, DOMAIN.0, DOMAIN.1).expect("dimension >= 1")
}

impl BenchProblem {
    /// `bias + base(Q·(x − o))`, or unrotated when `rotation` is `None`.
    pub fn simple(
        id: impl Into<String>,
        category: Category,
        base: BaseFunction,
        shift: Vec<f64>,
        rotation: Option<Matrix>,
        bias: f64,
    ) -> Self {
        let rotated = rotation.is_some();
        Self {
            id: id.into(),
            name: format!("{}{}", if rotated { "rotated " } else { "shifted " }, base),
            category,
            bias,
            bounds: domain(shift.len()),
            kind: Kind::Simple {
                base,
                shift,
                rotation,
            },
        }
    }

    /// Shift, permute, then hand consecutive blocks to their own rotated base.
    /// Block sizes come from the rotation dimensions.
    pub fn hybrid(
        id: impl Into<String>,
        shift: Vec<f64>,
        permutation: Vec<usize>,
        blocks: Vec<HybridBlock>,
        bias: f64,
    ) -> Self {
        let d = shift.len();
        assert_eq!(permutation.len(), d);
        assert_eq!(blocks.iter().map(|b| b.rotation.dimension()).sum::<usize>(), d);
        let name = format!(
            "hybrid({})",
            blocks.iter().map(|b| b.base.name()).collect::<Vec<_>>().join(",")
        );
        Self {
            id: id.into(),
            name,
            category: Category::Hybrid,
            bias,
            bounds: domain(d),
            kind: Kind::Hybrid {
                shift,
                permutation,
                blocks,
            },
        }
    }

    pub fn composition(id: impl Into<String>, components: Vec<Component>, bias: f64) -> Self {
        let d = components[0].shift.len();
        let name = format!(
            "composition({})",
            components.iter().map(|c| c.base.name()).collect::<Vec<_>>().join(",")
        );
        Self {
            id: id.into(),
            name,
            category: Category::Composition,
            bias,
            bounds: domain(d),
            kind: Kind::Composition { components },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// Global minimizer (the first component center for compositions).
    pub fn optimum_location(&self) -> &[f64] {
        match &self.kind {
            Kind::Simple { shift, .. } | Kind::Hybrid { shift, .. } => shift,
            Kind::Composition { components } => &components[0].shift,
        }
    }

    /// Every rotation matrix the problem applies.
    pub fn rotations(&self) -> Vec<&Matrix> {
        match &self.kind {
            Kind::Simple { rotation, .. } => rotation.iter().collect(),
            Kind::Hybrid { blocks, .. } => blocks.iter().map(|b| &b.rotation).collect(),
            Kind::Composition { components } => components.iter().map(|c| &c.rotation).collect(),
        }
    }

    pub fn components(&self) -> &[Component] {
        match &self.kind {
            Kind::Composition { components } => components,
            _ => &[],
        }
    }

    /// Evaluates `x`, rejecting points outside the domain.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.bounds.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.bounds.dimension(),
                actual: x.len(),
            });
        }
        if let Some((index, value)) = self.bounds.violation(x) {
            return Err(Error::DomainViolation { index, value });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Simple {
                base,
                shift,
                rotation,
            } => {
                let z: Vec<f64> = x.iter().zip(shift).map(|(a, o)| a - o).collect();
                let z = match rotation {
                    Some(q) => q.apply(&z),
                    None => z,
                };
                self.bias + base.eval(&z)
            }
            Kind::Hybrid {
                shift,
                permutation,
                blocks,
            } => {
                let z: Vec<f64> = permutation.iter().map(|&j| x[j] - shift[j]).collect();
                let mut start = 0;
                let mut total = 0.0;
                for block in blocks {
                    let len = block.rotation.dimension();
                    let part = block.rotation.apply(&z[start..start + len]);
                    total += block.base.eval(&part);
                    start += len;
                }
                self.bias + total
            }
            Kind::Composition { components } => self.bias + composition_value(components, x),
        }
    }

    /// Stable digest of all generated data.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.id.hash(&mut h);
        self.bias.to_bits().hash(&mut h);
        match &self.kind {
            Kind::Simple {
                base,
                shift,
                rotation,
            } => {
                base.hash(&mut h);
                shift.iter().for_each(|v| v.to_bits().hash(&mut h));
                if let Some(q) = rotation {
                    q.hash_into(&mut h);
                }
            }
            Kind::Hybrid {
                shift,
                permutation,
                blocks,
            } => {
                shift.iter().for_each(|v| v.to_bits().hash(&mut h));
                permutation.hash(&mut h);
                for b in blocks {
                    b.base.hash(&mut h);
                    b.rotation.hash_into(&mut h);
                }
            }
            Kind::Composition { components } => {
                for c in components {
                    c.base.hash(&mut h);
                    c.shift.iter().for_each(|v| v.to_bits().hash(&mut h));
                    c.rotation.hash_into(&mut h);
                    for v in [c.sigma, c.lambda, c.offset] {
                        v.to_bits().hash(&mut h);
                    }
                }
            }
        }
        h.finish()
    }
}

/// Distance-weighted blend of the components. A point sitting exactly on a
/// center takes that component's value alone.
fn composition_value(components: &[Component], x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq_dist: Vec<f64> = components
        .iter()
        .map(|c| x.iter().zip(&c.shift).map(|(a, o)| (a - o) * (a - o)).sum())
        .collect();
    let values: Vec<f64> = components
        .iter()
        .map(|c| {
            let z: Vec<f64> = x.iter().zip(&c.shift).map(|(a, o)| a - o).collect();
            c.lambda * c.base.eval(&c.rotation.apply(&z)) + c.offset
        })
        .collect();
    if let Some(k) = sq_dist.iter().position(|&s| s == 0.0) {
        return values[k];
    }
    // log w_k = −‖x−o_k‖² / (2Dσ_k²) − ln ‖x−o_k‖, normalized in log space.
    let log_w: Vec<f64> = components
        .iter()
        .zip(&sq_dist)
        .map(|(c, &s)| -s / (2.0 * d * c.sigma * c.sigma) - 0.5 * s.ln())
        .collect();
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter().zip(&values).map(|(wk, v)| wk / total * v).sum()
}

impl Problem for BenchProblem {
    fn id(&self) -> &str {
        &self.id
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn optimum_value(&self) -> f64 {
        self.bias
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }
}

fn random_shift(d: usize, rng: &mut RandomSource) -> Vec<f64> {
    (0..d).map(|_| rng.uniform_in(-SHIFT_RANGE, SHIFT_RANGE)).collect()
}

fn random_permutation(d: usize, rng: &mut RandomSource) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    for k in (1..d).rev() {
        p.swap(k, rng.below(k + 1));
    }
    p
}

/// Block sizes for fractions (0.3, 0.3, 0.4).
fn hybrid_sizes(d: usize) -> [usize; 3] {
    let a = (0.3 * d as f64).ceil() as usize;
    let b = ((0.3 * d as f64).ceil() as usize).min(d - a);
    [a, b, d - a - b]
}

/// The twelve-problem suite for dimension `d`; deterministic in `seed`.
pub fn make_suite(d: usize, seed: u64) -> Result<Vec<BenchProblem>> {
    if d < 2 {
        return Err(Error::InvalidConfig(format!("suite dimension {d} < 2")));
    }
    let base_rng = RandomSource::new(seed);
    let mut suite = Vec::with_capacity(SUITE_SIZE);
    let next = |k: usize| base_rng.fork(k as u64 + 1);
    let bias = |k: usize| 100.0 * (k + 1) as f64;

    let simple: [(Category, BaseFunction, bool); 8] = [
        (Category::Unimodal, BaseFunction::Elliptic, true),
        (Category::Unimodal, BaseFunction::BentCigar, true),
        (Category::Multimodal, BaseFunction::Rosenbrock, true),
        (Category::Multimodal, BaseFunction::Ackley, true),
        (Category::Multimodal, BaseFunction::Rastrigin, true),
        (Category::Multimodal, BaseFunction::Griewank, true),
        (Category::Multimodal, BaseFunction::ModSchwefel, true),
        (Category::Multimodal, BaseFunction::Rastrigin, false),
    ];
    for (k, (category, base, rotated)) in simple.into_iter().enumerate() {
        let mut rng = next(k);
        let shift = random_shift(d, &mut rng);
        let rotation = rotated.then(|| random_rotation(d, &mut rng));
        suite.push(BenchProblem::simple(
            format!("F{}", k + 1),
            category,
            base,
            shift,
            rotation,
            bias(k),
        ));
    }

    let hybrids: [[BaseFunction; 3]; 2] = [
        [BaseFunction::ModSchwefel, BaseFunction::Rastrigin, BaseFunction::Elliptic],
        [BaseFunction::BentCigar, BaseFunction::Rosenbrock, BaseFunction::Ackley],
    ];
    for (h, bases) in hybrids.into_iter().enumerate() {
        let k = 8 + h;
        let mut rng = next(k);
        let shift = random_shift(d, &mut rng);
        let permutation = random_permutation(d, &mut rng);
        let blocks = bases
            .iter()
            .zip(hybrid_sizes(d))
            .map(|(&base, len)| HybridBlock {
                base,
                rotation: random_rotation(len, &mut rng),
            })
            .collect();
        suite.push(BenchProblem::hybrid(
            format!("F{}", k + 1),
            shift,
            permutation,
            blocks,
            bias(k),
        ));
    }

    // (base, σ, λ) per component; offsets are 0 for the first component
    // and 100 for the others.
    let compositions: [[(BaseFunction, f64, f64); 3]; 2] = [
        [
            (BaseFunction::Rosenbrock, 10.0, 1.0),
            (BaseFunction::Elliptic, 20.0, 1e-6),
            (BaseFunction::Rastrigin, 30.0, 1.0),
        ],
        [
            (BaseFunction::ModSchwefel, 20.0, 0.25),
            (BaseFunction::Rastrigin, 20.0, 1.0),
            (BaseFunction::Griewank, 20.0, 1.0),
        ],
    ];
    for (c, parts) in compositions.into_iter().enumerate() {
        let k = 10 + c;
        let mut rng = next(k);
        let components = parts
            .iter()
            .enumerate()
            .map(|(j, &(base, sigma, lambda))| Component {
                base,
                shift: random_shift(d, &mut rng),
                rotation: random_rotation(d, &mut rng),
                sigma,
                lambda,
                offset: if j == 0 { 0.0 } else { 100.0 },
            })
            .collect();
        suite.push(BenchProblem::composition(
            format!("F{}", k + 1),
            components,
            bias(k),
        ));
    }
    Ok(suite)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub name: String,
    pub category: Category,
    pub bias: f64,
    pub fingerprint: String,
}

/// JSON-exportable description of a generated suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub dimension: usize,
    pub seed: u64,
    pub domain: (f64, f64),
    pub problems: Vec<ManifestEntry>,
}

impl SuiteManifest {
    pub fn new(dimension: usize, seed: u64, suite: &[BenchProblem]) -> Self {
        Self {
            dimension,
            seed,
            domain: DOMAIN,
            problems: suite
                .iter()
                .map(|p| ManifestEntry {
                    id: p.id.clone(),
                    name: p.name.clone(),
                    category: p.category,
                    bias: p.bias,
                    fingerprint: format!("{:016x}", p.fingerprint()),
                })
                .collect(),
        }
    }
}
