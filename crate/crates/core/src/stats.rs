//! Comparison statistics: Wilcoxon signed-rank tests (exact and normal
//! approximation), Friedman mean ranks, −/=/+ summaries, and the
//! new-best-solution rank archive.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

/// Largest sample size handled by exact enumeration.
pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("all differences are zero")]
    AllZero,
    #[error("rank archive is empty")]
    EmptyArchive,
    #[error("sample lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("need at least two algorithms, got {0}")]
    TooFewAlgorithms(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Nonzero differences that entered the test.
    pub n: usize,
    pub r_plus: f64,
    pub r_minus: f64,
    pub p_value: f64,
    pub significant: bool,
    pub method: PValueMethod,
}

/// Average ranks (1-based) of `values`, ties sharing their mean rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    doubled_midranks(values)
        .into_iter()
        .map(|r| r as f64 / 2.0)
        .collect()
}

/// Midranks times two, which are always integers.
fn doubled_midranks(values: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        let doubled = (start + end + 2) as u64;
        for &k in &order[start..=end] {
            ranks[k] = doubled;
        }
        start = end + 1;
    }
    ranks
}

struct SignedRanks {
    /// Doubled midranks of |d|.
    doubled: Vec<u64>,
    positive: Vec<bool>,
    tie_sizes: Vec<usize>,
}

impl SignedRanks {
    fn new(differences: &[f64]) -> Result<Self, StatsError> {
        if differences.is_empty() {
            return Err(StatsError::Empty);
        }
        let nonzero: Vec<f64> = differences.iter().copied().filter(|d| *d != 0.0).collect();
        if nonzero.is_empty() {
            return Err(StatsError::AllZero);
        }
        let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
        let doubled = doubled_midranks(&abs);
        let mut sorted = abs.clone();
        sorted.sort_by(f64::total_cmp);
        let tie_sizes = sorted
            .chunk_by(|a, b| a == b)
            .map(|c| c.len())
            .filter(|&t| t > 1)
            .collect();
        Ok(Self {
            doubled,
            positive: nonzero.iter().map(|d| *d > 0.0).collect(),
            tie_sizes,
        })
    }

    fn n(&self) -> usize {
        self.doubled.len()
    }

    fn doubled_plus(&self) -> u64 {
        self.doubled
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| p)
            .map(|(r, _)| r)
            .sum()
    }

    fn doubled_total(&self) -> u64 {
        self.doubled.iter().sum()
    }

    /// Two-sided p from the exact null distribution of R+ (every sign
    /// assignment equally likely), counted by subset-sum dynamic programming.
    fn exact_p(&self) -> f64 {
        let total = self.doubled_total() as usize;
        let mut counts = vec![0u64; total + 1];
        counts[0] = 1;
        let mut reach = 0;
        for &r in &self.doubled {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] > 0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let observed = (2 * self.doubled_plus() as i64 - total as i64).abs();
        let extreme: u64 = counts
            .iter()
            .enumerate()
            .filter(|(s, _)| (2 * *s as i64 - total as i64).abs() >= observed)
            .map(|(_, c)| c)
            .sum();
        (extreme as f64 / 2f64.powi(self.n() as i32)).min(1.0)
    }

    /// Normal approximation with tie and continuity corrections.
    fn normal_p(&self) -> f64 {
        let n = self.n() as f64;
        let mean = n * (n + 1.0) / 4.0;
        let tie_term: f64 = self
            .tie_sizes
            .iter()
            .map(|&t| {
                let t = t as f64;
                t * t * t - t
            })
            .sum();
        let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
        if var <= 0.0 {
            return 1.0;
        }
        let r_plus = self.doubled_plus() as f64 / 2.0;
        let z = ((r_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    }
}

/// Wilcoxon signed-rank test on paired differences. Zero differences are
/// discarded; the p-value is exact for up to [`EXACT_MAX_N`] nonzero
/// differences and uses the normal approximation beyond.
pub fn wilcoxon_signed_rank(differences: &[f64], alpha: f64) -> Result<WilcoxonResult, StatsError> {
    let ranks = SignedRanks::new(differences)?;
    let method = if ranks.n() <= EXACT_MAX_N {
        PValueMethod::Exact
    } else {
        PValueMethod::Normal
    };
    wilcoxon_with(&ranks, alpha, method)
}

/// Same test with the p-value path forced.
pub fn wilcoxon_signed_rank_with(
    differences: &[f64],
    alpha: f64,
    method: PValueMethod,
) -> Result<WilcoxonResult, StatsError> {
    wilcoxon_with(&SignedRanks::new(differences)?, alpha, method)
}

fn wilcoxon_with(
    ranks: &SignedRanks,
    alpha: f64,
    method: PValueMethod,
) -> Result<WilcoxonResult, StatsError> {
    let r_plus = ranks.doubled_plus() as f64 / 2.0;
    let r_minus = (ranks.doubled_total() - ranks.doubled_plus()) as f64 / 2.0;
    let p_value = match method {
        PValueMethod::Exact => ranks.exact_p(),
        PValueMethod::Normal => ranks.normal_p(),
    };
    Ok(WilcoxonResult {
        n: ranks.n(),
        r_plus,
        r_minus,
        p_value,
        significant: p_value < alpha,
        method,
    })
}

/// Outcome symbol for the compared algorithm relative to the considered one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    /// Compared algorithm significantly worse.
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "=")]
    Equal,
    /// Compared algorithm significantly better.
    #[serde(rename = "+")]
    Plus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-",
            Sign::Equal => "=",
            Sign::Plus => "+",
        })
    }
}

/// Per-run paired comparison on one problem. Errors are minimized, so the
/// differences `compared − considered` are positive where the compared
/// algorithm did worse.
pub fn single_problem_compare(
    considered: &[f64],
    compared: &[f64],
    alpha: f64,
) -> Result<Sign, StatsError> {
    if considered.len() != compared.len() {
        return Err(StatsError::LengthMismatch(considered.len(), compared.len()));
    }
    let diffs: Vec<f64> = compared.iter().zip(considered).map(|(b, a)| b - a).collect();
    match wilcoxon_signed_rank(&diffs, alpha) {
        Ok(w) if w.significant && w.r_plus > w.r_minus => Ok(Sign::Minus),
        Ok(w) if w.significant && w.r_plus < w.r_minus => Ok(Sign::Plus),
        Ok(_) | Err(StatsError::AllZero) => Ok(Sign::Equal),
        Err(e) => Err(e),
    }
}

/// Multi-problem test over per-function mean errors; R+ collects the
/// functions where `a` has the smaller error.
pub fn multi_problem_wilcoxon(
    mean_errors_a: &[f64],
    mean_errors_b: &[f64],
    alpha: f64,
) -> Result<WilcoxonResult, StatsError> {
    if mean_errors_a.len() != mean_errors_b.len() {
        return Err(StatsError::LengthMismatch(mean_errors_a.len(), mean_errors_b.len()));
    }
    let diffs: Vec<f64> = mean_errors_b
        .iter()
        .zip(mean_errors_a)
        .map(|(b, a)| b - a)
        .collect();
    wilcoxon_signed_rank(&diffs, alpha)
}

/// Column means of per-row midranks; rank 1 is the smallest error.
/// `error_matrix` is indexed `[function][algorithm]`.
pub fn friedman_mean_ranks(error_matrix: &[Vec<f64>]) -> Result<Vec<f64>, StatsError> {
    let first = error_matrix.first().ok_or(StatsError::Empty)?;
    let k = first.len();
    if k < 2 {
        return Err(StatsError::TooFewAlgorithms(k));
    }
    let mut sums = vec![0.0; k];
    for row in error_matrix {
        if row.len() != k {
            return Err(StatsError::LengthMismatch(k, row.len()));
        }
        for (s, r) in sums.iter_mut().zip(midranks(row)) {
            *s += r;
        }
    }
    let rows = error_matrix.len() as f64;
    Ok(sums.into_iter().map(|s| s / rows).collect())
}

/// A "−/=/+" row plus its P−N value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignSummary {
    pub minus: usize,
    pub equal: usize,
    pub plus: usize,
    /// Wins minus losses of the considered algorithm, i.e. `minus − plus`.
    pub p_n: i64,
}

impl SignSummary {
    pub fn total(&self) -> usize {
        self.minus + self.equal + self.plus
    }
}

impl FromIterator<Sign> for SignSummary {
    fn from_iter<I: IntoIterator<Item = Sign>>(iter: I) -> Self {
        let mut s = SignSummary::default();
        for sign in iter {
            match sign {
                Sign::Minus => s.minus += 1,
                Sign::Equal => s.equal += 1,
                Sign::Plus => s.plus += 1,
            }
        }
        s.p_n = s.minus as i64 - s.plus as i64;
        s
    }
}

impl fmt::Display for SignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{} ({})", self.minus, self.equal, self.plus, self.p_n)
    }
}

/// Ranks (1 = best) of the targets whose trials produced a new best
/// solution, with a frequency histogram over `1..=NP`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankArchive {
    pub ranks: Vec<usize>,
    pub frequency: Vec<u64>,
}

impl RankArchive {
    pub fn new(np: usize) -> Self {
        Self {
            ranks: Vec::new(),
            frequency: vec![0; np],
        }
    }

    pub fn np(&self) -> usize {
        self.frequency.len()
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn record(&mut self, rank: usize) {
        assert!(
            (1..=self.np()).contains(&rank),
            "rank {rank} outside 1..={}",
            self.np()
        );
        self.ranks.push(rank);
        self.frequency[rank - 1] += 1;
    }

    /// Mean archived rank.
    pub fn ar(&self) -> Result<f64, StatsError> {
        if self.ranks.is_empty() {
            return Err(StatsError::EmptyArchive);
        }
        Ok(self.ranks.iter().sum::<usize>() as f64 / self.ranks.len() as f64)
    }

    /// Events produced by ranks `lo..=hi`.
    pub fn mass(&self, lo: usize, hi: usize) -> u64 {
        self.frequency[lo - 1..hi].iter().sum()
    }
}

/// Expected mean rank when new-best production ignores rank: (NP + 1) / 2.
pub fn expected_ar(np: usize) -> f64 {
    (1..=np).sum::<usize>() as f64 / np as f64
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator); 0 for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Median by sorting; the lower middle element for even lengths.
pub fn median_index(xs: &[f64]) -> Option<usize> {
    if xs.is_empty() {
        return None;
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    Some(order[(xs.len() - 1) / 2])
}
