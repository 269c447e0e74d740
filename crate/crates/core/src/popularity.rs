//! File popularity distributions, always stored in nonincreasing order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(probs) == 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability mass function over files `1..=N`, sorted nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Popularity {
    probs: Vec<f64>,
    /// `tails[i] = sum(probs[i..])`, with `tails[N] = 0`.
    #[serde(skip)]
    tails: Vec<f64>,
}

/// JSON popularity descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PopularitySpec {
    Zipf { gamma: f64 },
    Explicit { weights: Vec<f64> },
}

impl PopularitySpec {
    /// Build the distribution for `n_files` files. Explicit weights must have
    /// exactly `n_files` entries.
    pub fn build(&self, n_files: usize) -> Result<Popularity> {
        match self {
            PopularitySpec::Zipf { gamma } => zipf(n_files, *gamma),
            PopularitySpec::Explicit { weights } => {
                if weights.len() != n_files {
                    return Err(Error::Shape(format!(
                        "explicit popularity has {} weights, N = {n_files}",
                        weights.len()
                    )));
                }
                from_weights(weights).map(|(p, _)| p)
            }
        }
    }
}

impl Popularity {
    /// Wrap an already sorted, normalized pmf, validating every invariant.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPopularity("no files".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidPopularity(format!("entry {p} is not a probability")));
        }
        if probs.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPopularity("entries must be nonincreasing".into()));
        }
        let pop = Self::from_sorted_unchecked(probs);
        let total = pop.tails[0];
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidPopularity(format!("entries sum to {total}, not 1")));
        }
        Ok(pop)
    }

    pub fn uniform(n_files: usize) -> Result<Self> {
        zipf(n_files, 0.0)
    }

    fn from_sorted_unchecked(probs: Vec<f64>) -> Self {
        // Suffix sums accumulate from the smallest entries upward.
        let mut tails = vec![0.0; probs.len() + 1];
        for i in (0..probs.len()).rev() {
            tails[i] = tails[i + 1] + probs[i];
        }
        Self { probs, tails }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of file `n` (1-based).
    pub fn p(&self, n: usize) -> f64 {
        self.probs[n - 1]
    }

    /// `sum_{n' = n}^{N} p_{n'}` for 1-based `n` in `1..=N+1`.
    pub fn tail_sum(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.probs.len() + 1 {
            return Err(Error::Index {
                index: n,
                max: self.probs.len() + 1,
            });
        }
        Ok(self.tails[n - 1])
    }

    /// Zero-based suffix sums, length `N + 1`.
    pub(crate) fn tails(&self) -> &[f64] {
        &self.tails
    }

    /// True when all entries are equal.
    pub fn is_uniform(&self) -> bool {
        self.probs.windows(2).all(|w| w[0] == w[1])
    }
}

/// Zipf popularity `p_n ∝ n^{-gamma}`.
pub fn zipf(n_files: usize, gamma: f64) -> Result<Popularity> {
    if n_files == 0 {
        return Err(Error::InvalidInstance("N must be at least 1".into()));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidPopularity(format!(
            "Zipf exponent must be finite and nonnegative, got {gamma}"
        )));
    }
    let weights: Vec<f64> = (1..=n_files).map(|n| (n as f64).powf(-gamma)).collect();
    let total: f64 = weights.iter().rev().sum();
    let probs = weights.into_iter().map(|w| w / total).collect();
    Ok(Popularity::from_sorted_unchecked(probs))
}

/// Normalize nonnegative weights and sort them nonincreasing.
///
/// Returns the distribution and `perm`, where `perm[i]` is the zero-based
/// sorted position of original file `i`. Ties keep their original order.
pub fn from_weights(weights: &[f64]) -> Result<(Popularity, Vec<usize>)> {
    if weights.is_empty() {
        return Err(Error::InvalidPopularity("no weights".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidPopularity(format!("weight {w} is negative or not finite")));
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
    let total: f64 = sorted.iter().rev().sum();
    if total <= 0.0 {
        return Err(Error::InvalidPopularity("all weights are zero".into()));
    }
    let probs = sorted.into_iter().map(|w| w / total).collect();
    let mut perm = vec![0; weights.len()];
    for (pos, &orig) in order.iter().enumerate() {
        perm[orig] = pos;
    }
    Ok((Popularity::from_sorted_unchecked(probs), perm))
}
