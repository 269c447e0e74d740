//! Instances, demand vectors and the three nested file-partition
//! parameterizations: full (`x`, per file and user subset), symmetric (`y`,
//! per file and subset size) and uniform (`z`, per subset size only).
//!
//! User subsets are `K`-bit masks with user `k` (1-based) on bit `k - 1`.
//! File indices are zero-based in the API and one-based in JSON.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::binomial;
use crate::popularity::Popularity;

/// Constraint tolerance used by every feasibility check.
pub const FEAS_TOL: f64 = 1e-9;

/// Largest `K` for which full `x` storage (`N * 2^K` entries) is allowed.
pub const MAX_FULL_USERS: usize = 20;

/// Largest `K` accepted anywhere (binomial guard).
pub const MAX_USERS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    users: usize,
    files: usize,
    cache: f64,
    pop: Popularity,
}

impl Instance {
    pub fn new(users: usize, files: usize, cache: f64, pop: Popularity) -> Result<Self> {
        if users == 0 || users > MAX_USERS {
            return Err(Error::InvalidInstance(format!("K = {users} outside 1..={MAX_USERS}")));
        }
        if files == 0 {
            return Err(Error::InvalidInstance("N must be at least 1".into()));
        }
        if !cache.is_finite() || cache < 0.0 || cache > files as f64 {
            return Err(Error::InvalidInstance(format!("M = {cache} outside [0, {files}]")));
        }
        if pop.len() != files {
            return Err(Error::InvalidInstance(format!(
                "popularity has {} entries, N = {files}",
                pop.len()
            )));
        }
        Ok(Self {
            users,
            files,
            cache,
            pop,
        })
    }

    /// Instance with uniform popularity.
    pub fn uniform(users: usize, files: usize, cache: f64) -> Result<Self> {
        Self::new(users, files, cache, Popularity::uniform(files)?)
    }

    pub fn k(&self) -> usize {
        self.users
    }

    pub fn n(&self) -> usize {
        self.files
    }

    pub fn m(&self) -> f64 {
        self.cache
    }

    pub fn pop(&self) -> &Popularity {
        &self.pop
    }

    /// Same instance with a different cache size.
    pub fn with_cache(&self, cache: f64) -> Result<Self> {
        Self::new(self.users, self.files, cache, self.pop.clone())
    }

    /// Normalized cache size `K M / N`.
    pub fn t(&self) -> f64 {
        self.users as f64 * self.cache / self.files as f64
    }
}

/// Requested file for each user, zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(files: Vec<usize>, n_files: usize) -> Result<Self> {
        if let Some(&f) = files.iter().find(|&&f| f >= n_files) {
            return Err(Error::Index {
                index: f + 1,
                max: n_files,
            });
        }
        Ok(Self(files))
    }

    /// Build from one-based file indices.
    pub fn from_one_based(files: &[usize], n_files: usize) -> Result<Self> {
        if let Some(&f) = files.iter().find(|&&f| f == 0 || f > n_files) {
            return Err(Error::Index {
                index: f,
                max: n_files,
            });
        }
        Ok(Self(files.iter().map(|f| f - 1).collect()))
    }

    pub fn files(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|f| f + 1).collect()
    }

    /// Every demand vector in `N^K`, lexicographic with user 1 most significant.
    pub fn all(users: usize, n_files: usize) -> impl Iterator<Item = DemandVector> {
        let total = (n_files as u64).pow(users as u32);
        (0..total).map(move |idx| DemandVector(decode_index(idx, users, n_files)))
    }

    pub fn check_shape(&self, users: usize, n_files: usize) -> Result<()> {
        if self.0.len() != users {
            return Err(Error::Shape(format!("demand has {} users, K = {users}", self.0.len())));
        }
        if let Some(&f) = self.0.iter().find(|&&f| f >= n_files) {
            return Err(Error::Index {
                index: f + 1,
                max: n_files,
            });
        }
        Ok(())
    }
}

/// Digits of `idx` in base `n`, most significant first, `len` digits.
pub(crate) fn decode_index(mut idx: u64, len: usize, n: usize) -> Vec<usize> {
    let mut digits = vec![0; len];
    for slot in digits.iter_mut().rev() {
        *slot = (idx % n as u64) as usize;
        idx /= n as u64;
    }
    digits
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// Entry outside `[0, 1]`.
    Range,
    /// Per-file partition sum differs from 1.
    PartitionSum,
    /// Cache memory exceeded.
    Memory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub location: String,
    pub value: f64,
    pub bound: f64,
    /// Signed amount by which the constraint is missed (positive = violated).
    pub excess: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    fn range(&mut self, location: impl FnOnce() -> String, v: f64) {
        if !(-FEAS_TOL..=1.0 + FEAS_TOL).contains(&v) {
            let (bound, excess) = if v < 0.0 { (0.0, -v) } else { (1.0, v - 1.0) };
            self.violations.push(Violation {
                kind: ConstraintKind::Range,
                location: location(),
                value: v,
                bound,
                excess,
            });
        }
    }

    fn sum(&mut self, location: String, v: f64) {
        if (v - 1.0).abs() > FEAS_TOL {
            self.violations.push(Violation {
                kind: ConstraintKind::PartitionSum,
                location,
                value: v,
                bound: 1.0,
                excess: (v - 1.0).abs(),
            });
        }
    }

    fn memory(&mut self, location: String, v: f64, bound: f64) {
        if v > bound + FEAS_TOL {
            self.violations.push(Violation {
                kind: ConstraintKind::Memory,
                location,
                value: v,
                bound,
                excess: v - bound,
            });
        }
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "feasible");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(
                f,
                "{:?} at {}: value {} vs bound {} (excess {:.3e})",
                v.kind, v.location, v.value, v.bound, v.excess
            )?;
        }
        Ok(())
    }
}

/// Full partition `x[n][S]`: fraction of file `n` cached exactly at users `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FullRepr", into = "FullRepr")]
pub struct FullPartition {
    users: usize,
    files: usize,
    x: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FullRepr {
    #[serde(rename = "K")]
    users: usize,
    #[serde(rename = "N")]
    files: usize,
    /// Sparse `(n, mask, value)` triples with one-based `n`.
    entries: Vec<(usize, u32, f64)>,
}

impl From<FullPartition> for FullRepr {
    fn from(p: FullPartition) -> Self {
        let subsets = 1usize << p.users;
        let entries = p
            .x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i / subsets + 1, (i % subsets) as u32, *v))
            .collect();
        FullRepr {
            users: p.users,
            files: p.files,
            entries,
        }
    }
}

impl TryFrom<FullRepr> for FullPartition {
    type Error = Error;

    fn try_from(r: FullRepr) -> Result<Self> {
        let mut p = FullPartition::zeros(r.users, r.files)?;
        for (n, mask, v) in r.entries {
            if n == 0 || n > r.files || (mask as usize) >= (1 << r.users) {
                return Err(Error::Shape(format!("entry ({n}, {mask}) out of range")));
            }
            p.set(n - 1, mask, v);
        }
        Ok(p)
    }
}

impl FullPartition {
    pub fn zeros(users: usize, files: usize) -> Result<Self> {
        if users == 0 || files == 0 {
            return Err(Error::Shape("K and N must be positive".into()));
        }
        if users > MAX_FULL_USERS {
            return Err(Error::Capacity {
                what: "full partition storage (K)",
                required: users as u128,
                cap: MAX_FULL_USERS as u128,
            });
        }
        Ok(Self {
            users,
            files,
            x: vec![0.0; files << users],
        })
    }

    /// Everything in the empty-set subfile (nothing cached).
    pub fn uncached(users: usize, files: usize) -> Result<Self> {
        let mut p = Self::zeros(users, files)?;
        for n in 0..files {
            p.set(n, 0, 1.0);
        }
        Ok(p)
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn files(&self) -> usize {
        self.files
    }

    #[inline]
    pub fn get(&self, file: usize, mask: u32) -> f64 {
        self.x[(file << self.users) | mask as usize]
    }

    #[inline]
    pub fn set(&mut self, file: usize, mask: u32, value: f64) {
        self.x[(file << self.users) | mask as usize] = value;
    }

    /// Row of file `file`, indexed by mask.
    pub fn row(&self, file: usize) -> &[f64] {
        let s = 1 << self.users;
        &self.x[file * s..(file + 1) * s]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &FullPartition, lambda: f64) -> Result<FullPartition> {
        if self.users != other.users || self.files != other.files {
            return Err(Error::Shape("partitions differ in shape".into()));
        }
        let x = self
            .x
            .iter()
            .zip(&other.x)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        Ok(FullPartition { x, ..*self })
    }

    fn check_shape(&self, inst: &Instance) -> Result<()> {
        if self.users != inst.k() || self.files != inst.n() {
            return Err(Error::Shape(format!(
                "partition is K={}, N={}; instance is K={}, N={}",
                self.users,
                self.files,
                inst.k(),
                inst.n()
            )));
        }
        Ok(())
    }
}

/// Subset-symmetric partition `y[n][s]`: fraction of file `n` in each type-`s` subfile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymmetricRepr", into = "SymmetricRepr")]
pub struct SymmetricPartition {
    users: usize,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SymmetricRepr {
    y: Vec<Vec<f64>>,
}

impl From<SymmetricPartition> for SymmetricRepr {
    fn from(p: SymmetricPartition) -> Self {
        SymmetricRepr { y: p.rows }
    }
}

impl TryFrom<SymmetricRepr> for SymmetricPartition {
    type Error = Error;

    fn try_from(r: SymmetricRepr) -> Result<Self> {
        SymmetricPartition::new(r.y)
    }
}

impl SymmetricPartition {
    /// Rows must all have length `K + 1`.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || width < 2 || rows.iter().any(|r| r.len() != width) {
            return Err(Error::Shape("y must be a nonempty N x (K+1) matrix with K >= 1".into()));
        }
        Ok(Self {
            users: width - 1,
            rows,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn files(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn get(&self, file: usize, s: usize) -> f64 {
        self.rows[file][s]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, file: usize) -> &[f64] {
        &self.rows[file]
    }

    fn check_shape(&self, inst: &Instance) -> Result<()> {
        if self.users != inst.k() || self.files() != inst.n() {
            return Err(Error::Shape(format!(
                "y is {}x{}, instance needs {}x{}",
                self.files(),
                self.users + 1,
                inst.n(),
                inst.k() + 1
            )));
        }
        Ok(())
    }

    /// Cache occupancy `sum_n sum_{s>=1} C(K-1, s-1) y[n][s]` of every user.
    pub fn memory_used(&self) -> f64 {
        let k = self.users;
        self.rows
            .iter()
            .map(|r| (1..=k).map(|s| binomial(k - 1, s - 1) * r[s]).sum::<f64>())
            .sum()
    }
}

/// Fully symmetric partition `z[s]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UniformRepr", into = "UniformRepr")]
pub struct UniformPartition {
    z: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct UniformRepr {
    z: Vec<f64>,
}

impl From<UniformPartition> for UniformRepr {
    fn from(p: UniformPartition) -> Self {
        UniformRepr { z: p.z }
    }
}

impl TryFrom<UniformRepr> for UniformPartition {
    type Error = Error;

    fn try_from(r: UniformRepr) -> Result<Self> {
        UniformPartition::new(r.z)
    }
}

impl UniformPartition {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if z.len() < 2 {
            return Err(Error::Shape("z needs K+1 >= 2 entries".into()));
        }
        Ok(Self { z })
    }

    pub fn users(&self) -> usize {
        self.z.len() - 1
    }

    pub fn get(&self, s: usize) -> f64 {
        self.z[s]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.z
    }
}

/// Any of the three parameterizations, tagged for JSON exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Partition {
    Full(FullPartition),
    Symmetric(SymmetricPartition),
    Uniform(UniformPartition),
}

impl Partition {
    /// Lift to the full parameterization.
    pub fn to_full(&self, files: usize) -> Result<FullPartition> {
        match self {
            Partition::Full(x) => Ok(x.clone()),
            Partition::Symmetric(y) => expand_symmetric(y),
            Partition::Uniform(z) => expand_symmetric(&expand_uniform(z, files)?),
        }
    }

    /// Lift to the symmetric parameterization when it is one.
    pub fn to_symmetric(&self, files: usize) -> Option<SymmetricPartition> {
        match self {
            Partition::Full(_) => None,
            Partition::Symmetric(y) => Some(y.clone()),
            Partition::Uniform(z) => expand_uniform(z, files).ok(),
        }
    }
}

pub fn check_full_feasible(x: &FullPartition, inst: &Instance) -> Result<FeasibilityReport> {
    x.check_shape(inst)?;
    let k = inst.k();
    let mut report = FeasibilityReport::default();
    for n in 0..inst.n() {
        let row = x.row(n);
        for (mask, &v) in row.iter().enumerate() {
            report.range(|| format!("x[{}][{mask:#b}]", n + 1), v);
        }
        report.sum(format!("file {}", n + 1), row.iter().sum());
    }
    for user in 0..k {
        let bit = 1usize << user;
        let used: f64 = (0..inst.n())
            .map(|n| {
                x.row(n)
                    .iter()
                    .enumerate()
                    .filter(|(mask, _)| mask & bit != 0)
                    .map(|(_, v)| v)
                    .sum::<f64>()
            })
            .sum();
        report.memory(format!("user {}", user + 1), used, inst.m());
    }
    Ok(report)
}

pub fn check_symmetric_feasible(y: &SymmetricPartition, inst: &Instance) -> Result<FeasibilityReport> {
    y.check_shape(inst)?;
    let k = inst.k();
    let mut report = FeasibilityReport::default();
    for (n, row) in y.rows().iter().enumerate() {
        for (s, &v) in row.iter().enumerate() {
            report.range(|| format!("y[{}][{s}]", n + 1), v);
        }
        let total: f64 = row.iter().enumerate().map(|(s, v)| binomial(k, s) * v).sum();
        report.sum(format!("file {}", n + 1), total);
    }
    report.memory("every user".into(), y.memory_used(), inst.m());
    Ok(report)
}

pub fn check_uniform_feasible(z: &UniformPartition, inst: &Instance) -> Result<FeasibilityReport> {
    let k = inst.k();
    if z.users() != k {
        return Err(Error::Shape(format!("z has {} entries, K+1 = {}", z.z.len(), k + 1)));
    }
    let mut report = FeasibilityReport::default();
    for (s, &v) in z.as_slice().iter().enumerate() {
        report.range(|| format!("z[{s}]"), v);
    }
    let total: f64 = z.as_slice().iter().enumerate().map(|(s, v)| binomial(k, s) * v).sum();
    report.sum("z".into(), total);
    let used: f64 = z
        .as_slice()
        .iter()
        .enumerate()
        .map(|(s, v)| binomial(k, s) * s as f64 * v)
        .sum();
    report.memory("normalized cache".into(), used, inst.t());
    Ok(report)
}

/// `x[n][S] = y[n][|S|]`.
pub fn expand_symmetric(y: &SymmetricPartition) -> Result<FullPartition> {
    let mut x = FullPartition::zeros(y.users(), y.files())?;
    for n in 0..y.files() {
        for mask in 0..(1u32 << y.users()) {
            x.set(n, mask, y.get(n, mask.count_ones() as usize));
        }
    }
    Ok(x)
}

/// `y[n][s] = z[s]` for every file.
pub fn expand_uniform(z: &UniformPartition, files: usize) -> Result<SymmetricPartition> {
    if files == 0 {
        return Err(Error::Shape("N must be positive".into()));
    }
    SymmetricPartition::new(vec![z.as_slice().to_vec(); files])
}

/// Average each file's subfile fractions over subsets of equal size.
pub fn symmetrize(x: &FullPartition, inst: &Instance) -> Result<SymmetricPartition> {
    let report = check_full_feasible(x, inst)?;
    if !report.is_feasible() {
        return Err(Error::Infeasible(report));
    }
    let k = x.users();
    let rows = (0..x.files())
        .map(|n| {
            let mut sums = vec![0.0; k + 1];
            for (mask, v) in x.row(n).iter().enumerate() {
                sums[mask.count_ones() as usize] += v;
            }
            sums.iter()
                .enumerate()
                .map(|(s, total)| total / binomial(k, s))
                .collect()
        })
        .collect();
    SymmetricPartition::new(rows)
}

/// `y[n][s] >= y[n+1][s] - FEAS_TOL` for all `s >= 1`.
pub fn is_monotone(y: &SymmetricPartition) -> bool {
    y.rows()
        .windows(2)
        .all(|w| (1..=y.users()).all(|s| w[0][s] >= w[1][s] - FEAS_TOL))
}

/// Fraction of the cache given to each file: `q_n = sum_{s>=1} C(K-1,s-1) y[n][s] / M`.
pub fn memory_shares(y: &SymmetricPartition, cache: f64) -> Result<Vec<f64>> {
    if cache <= 0.0 {
        return Err(Error::UndefinedShares);
    }
    let k = y.users();
    Ok(y.rows()
        .iter()
        .map(|r| (1..=k).map(|s| binomial(k - 1, s - 1) * r[s]).sum::<f64>() / cache)
        .collect())
}
