use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::math::{lcm, rational_approx};
use crate::partition::{check_full_feasible, FullPartition, Instance};

const ROUND_TOL: f64 = 1e-9;
const MAX_DENOMINATOR: u64 = 1_000_000;

/// Unit `unit` of file `file` under `seed`.
pub fn unit_value(seed: u64, file: usize, unit: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(file as u64);
    rng.set_word_pos(2 * unit as u128);
    rng.next_u64()
}

/// All `f` units of file `file`; equal to `unit_value` at every index.
pub fn file_units(seed: u64, file: usize, f: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(file as u64);
    (0..f).map(|_| rng.next_u64()).collect()
}

/// Smallest `F` making every entry of `x` an integer multiple of `1/F`,
/// when all entries are rationals with modest denominators.
pub fn min_integral_f(x: &FullPartition) -> Option<u64> {
    x.as_slice().iter().try_fold(1u64, |acc, &v| {
        let (_, q) = rational_approx(v, MAX_DENOMINATOR, ROUND_TOL)?;
        lcm(acc, q)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacheEntry {
    pub file: usize,
    pub mask: u32,
    /// Index of the first unit of the subfile within its file.
    pub start: u64,
    pub data: Vec<u64>,
}

/// A placement quantized to `F` units per file, with payloads and caches.
#[derive(Debug, Clone)]
pub struct PlacementRealization {
    users: usize,
    files: usize,
    f: u64,
    cache_units: u64,
    seed: u64,
    sizes: Vec<Vec<u64>>,
    offsets: Vec<Vec<u64>>,
    data: Vec<Vec<u64>>,
    caches: Vec<Vec<CacheEntry>>,
}

impl PlacementRealization {
    /// Build from explicit subfile sizes `sizes[n][mask]`.
    pub fn from_sizes(inst: &Instance, f: u64, sizes: Vec<Vec<u64>>, seed: u64) -> Result<Self> {
        let (k, n) = (inst.k(), inst.n());
        if f == 0 {
            return Err(Error::Precondition("F must be at least 1".into()));
        }
        if k > crate::partition::MAX_FULL_USERS {
            return Err(Error::Capacity {
                what: "subfiles per file 2^K",
                required: 1u128 << k,
                cap: 1u128 << crate::partition::MAX_FULL_USERS,
            });
        }
        let subsets = 1usize << k;
        if sizes.len() != n || sizes.iter().any(|r| r.len() != subsets) {
            return Err(Error::Shape(format!("sizes must be {n} x {subsets}")));
        }
        for (file, row) in sizes.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total != f {
                return Err(Error::Precondition(format!("file {} splits into {total} units, expected {f}", file + 1)));
            }
        }
        let cache_units = cache_capacity(inst.m(), f);
        let mut used = vec![0u64; k];
        for row in &sizes {
            for (mask, &size) in row.iter().enumerate() {
                for (user, u) in used.iter_mut().enumerate() {
                    if mask & (1 << user) != 0 {
                        *u += size;
                    }
                }
            }
        }
        if let Some(user) = used.iter().position(|&u| u > cache_units) {
            return Err(Error::Precondition(format!(
                "user {} caches {} units, capacity is {cache_units}",
                user + 1,
                used[user]
            )));
        }

        let offsets: Vec<Vec<u64>> = sizes
            .iter()
            .map(|row| {
                row.iter()
                    .scan(0u64, |acc, &s| {
                        let start = *acc;
                        *acc += s;
                        Some(start)
                    })
                    .collect()
            })
            .collect();
        let data: Vec<Vec<u64>> = (0..n).map(|file| file_units(seed, file, f)).collect();
        let caches = (0..k)
            .map(|user| {
                let mut entries = Vec::new();
                for file in 0..n {
                    for mask in (0..subsets as u32).filter(|m| m & (1 << user) != 0) {
                        let (start, len) = (offsets[file][mask as usize], sizes[file][mask as usize]);
                        if len > 0 {
                            let data = data[file][start as usize..(start + len) as usize].to_vec();
                            entries.push(CacheEntry { file, mask, start, data });
                        }
                    }
                }
                entries
            })
            .collect();
        Ok(Self { users: k, files: n, f, cache_units, seed, sizes, offsets, data, caches })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn f(&self) -> u64 {
        self.f
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cache_capacity(&self) -> u64 {
        self.cache_units
    }

    pub fn size(&self, file: usize, mask: u32) -> u64 {
        self.sizes[file][mask as usize]
    }

    pub fn offset(&self, file: usize, mask: u32) -> u64 {
        self.offsets[file][mask as usize]
    }

    pub fn sizes(&self) -> &[Vec<u64>] {
        &self.sizes
    }

    pub fn file_data(&self, file: usize) -> &[u64] {
        &self.data[file]
    }

    pub fn subfile(&self, file: usize, mask: u32) -> &[u64] {
        let start = self.offset(file, mask) as usize;
        &self.data[file][start..start + self.size(file, mask) as usize]
    }

    pub fn cache(&self, user: usize) -> &[CacheEntry] {
        &self.caches[user]
    }

    pub fn cached_units(&self, user: usize) -> u64 {
        self.caches[user].iter().map(|e| e.data.len() as u64).sum()
    }
}

fn cache_capacity(cache: f64, f: u64) -> u64 {
    (cache * f as f64 + ROUND_TOL).floor() as u64
}

/// Largest-remainder rounding of `x F` per file, then cache repair.
pub fn quantize(x: &FullPartition, f: u64, inst: &Instance, seed: u64) -> Result<PlacementRealization> {
    if f == 0 {
        return Err(Error::Precondition("F must be at least 1".into()));
    }
    if x.users() != inst.k() || x.files() != inst.n() {
        return Err(Error::Shape("partition does not match instance".into()));
    }
    let report = check_full_feasible(x, inst)?;
    if !report.is_feasible() {
        return Err(Error::Infeasible(report));
    }
    let k = inst.k();
    let ff = f as f64;
    let mut sizes: Vec<Vec<u64>> = (0..inst.n()).map(|file| round_row(x.row(file), f)).collect();

    let cap = cache_capacity(inst.m(), f);
    for user in 0..k {
        loop {
            let used: u64 = sizes
                .iter()
                .flat_map(|row| row.iter().enumerate().filter(|(m, _)| m & (1 << user) != 0).map(|(_, s)| *s))
                .sum();
            if used <= cap {
                break;
            }
            let mut best: Option<(usize, usize, u64)> = None;
            for (file, row) in sizes.iter().enumerate() {
                for (mask, &s) in row.iter().enumerate() {
                    if mask & (1 << user) != 0 && s > 0 && best.is_none_or(|b| s > b.2) {
                        best = Some((file, mask, s));
                    }
                }
            }
            let (file, mask, s) = best.expect("positive usage implies a cached subfile");
            let moved = s.min(used - cap);
            sizes[file][mask] -= moved;
            sizes[file][0] += moved;
        }
    }

    let slack = (1u64 << k) as f64;
    let deviates = sizes.iter().enumerate().any(|(file, row)| {
        row.iter()
            .zip(x.row(file))
            .any(|(&s, &v)| (s as f64 - v * ff).abs() > slack)
    });
    if deviates {
        return Err(Error::Quantization { f, min_f: min_integral_f(x) });
    }
    PlacementRealization::from_sizes(inst, f, sizes, seed)
}

fn round_row(row: &[f64], f: u64) -> Vec<u64> {
    let ff = f as f64;
    let raw: Vec<f64> = row.iter().map(|v| (v * ff).max(0.0)).collect();
    let mut sizes: Vec<u64> = raw.iter().map(|r| ((r + ROUND_TOL).floor() as u64).min(f)).collect();
    let assigned: u64 = sizes.iter().sum();
    let mut order: Vec<usize> = (0..row.len()).collect();
    if assigned <= f {
        // Stable sort: equal remainders keep ascending mask order.
        order.sort_by(|&a, &b| (raw[b] - sizes[b] as f64).total_cmp(&(raw[a] - sizes[a] as f64)));
        for &m in order.iter().cycle().take((f - assigned) as usize) {
            sizes[m] += 1;
        }
    } else {
        order.sort_by(|&a, &b| (raw[a] - sizes[a] as f64).total_cmp(&(raw[b] - sizes[b] as f64)));
        let mut excess = assigned - f;
        for &m in order.iter().cycle() {
            if excess == 0 {
                break;
            }
            if sizes[m] > 0 {
                sizes[m] -= 1;
                excess -= 1;
            }
        }
    }
    sizes
}
