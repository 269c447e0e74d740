//! Converse (lower) bounds on the average load.

use serde::Serialize;

use crate::math::binomial;
use crate::partition::Instance;

/// Within this distance `N' p_{N'}` is treated as exactly 1.
const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformTerm {
    pub l: usize,
    /// `(1 - (1-1/N)^l)(N - l M)`
    pub first: f64,
    /// `(1 - (1-1/N)^l) N - l(l+1) M / (2N)`
    pub second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformBound {
    pub value: f64,
    pub terms: Vec<UniformTerm>,
}

pub fn lb_uniform_terms(users: usize, files: usize, cache: f64) -> UniformBound {
    let n = files as f64;
    let terms: Vec<UniformTerm> = (1..=users)
        .map(|l| {
            let lf = l as f64;
            let hit = 1.0 - (1.0 - 1.0 / n).powi(l as i32);
            UniformTerm {
                l,
                first: hit * (n - lf * cache),
                second: hit * n - lf * (lf + 1.0) / (2.0 * n) * cache,
            }
        })
        .collect();
    let value = terms.iter().fold(0.0, |acc: f64, t| acc.max(t.first).max(t.second));
    UniformBound { value, terms }
}

/// Uniform-popularity converse bound, floored at 0.
pub fn lb_uniform(users: usize, files: usize, cache: f64) -> f64 {
    lb_uniform_terms(users, files, cache).value
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenieBound {
    pub value: f64,
    /// 1-based number of retained files attaining the max.
    pub argmax_n: usize,
    /// Bound for each `N' = 1..=N`.
    pub per_n: Vec<f64>,
}

/// Bound obtained by keeping only the `N'` most popular files, for one `N'`.
pub fn genie_term(inst: &Instance, kept: usize) -> f64 {
    let k = inst.k();
    let mut q = kept as f64 * inst.pop().p(kept);
    if (q - 1.0).abs() <= SNAP_TOL {
        q = 1.0;
    }
    (1..=k)
        .map(|active| {
            let idle = k - active;
            // powi(0) is 1 for a zero base.
            binomial(k, active)
                * q.powi(active as i32)
                * (1.0 - q).powi(idle as i32)
                * lb_uniform(active, kept, inst.m())
        })
        .sum()
}

pub fn lb_genie_detail(inst: &Instance) -> GenieBound {
    let per_n: Vec<f64> = (1..=inst.n()).map(|kept| genie_term(inst, kept)).collect();
    let (mut argmax_n, mut value) = (1, per_n[0]);
    for (i, &v) in per_n.iter().enumerate().skip(1) {
        if v > value {
            value = v;
            argmax_n = i + 1;
        }
    }
    GenieBound { value: value.max(0.0), argmax_n, per_n }
}

pub fn lb_genie(inst: &Instance) -> f64 {
    lb_genie_detail(inst).value
}
