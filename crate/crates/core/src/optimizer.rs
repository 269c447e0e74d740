//! Placement optimization.
//!
//! * [`solve_problem3`]: per-type symmetric `y` with the popularity-ordering
//!   constraints, objective in tail-sum form. `(K+1) N` variables.
//! * [`solve_problem4`]: uniform popularity, per-type `z`. `K+1` variables.
//! * [`solve_problem1_oracle`]: full `x` with an epigraph variable per
//!   (user subset, request tuple); exponential, used to certify the others.
//! * [`solve_problem2_oracle`]: symmetric `y` without the ordering
//!   constraints, epigraph over request tuples.
//! * [`closed_form_uniform`], [`verify_kkt_uniform`], [`baseline_mn_centralized`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{avg_load_bruteforce, avg_load_monotone, avg_load_uniform, monotone_coefficients};
use crate::lp::{self, LinearProgram, LpSolution, LpStatus, Residuals};
use crate::math::{binomial, KahanSum};
use crate::partition::{
    decode_index, expand_uniform, FullPartition, Instance, Partition, SymmetricPartition, UniformPartition,
};

/// Cap on epigraph variables in the exponential oracles.
pub const EPIGRAPH_CAP: u64 = 5000;

/// Tolerance for treating `K M / N` as an integer.
pub const INTEGRALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub status: LpStatus,
    pub iterations: usize,
    pub variables: usize,
    pub equality_rows: usize,
    pub inequality_rows: usize,
    pub lp_objective: f64,
    pub residuals: Residuals,
}

impl Diagnostics {
    fn from_lp(lp: &LinearProgram, sol: &LpSolution) -> Self {
        Self {
            status: sol.status,
            iterations: sol.iterations,
            variables: lp.num_vars(),
            equality_rows: lp.num_eq(),
            inequality_rows: lp.num_ub(),
            lp_objective: sol.objective,
            residuals: sol.residuals,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub problem: &'static str,
    pub value: f64,
    pub partition: Partition,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

impl OptResult {
    pub fn symmetric(&self) -> Option<&SymmetricPartition> {
        match &self.partition {
            Partition::Symmetric(y) => Some(y),
            _ => None,
        }
    }

    pub fn uniform(&self) -> Option<&UniformPartition> {
        match &self.partition {
            Partition::Uniform(z) => Some(z),
            _ => None,
        }
    }

    pub fn full(&self) -> Option<&FullPartition> {
        match &self.partition {
            Partition::Full(x) => Some(x),
            _ => None,
        }
    }
}

fn solve_checked(lp: &LinearProgram) -> Result<LpSolution> {
    let sol = lp::solve(lp)?;
    if !sol.is_optimal() {
        // Nothing cached is always feasible, so anything else is a solver fault.
        return Err(Error::Solver(format!("placement LP ended with status {:?}", sol.status)));
    }
    Ok(sol)
}

#[inline]
fn y_var(users: usize, file: usize, s: usize) -> usize {
    file * (users + 1) + s
}

/// Partition-sum and memory rows over symmetric `y` variables.
fn add_symmetric_constraints(lp: &mut LinearProgram, users: usize, files: usize, cache: f64) {
    for n in 0..files {
        let terms = (0..=users).map(|s| (y_var(users, n, s), binomial(users, s))).collect();
        lp.add_eq(terms, 1.0);
    }
    let memory = (0..files)
        .flat_map(|n| (1..=users).map(move |s| (y_var(users, n, s), binomial(users - 1, s - 1))))
        .collect();
    lp.add_le(memory, cache);
}

fn rows_from(users: usize, files: usize, v: &[f64]) -> Result<SymmetricPartition> {
    SymmetricPartition::new(
        (0..files)
            .map(|n| v[y_var(users, n, 0)..=y_var(users, n, users)].to_vec())
            .collect(),
    )
}

/// The tail-sum placement LP for `inst` (popularity assumed sorted).
pub fn problem3_program(inst: &Instance) -> LinearProgram {
    let (k, n) = (inst.k(), inst.n());
    let mut lp = LinearProgram::new((k + 1) * n);
    for (file, row) in monotone_coefficients(inst).iter().enumerate() {
        for (s1, &c) in row.iter().enumerate() {
            lp.set_cost(y_var(k, file, s1), c);
        }
    }
    add_symmetric_constraints(&mut lp, k, n, inst.m());
    for file in 0..n.saturating_sub(1) {
        for s in 1..=k {
            lp.add_le(vec![(y_var(k, file + 1, s), 1.0), (y_var(k, file, s), -1.0)], 0.0);
        }
    }
    lp
}

/// The ordering constraints can bind under skewed popularity, in which case
/// the value exceeds [`solve_problem2_oracle`]'s.
pub fn solve_problem3(inst: &Instance) -> Result<OptResult> {
    let lp = problem3_program(inst);
    let sol = solve_checked(&lp)?;
    let y = rows_from(inst.k(), inst.n(), &sol.x)?;
    Ok(OptResult {
        problem: "problem3",
        value: sol.objective,
        partition: Partition::Symmetric(y),
        diagnostics: Some(Diagnostics::from_lp(&lp, &sol)),
    })
}

pub fn problem4_program(users: usize, files: usize, cache: f64) -> Result<LinearProgram> {
    if users == 0 || files == 0 || !(0.0..=files as f64).contains(&cache) {
        return Err(Error::InvalidInstance(format!("K={users}, N={files}, M={cache}")));
    }
    let k = users;
    let mut lp = LinearProgram::new(k + 1);
    for s in 0..=k {
        lp.set_cost(s, binomial(k, s) * (k - s) as f64 / (s + 1) as f64);
    }
    lp.add_eq((0..=k).map(|s| (s, binomial(k, s))).collect(), 1.0);
    lp.add_le(
        (0..=k).map(|s| (s, binomial(k, s) * s as f64)).collect(),
        k as f64 * cache / files as f64,
    );
    Ok(lp)
}

/// The uniform program together with the raw LP solution, whose duals certify it.
pub fn solve_problem4_lp(users: usize, files: usize, cache: f64) -> Result<(OptResult, LpSolution)> {
    let lp = problem4_program(users, files, cache)?;
    let sol = solve_checked(&lp)?;
    let z = UniformPartition::new(sol.x.clone())?;
    let result = OptResult {
        problem: "problem4",
        value: sol.objective,
        partition: Partition::Uniform(z),
        diagnostics: Some(Diagnostics::from_lp(&lp, &sol)),
    };
    Ok((result, sol))
}

pub fn solve_problem4(users: usize, files: usize, cache: f64) -> Result<OptResult> {
    solve_problem4_lp(users, files, cache).map(|(r, _)| r)
}

/// `K M / N` as an integer, when it is one.
pub fn integral_t(users: usize, files: usize, cache: f64) -> Option<usize> {
    let t = users as f64 * cache / files as f64;
    let r = t.round();
    ((t - r).abs() <= INTEGRALITY_TOL && r >= 0.0 && r <= users as f64).then_some(r as usize)
}

fn single_type(users: usize, t: usize) -> UniformPartition {
    let mut z = vec![0.0; users + 1];
    z[t] = 1.0 / binomial(users, t);
    UniformPartition::new(z).expect("K >= 1")
}

/// Closed-form optimum for integer `K M / N`.
pub fn closed_form_uniform(users: usize, files: usize, cache: f64) -> Result<OptResult> {
    let t = integral_t(users, files, cache).ok_or_else(|| {
        Error::Precondition(format!(
            "K M / N = {} is not an integer; use solve_problem4",
            users as f64 * cache / files as f64
        ))
    })?;
    let ratio = cache / files as f64;
    let value = users as f64 * (1.0 - ratio) / (1.0 + users as f64 * ratio);
    Ok(OptResult {
        problem: "closed_form_uniform",
        value,
        partition: Partition::Uniform(single_type(users, t)),
        diagnostics: None,
    })
}

/// Full-granularity placement LP with epigraph variables
/// `w[S, d_S] >= x[d_k][S \ {k}]` for every `k in S`.
pub fn problem1_program(inst: &Instance) -> Result<LinearProgram> {
    let (k, n) = (inst.k(), inst.n());
    let epi = (n as u64 + 1)
        .checked_pow(k as u32)
        .map(|v| v - 1)
        .filter(|v| *v <= EPIGRAPH_CAP)
        .ok_or(Error::Capacity {
            what: "epigraph variables (1+N)^K - 1",
            required: (n as u128 + 1).saturating_pow(k as u32) - 1,
            cap: EPIGRAPH_CAP as u128,
        })?;
    let subsets = 1usize << k;
    let x_var = |file: usize, mask: u32| file * subsets + mask as usize;
    let mut lp = LinearProgram::new(n * subsets + epi as usize);
    let probs = inst.pop().probs();

    for file in 0..n {
        lp.add_eq((0..subsets as u32).map(|m| (x_var(file, m), 1.0)).collect(), 1.0);
    }
    for user in 0..k {
        let terms = (0..n)
            .flat_map(|file| {
                (0..subsets as u32)
                    .filter(move |m| m & (1 << user) != 0)
                    .map(move |m| (x_var(file, m), 1.0))
            })
            .collect();
        lp.add_le(terms, inst.m());
    }

    let mut next = n * subsets;
    for mask in 1u32..subsets as u32 {
        let members: Vec<usize> = (0..k).filter(|u| mask & (1 << u) != 0).collect();
        let tuples = (n as u64).pow(members.len() as u32);
        for idx in 0..tuples {
            let d = decode_index(idx, members.len(), n);
            let weight: f64 = d.iter().map(|&f| probs[f]).product();
            lp.set_cost(next, weight);
            for (pos, &user) in members.iter().enumerate() {
                lp.add_le(vec![(x_var(d[pos], mask & !(1 << user)), 1.0), (next, -1.0)], 0.0);
            }
            next += 1;
        }
    }
    Ok(lp)
}

pub fn solve_problem1_oracle(inst: &Instance) -> Result<OptResult> {
    let lp = problem1_program(inst)?;
    let sol = solve_checked(&lp)?;
    let mut x = FullPartition::zeros(inst.k(), inst.n())?;
    let subsets = 1usize << inst.k();
    for file in 0..inst.n() {
        for mask in 0..subsets {
            x.set(file, mask as u32, sol.x[file * subsets + mask]);
        }
    }
    // Report the Kahan-summed expectation of the returned placement.
    let value = avg_load_bruteforce(&x, inst)?;
    Ok(OptResult {
        problem: "problem1",
        value,
        partition: Partition::Full(x),
        diagnostics: Some(Diagnostics::from_lp(&lp, &sol)),
    })
}

/// Symmetric placement LP without the ordering constraints, objective via
/// epigraph variables over request tuples of each type.
pub fn problem2_program(inst: &Instance) -> Result<LinearProgram> {
    let (k, n) = (inst.k(), inst.n());
    let epi: Option<u64> = (1..=k).try_fold(0u64, |acc, s| acc.checked_add((n as u64).checked_pow(s as u32)?));
    let epi = epi.filter(|e| *e <= EPIGRAPH_CAP).ok_or(Error::Capacity {
        what: "epigraph variables sum_s N^s",
        required: (1..=k).map(|s| (n as u128).saturating_pow(s as u32)).sum(),
        cap: EPIGRAPH_CAP as u128,
    })?;
    let mut lp = LinearProgram::new((k + 1) * n + epi as usize);
    add_symmetric_constraints(&mut lp, k, n, inst.m());
    let probs = inst.pop().probs();
    let mut next = (k + 1) * n;
    for s in 1..=k {
        for idx in 0..(n as u64).pow(s as u32) {
            let d = decode_index(idx, s, n);
            let weight = binomial(k, s) * d.iter().map(|&f| probs[f]).product::<f64>();
            lp.set_cost(next, weight);
            let mut files = d.clone();
            files.sort_unstable();
            files.dedup();
            for f in files {
                lp.add_le(vec![(y_var(k, f, s - 1), 1.0), (next, -1.0)], 0.0);
            }
            next += 1;
        }
    }
    Ok(lp)
}

pub fn solve_problem2_oracle(inst: &Instance) -> Result<OptResult> {
    let lp = problem2_program(inst)?;
    let sol = solve_checked(&lp)?;
    let y = rows_from(inst.k(), inst.n(), &sol.x)?;
    Ok(OptResult {
        problem: "problem2",
        value: sol.objective,
        partition: Partition::Symmetric(y),
        diagnostics: Some(Diagnostics::from_lp(&lp, &sol)),
    })
}

/// Dual certificate for the uniform-popularity program at integer `K M / N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktCertificate {
    /// Multipliers of `z_s >= 0`.
    pub eta: Vec<f64>,
    /// Multiplier of the memory constraint.
    pub theta: f64,
    /// Multiplier of the partition-sum constraint.
    pub nu: f64,
    /// `h(s) = theta s^2 + (theta - nu - 1) s + K - nu`.
    pub h: Vec<f64>,
    /// Per-type stationarity residuals.
    pub stationarity: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementarity_residual: f64,
}

impl KktCertificate {
    pub fn max_residual(&self) -> f64 {
        self.stationarity
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
            .max(self.primal_residual)
            .max(self.dual_residual)
            .max(self.complementarity_residual)
    }
}

/// Evaluate every KKT condition of the uniform program for the given
/// primal point and multipliers.
pub fn kkt_residuals(z: &UniformPartition, t: f64, eta: &[f64], theta: f64, nu: f64) -> KktCertificate {
    let k = z.users();
    let kf = k as f64;
    let zs = z.as_slice();
    let partition_sum: f64 = (0..=k).map(|s| binomial(k, s) * zs[s]).sum();
    let memory: f64 = (0..=k).map(|s| binomial(k, s) * s as f64 * zs[s]).sum();

    let mut primal = (partition_sum - 1.0).abs().max(memory - t);
    for &v in zs {
        primal = primal.max(-v).max(v - 1.0);
    }
    let dual = eta.iter().fold(-theta, |m, &e| m.max(-e)).max(0.0);
    let comp = eta
        .iter()
        .zip(zs)
        .map(|(e, v)| (e * v).abs())
        .fold((theta * (memory - t)).abs(), f64::max);
    let stationarity = (0..=k)
        .map(|s| {
            let c = binomial(k, s);
            c * (kf - s as f64) / (s + 1) as f64 - eta[s] + theta * s as f64 * c - nu * c
        })
        .collect();
    let h = (0..=k)
        .map(|s| {
            let s = s as f64;
            theta * s * s + (theta - nu - 1.0) * s + kf - nu
        })
        .collect();
    KktCertificate {
        eta: eta.to_vec(),
        theta,
        nu,
        h,
        stationarity,
        primal_residual: primal.max(0.0),
        dual_residual: dual,
        complementarity_residual: comp,
    }
}

/// Certificate built from the explicit multipliers for integer `t = K M / N`.
///
/// For `0 < t < K`: `theta = (K+1)/(t+1)^2`, `nu = (2Kt + K - t^2)/(t+1)^2`,
/// `eta_s = C(K,s) theta (s-t)^2 / (s+1)`. At `t = 0` and `t = K` the
/// multiplier families are intervals in `theta`; the midpoint is used.
pub fn verify_kkt_uniform(z: &UniformPartition, users: usize, files: usize, cache: f64) -> Result<KktCertificate> {
    if z.users() != users {
        return Err(Error::Shape(format!("z has {} entries, K+1 = {}", z.as_slice().len(), users + 1)));
    }
    let t = integral_t(users, files, cache)
        .ok_or_else(|| Error::Precondition("explicit multipliers need integer K M / N".into()))?;
    let k = users as f64;
    let tf = t as f64;
    let (theta, nu) = if t == 0 {
        ((k + 1.0) / 2.0, k)
    } else if t == users {
        let theta = 1.0 / (2.0 * (k + 1.0));
        (theta, k * theta)
    } else {
        let d = (tf + 1.0) * (tf + 1.0);
        ((k + 1.0) / d, (2.0 * k * tf + k - tf * tf) / d)
    };
    let eta: Vec<f64> = (0..=users)
        .map(|s| {
            let c = binomial(users, s);
            let sf = s as f64;
            if t == 0 || t == users {
                c * ((k - sf) / (sf + 1.0) + theta * sf - nu)
            } else {
                c / (sf + 1.0) * theta * (sf - tf) * (sf - tf)
            }
        })
        .collect();
    Ok(kkt_residuals(z, tf, &eta, theta, nu))
}

/// Read the KKT multipliers off the solver's duals for the uniform program.
pub fn kkt_from_lp(z: &UniformPartition, sol: &LpSolution, users: usize, files: usize, cache: f64) -> KktCertificate {
    let t = users as f64 * cache / files as f64;
    kkt_residuals(z, t, &sol.reduced_costs, -sol.ub_duals[0], sol.eq_duals[0])
}

/// Memory-sharing baseline: the single-type placement at integer `K M / N`,
/// otherwise the placement-level interpolation of the two neighbouring
/// integer points. Average load evaluated exactly under `inst`'s popularity.
pub fn baseline_mn_centralized(inst: &Instance) -> Result<OptResult> {
    let k = inst.k();
    let z = match integral_t(k, inst.n(), inst.m()) {
        Some(t) => single_type(k, t),
        None => {
            let t = inst.t();
            let lo = t.floor() as usize;
            let hi = lo + 1;
            let lambda = hi as f64 - t;
            let (a, b) = (single_type(k, lo), single_type(k, hi));
            UniformPartition::new(
                a.as_slice()
                    .iter()
                    .zip(b.as_slice())
                    .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                    .collect(),
            )?
        }
    };
    let y = expand_uniform(&z, inst.n())?;
    let value = avg_load_monotone(&y, inst)?;
    Ok(OptResult {
        problem: "baseline_mn_centralized",
        value,
        partition: Partition::Uniform(z),
        diagnostics: None,
    })
}

/// Objective of a uniform partition via its closed form, for cross-checks.
pub fn uniform_value(z: &UniformPartition) -> f64 {
    avg_load_uniform(z)
}

/// Kahan-summed `c . v` for a solved program.
pub fn objective_value(lp: &LinearProgram, v: &[f64]) -> f64 {
    lp.objective().iter().zip(v).map(|(c, x)| c * x).collect::<KahanSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::avg_load_symmetric;
    use crate::partition::{check_symmetric_feasible, check_uniform_feasible, is_monotone, memory_shares};
    use crate::popularity::zipf;

    fn zipf_inst(k: usize, n: usize, m: f64, gamma: f64) -> Instance {
        Instance::new(k, n, m, zipf(n, gamma).unwrap()).unwrap()
    }

    #[test]
    fn problem3_extremes() {
        let full = solve_problem3(&zipf_inst(3, 4, 4.0, 1.0)).unwrap();
        assert!(full.value.abs() < 1e-12);
        let none = solve_problem3(&zipf_inst(3, 4, 0.0, 1.0)).unwrap();
        assert!((none.value - 3.0).abs() < 1e-12);
        let y = none.symmetric().unwrap();
        assert!((0..4).all(|n| (y.get(n, 0) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn problem3_uniform_matches_closed_form() {
        // K = 4, N = 8, M = 2: 4 (3/4) / 2 = 1.5
        let r = solve_problem3(&Instance::uniform(4, 8, 2.0).unwrap()).unwrap();
        assert!((r.value - 1.5).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn problem3_result_invariants() {
        let inst = zipf_inst(3, 5, 1.7, 1.2);
        let r = solve_problem3(&inst).unwrap();
        let y = r.symmetric().unwrap();
        assert!(check_symmetric_feasible(y, &inst).unwrap().is_feasible());
        assert!(is_monotone(y));
        assert!((avg_load_symmetric(y, &inst).unwrap() - r.value).abs() < 1e-8);
        let q = memory_shares(y, inst.m()).unwrap();
        assert!(q.iter().sum::<f64>() <= 1.0 + 1e-9);
    }

    #[test]
    fn problem4_examples() {
        let r = solve_problem4(2, 2, 1.0).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        let z = r.uniform().unwrap();
        assert!(z.get(0).abs() < 1e-12 && (z.get(1) - 0.5).abs() < 1e-12 && z.get(2).abs() < 1e-12);

        let r = solve_problem4(3, 5, 0.0).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!((r.uniform().unwrap().get(0) - 1.0).abs() < 1e-12);

        let r = solve_problem4(3, 6, 4.0).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.uniform().unwrap().get(2) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let r = closed_form_uniform(4, 10, 5.0).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.uniform().unwrap().get(2) - 1.0 / 6.0).abs() < 1e-15);
        let r = closed_form_uniform(4, 10, 10.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.uniform().unwrap().get(4), 1.0);
        assert!(matches!(closed_form_uniform(4, 10, 3.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn closed_form_agrees_with_lp_on_grid() {
        for k in 1..=6 {
            for n in 1..=10 {
                for t in 0..=k {
                    let m = t as f64 * n as f64 / k as f64;
                    let cf = closed_form_uniform(k, n, m).unwrap();
                    let lp = solve_problem4(k, n, m).unwrap();
                    assert!((cf.value - lp.value).abs() < 1e-9, "K={k} N={n} t={t}");
                    let inst = Instance::uniform(k, n, m).unwrap();
                    assert!(check_uniform_feasible(cf.uniform().unwrap(), &inst).unwrap().is_feasible());
                }
            }
        }
    }

    #[test]
    fn problem1_small_cases() {
        let r = solve_problem1_oracle(&Instance::uniform(2, 2, 1.0).unwrap()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-10);
        let r = solve_problem1_oracle(&Instance::uniform(2, 3, 0.0).unwrap()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
        let err = solve_problem1_oracle(&Instance::uniform(5, 5, 1.0).unwrap()).unwrap_err();
        assert!(err.is_capacity());
    }

    #[test]
    fn problem1_matches_problem3_zipf() {
        let inst = zipf_inst(3, 3, 1.0, 1.0);
        let p1 = solve_problem1_oracle(&inst).unwrap();
        let p3 = solve_problem3(&inst).unwrap();
        assert!((p1.value - p3.value).abs() < 1e-7, "{} vs {}", p1.value, p3.value);
    }

    #[test]
    fn kkt_explicit_multipliers() {
        let z = closed_form_uniform(2, 2, 1.0).unwrap().uniform().unwrap().clone();
        let cert = verify_kkt_uniform(&z, 2, 2, 1.0).unwrap();
        assert!((cert.theta - 0.75).abs() < 1e-15);
        assert!((cert.nu - 1.25).abs() < 1e-15);
        assert!(cert.eta[1].abs() < 1e-15);
        assert!(cert.h[1].abs() < 1e-12);
        assert!(cert.max_residual() <= 1e-12);
    }

    #[test]
    fn kkt_boundaries() {
        for k in 1..=6 {
            for &m in &[0.0, 3.0] {
                let z = closed_form_uniform(k, 3, m).unwrap().uniform().unwrap().clone();
                let cert = verify_kkt_uniform(&z, k, 3, m).unwrap();
                assert!(cert.max_residual() <= 1e-9, "K={k} M={m}: {cert:?}");
                assert!(cert.h.iter().all(|h| *h >= -1e-9));
            }
        }
    }

    #[test]
    fn kkt_lp_duals_certify() {
        for k in 2..=6 {
            for t in 1..k {
                let (r, sol) = solve_problem4_lp(k, k, t as f64).unwrap();
                let cert = kkt_from_lp(r.uniform().unwrap(), &sol, k, k, t as f64);
                assert!(cert.max_residual() <= 1e-7, "K={k} t={t}: {cert:?}");
            }
        }
    }

    #[test]
    fn baseline_examples() {
        let inst = Instance::uniform(4, 8, 2.0).unwrap();
        assert!((baseline_mn_centralized(&inst).unwrap().value - 1.5).abs() < 1e-12);
        let inst = zipf_inst(4, 10, 10.0, 1.3);
        assert!(baseline_mn_centralized(&inst).unwrap().value.abs() < 1e-12);

        // Memory sharing: halfway between t = 1 and t = 2 at K = 4.
        let inst = zipf_inst(4, 8, 3.0, 0.0);
        let b = baseline_mn_centralized(&inst).unwrap();
        let expected = 0.5 * (4.0 * 0.75 / 2.0) + 0.5 * (4.0 * 0.5 / 3.0);
        assert!((b.value - expected).abs() < 1e-12);
        assert!(check_uniform_feasible(b.uniform().unwrap(), &inst).unwrap().is_feasible());
    }

    #[test]
    fn baseline_dominates_optimum() {
        for i in 0..=10 {
            let m = i as f64;
            let inst = zipf_inst(4, 10, m, 1.3);
            let opt = solve_problem3(&inst).unwrap().value;
            let base = baseline_mn_centralized(&inst).unwrap().value;
            assert!(opt <= base + 1e-7, "M={m}: {opt} > {base}");
        }
    }
}
