//! Acceptance criteria, shared by the integration suite and `selftest`.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{lb_genie, lb_uniform};
use crate::error::Result;
use crate::evaluator::{avg_load_bruteforce, avg_load_monotone, avg_load_symmetric, load_for_demand};
use crate::exec::{map_ordered, Execution};
use crate::math::binomial;
use crate::optimizer::{
    baseline_mn_centralized, closed_form_uniform, solve_problem1_oracle, solve_problem2_oracle, solve_problem3,
    solve_problem4, verify_kkt_uniform,
};
use crate::partition::{expand_symmetric, DemandVector, FullPartition, Instance, SymmetricPartition};
use crate::popularity::zipf;
use crate::simulator::{
    coloring_check, decode, deliver_hcd, deliver_zero_pad, min_integral_f, quantize, PlacementRealization,
};

const SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    /// Largest observed deviation from the expected value.
    pub worst: f64,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} {:<34} {} ({} checks, worst deviation {:.3e}, {:.2?})",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.checks,
            self.worst,
            self.elapsed
        )?;
        for msg in self.failures.iter().take(5) {
            write!(f, "\n    {msg}")?;
        }
        if self.failures.len() > 5 {
            write!(f, "\n    ... {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

/// Accumulates checks for one criterion.
struct Tally {
    checks: usize,
    failures: Vec<String>,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Self { checks: 0, failures: Vec::new(), worst: 0.0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(&mut self, got: f64, want: f64, tol: f64, what: impl FnOnce() -> String) {
        let dev = (got - want).abs();
        if dev.is_finite() {
            self.worst = self.worst.max(dev);
        }
        self.check(dev <= tol, || format!("{}: {got} vs {want} (|diff| {dev:.3e} > {tol:.0e})", what()));
    }

    fn error(&mut self, what: String) {
        self.checks += 1;
        self.failures.push(what);
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
        self.worst = self.worst.max(other.worst);
    }

    fn report(self, id: u8, name: &'static str, start: Instant) -> CriterionReport {
        CriterionReport {
            id,
            name,
            passed: self.failures.is_empty() && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            worst: self.worst,
            elapsed: start.elapsed(),
        }
    }
}

fn zipf_instance(k: usize, n: usize, m: f64, gamma: f64) -> Result<Instance> {
    Instance::new(k, n, m, zipf(n, gamma)?)
}

/// Uniform-popularity LP optimum equals the closed form at integer `K M / N`.
pub fn criterion_1() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for k in 1..=6 {
        for n in k..=10 {
            for tt in 0..=k {
                let m = tt as f64 * n as f64 / k as f64;
                let tag = || format!("K={k} N={n} t={tt}");
                let r = match solve_problem4(k, n, m) {
                    Ok(r) => r,
                    Err(e) => {
                        t.error(format!("{}: {e}", tag()));
                        continue;
                    }
                };
                let want = k as f64 * (1.0 - m / n as f64) / (1.0 + k as f64 * m / n as f64);
                t.close(r.value, want, 1e-8, || format!("{} value", tag()));
                let z = r.uniform().expect("uniform program");
                for s in 0..=k {
                    let target = if s == tt { 1.0 / binomial(k, tt) } else { 0.0 };
                    t.close(z.get(s), target, 1e-7, || format!("{} z[{s}]", tag()));
                }
            }
        }
    }
    t.report(1, "closed-form uniform optimum", start)
}

/// Full-granularity oracle, unordered symmetric oracle and the ordered
/// tail-sum program reach the same optimum.
pub fn criterion_2(exec: Execution) -> CriterionReport {
    let start = Instant::now();
    let mut cases = Vec::new();
    for (k, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for gamma in [0.0, 1.0, 2.0] {
            for h in 0..=2 * n {
                cases.push((k, n, gamma, h as f64 / 2.0));
            }
        }
    }
    let tallies = map_ordered(exec, &cases, |&(k, n, gamma, m)| {
        let mut t = Tally::new();
        let tag = || format!("K={k} N={n} gamma={gamma} M={m}");
        let run = || -> Result<(f64, f64, f64)> {
            let inst = zipf_instance(k, n, m, gamma)?;
            Ok((
                solve_problem1_oracle(&inst)?.value,
                solve_problem2_oracle(&inst)?.value,
                solve_problem3(&inst)?.value,
            ))
        };
        match run() {
            Ok((p1, p2, p3)) => {
                t.close(p1, p3, 1e-7, || format!("{} full vs ordered", tag()));
                t.close(p2, p3, 1e-7, || format!("{} symmetric vs ordered", tag()));
            }
            Err(e) => t.error(format!("{}: {e}", tag())),
        }
        t
    });
    let mut t = Tally::new();
    tallies.into_iter().for_each(|x| t.merge(x));
    t.report(2, "optimization equivalence chain", start)
}

/// Random feasible ordered symmetric partition for `inst`'s shape.
pub fn random_monotone(rng: &mut ChaCha8Rng, k: usize, n: usize) -> SymmetricPartition {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for file in 0..n {
        let mut row = vec![0.0; k + 1];
        if file == 0 {
            let w: Vec<f64> = (0..=k).map(|_| rng.random::<f64>().powi(2)).collect();
            let total: f64 = (0..=k).map(|s| binomial(k, s) * w[s]).sum();
            for s in 0..=k {
                row[s] = w[s] / total;
            }
        } else {
            let prev = &rows[file - 1];
            let shrink = rng.random::<f64>() < 0.3;
            for s in 1..=k {
                row[s] = if shrink { prev[s] * rng.random::<f64>() } else { prev[s] };
            }
            let cached: f64 = (1..=k).map(|s| binomial(k, s) * row[s]).sum();
            row[0] = (1.0 - cached).max(0.0);
        }
        rows.push(row);
    }
    SymmetricPartition::new(rows).expect("nonempty rows")
}

/// Brute-force, symmetric-tuple and tail-sum evaluators agree.
pub fn criterion_3() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..200 {
        let k = rng.random_range(1..=4);
        let n = rng.random_range(1..=4);
        let gamma = rng.random_range(0.0..=2.0);
        let y = random_monotone(&mut rng, k, n);
        let m = (y.memory_used() * (1.0 + rng.random::<f64>() * 0.2)).min(n as f64);
        let tag = || format!("sample {i}: K={k} N={n} gamma={gamma:.3}");
        let run = || -> Result<(f64, f64, f64)> {
            let inst = zipf_instance(k, n, m, gamma)?;
            Ok((
                avg_load_bruteforce(&expand_symmetric(&y)?, &inst)?,
                avg_load_symmetric(&y, &inst)?,
                avg_load_monotone(&y, &inst)?,
            ))
        };
        match run() {
            Ok((brute, sym, mono)) => {
                t.close(brute, sym, 1e-10, || format!("{} brute vs symmetric", tag()));
                t.close(brute, mono, 1e-10, || format!("{} brute vs tail-sum", tag()));
                t.close(sym, mono, 1e-10, || format!("{} symmetric vs tail-sum", tag()));
            }
            Err(e) => t.error(format!("{}: {e}", tag())),
        }
    }
    t.report(3, "average-load evaluator agreement", start)
}

/// `(K, N, M)` shapes shared by the structural and bound criteria.
pub const STRUCTURE_SHAPES: [(usize, usize, f64); 10] = [
    (2, 4, 1.0),
    (2, 10, 3.5),
    (3, 5, 2.0),
    (3, 8, 1.5),
    (4, 6, 2.5),
    (4, 10, 2.5),
    (5, 7, 3.0),
    (5, 10, 4.0),
    (6, 8, 2.0),
    (6, 10, 5.0),
];

pub const STRUCTURE_GAMMAS: [f64; 3] = [0.5, 1.0, 1.5];

const STRUCTURE_TOL: f64 = 1e-8;

fn rows_equal(y: &SymmetricPartition, a: usize, b: usize) -> bool {
    (0..=y.users()).all(|s| (y.get(a, s) - y.get(b, s)).abs() <= STRUCTURE_TOL)
}

fn allocation(y: &SymmetricPartition, file: usize) -> f64 {
    let k = y.users();
    (1..=k).map(|s| binomial(k - 1, s - 1) * y.get(file, s)).sum()
}

fn check_grouping(t: &mut Tally, y: &SymmetricPartition, tag: &str) {
    for a in 0..y.files() {
        for b in a + 1..y.files() {
            let same_rows = rows_equal(y, a, b);
            let same_memory = (allocation(y, a) - allocation(y, b)).abs() <= STRUCTURE_TOL;
            t.check(same_rows == same_memory, || {
                format!("{tag}: files {} and {}: equal rows {same_rows}, equal memory {same_memory}", a + 1, b + 1)
            });
        }
    }
}

/// Optimal per-type placements are ordered by popularity, grouped by memory
/// allocation, and file-symmetric under uniform popularity.
pub fn criterion_4() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for &(k, n, m) in &STRUCTURE_SHAPES {
        for gamma in STRUCTURE_GAMMAS.iter().copied().chain([0.0]) {
            let tag = format!("K={k} N={n} M={m} gamma={gamma}");
            let y = match zipf_instance(k, n, m, gamma).and_then(|inst| solve_problem3(&inst)) {
                Ok(r) => r.symmetric().expect("per-type program").clone(),
                Err(e) => {
                    t.error(format!("{tag}: {e}"));
                    continue;
                }
            };
            for file in 0..n - 1 {
                for s in 1..=k {
                    let drop = y.get(file, s) - y.get(file + 1, s);
                    t.check(drop >= -STRUCTURE_TOL, || format!("{tag}: y[{}][{s}] < y[{}][{s}]", file + 1, file + 2));
                }
            }
            check_grouping(&mut t, &y, &tag);
            if gamma == 0.0 {
                for file in 1..n {
                    t.check(rows_equal(&y, 0, file), || format!("{tag}: row {} differs from row 1", file + 1));
                }
            }
        }
    }
    t.report(4, "structure of optimal placements", start)
}

/// One simulator instance: optimized placement realized at an exact `F`
/// where possible.
pub struct SimCase {
    pub inst: Instance,
    pub x: FullPartition,
    pub real: PlacementRealization,
    /// Whether `F x` is integral, so loads must match to rounding error.
    pub exact: bool,
}

const SIM_FALLBACK_F: u64 = 10_000;
const SIM_MAX_EXACT_F: u64 = 100_000;

/// The 50 randomized simulator instances (K, N in {2, 3}, M on a quarter grid).
pub fn simulator_cases() -> Result<Vec<SimCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x51);
    (0..50)
        .map(|i| {
            let k = rng.random_range(2..=3);
            let n = rng.random_range(2..=3);
            let m = n as f64 * rng.random_range(0..=4) as f64 / 4.0;
            let gamma = rng.random_range(0.0..=2.0);
            let inst = zipf_instance(k, n, m, gamma)?;
            let y = solve_problem3(&inst)?.symmetric().expect("per-type program").clone();
            let x = expand_symmetric(&y)?;
            let (f, exact) = match min_integral_f(&x) {
                Some(f) if f <= SIM_MAX_EXACT_F => (f, true),
                _ => (SIM_FALLBACK_F, false),
            };
            let real = quantize(&x, f, &inst, SEED.wrapping_add(i))?;
            Ok(SimCase { inst, x, real, exact })
        })
        .collect()
}

struct SimTallies {
    exactness: Tally,
    hcd: Tally,
    coloring: Tally,
}

fn simulate_case(case: &SimCase, idx: usize) -> SimTallies {
    let mut out = SimTallies { exactness: Tally::new(), hcd: Tally::new(), coloring: Tally::new() };
    let (k, n) = (case.inst.k(), case.inst.n());
    let f = case.real.f();
    let tol = if case.exact { 1e-9 } else { (1u64 << k) as f64 / f as f64 };
    for d in DemandVector::all(k, n) {
        let tag = || format!("case {idx} (K={k} N={n} M={} F={f}) d={:?}", case.inst.m(), d.one_based());
        let (zp, hcd) = match (deliver_zero_pad(&case.real, &d), deliver_hcd(&case.real, &d)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                out.exactness.error(format!("{}: {e}", tag()));
                continue;
            }
        };
        let expected = load_for_demand(&case.x, &d).expect("shape checked");
        out.exactness.close(zp.total_units as f64 / f as f64, expected, tol, || format!("{} load", tag()));
        out.exactness.check(decode(&case.real, &zp, &d), || format!("{} zero-pad decode", tag()));
        out.hcd.close(hcd.total_units as f64, zp.total_units as f64, 0.0, || format!("{} units", tag()));
        out.hcd.check(decode(&case.real, &hcd, &d), || format!("{} appended decode", tag()));
        out.coloring.check(coloring_check(&case.real, &d), || format!("{} coloring", tag()));
    }
    out
}

/// Criteria 5, 6 and 7 share the simulator runs.
pub fn criteria_5_to_7(exec: Execution) -> [CriterionReport; 3] {
    let start = Instant::now();
    let (mut a, mut b, mut c) = (Tally::new(), Tally::new(), Tally::new());
    match simulator_cases() {
        Ok(cases) => {
            let idx: Vec<usize> = (0..cases.len()).collect();
            for r in map_ordered(exec, &idx, |&i| simulate_case(&cases[i], i)) {
                a.merge(r.exactness);
                b.merge(r.hcd);
                c.merge(r.coloring);
            }
        }
        Err(e) => {
            for t in [&mut a, &mut b, &mut c] {
                t.error(format!("building simulator cases: {e}"));
            }
        }
    }
    [
        a.report(5, "simulated load and decoding", start),
        b.report(6, "appended delivery matches zero-pad", start),
        c.report(7, "delivery grouping is a proper coloring", start),
    ]
}

/// Converse below achievable below memory sharing; uniform reduction.
pub fn criterion_8() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for &(k, n, grid_m) in &STRUCTURE_SHAPES {
        let nf = n as f64;
        let ms = [grid_m, 0.0, nf / 4.0, nf / 2.0, 3.0 * nf / 4.0, nf];
        for gamma in STRUCTURE_GAMMAS.iter().copied().chain([0.0]) {
            for &m in &ms {
                let tag = || format!("K={k} N={n} M={m} gamma={gamma}");
                let run = || -> Result<(Instance, f64, f64)> {
                    let inst = zipf_instance(k, n, m, gamma)?;
                    let opt = solve_problem3(&inst)?.value;
                    let base = baseline_mn_centralized(&inst)?.value;
                    Ok((inst, opt, base))
                };
                let (inst, opt, base) = match run() {
                    Ok(v) => v,
                    Err(e) => {
                        t.error(format!("{}: {e}", tag()));
                        continue;
                    }
                };
                let lb = lb_genie(&inst);
                t.check(lb >= 0.0, || format!("{}: negative bound {lb}", tag()));
                t.check(lb <= opt + 1e-7, || format!("{}: bound {lb} above optimum {opt}", tag()));
                t.check(opt <= base + 1e-7, || format!("{}: optimum {opt} above baseline {base}", tag()));
                if gamma == 0.0 {
                    let lu = lb_uniform(k, n, m);
                    t.check(lb == lu, || format!("{}: genie {lb} != uniform {lu}", tag()));
                }
            }
        }
    }
    t.report(8, "bound sandwich and uniform reduction", start)
}

/// Explicit dual multipliers certify the closed-form uniform optimum.
pub fn criterion_9() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for k in 2..=8 {
        for n in [k, k + 1, 2 * k, 10] {
            for tt in 1..k {
                let m = tt as f64 * n as f64 / k as f64;
                let tag = || format!("K={k} N={n} t={tt}");
                let sources = [("closed form", closed_form_uniform(k, n, m)), ("LP", solve_problem4(k, n, m))];
                for (label, r) in sources {
                    match r.and_then(|r| verify_kkt_uniform(r.uniform().expect("uniform program"), k, n, m)) {
                        Ok(cert) => {
                            t.close(cert.max_residual(), 0.0, 1e-7, || format!("{} {label} residual", tag()));
                            let min_h = cert.h.iter().copied().fold(f64::INFINITY, f64::min);
                            t.check(min_h >= -1e-9, || format!("{} {label}: min h = {min_h}", tag()));
                            t.close(cert.h[tt], 0.0, 1e-9, || format!("{} {label}: h(t)", tag()));
                        }
                        Err(e) => t.error(format!("{} {label}: {e}", tag())),
                    }
                }
            }
        }
    }
    t.report(9, "dual certificate of uniform optimum", start)
}

pub fn run_all(exec: Execution) -> Vec<CriterionReport> {
    let [c5, c6, c7] = criteria_5_to_7(exec);
    vec![criterion_1(), criterion_2(exec), criterion_3(), criterion_4(), c5, c6, c7, criterion_8(), criterion_9()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{check_symmetric_feasible, is_monotone};

    #[test]
    fn random_partitions_are_feasible_and_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let y = random_monotone(&mut rng, 3, 4);
            assert!(is_monotone(&y));
            let inst = Instance::uniform(3, 4, y.memory_used().min(4.0)).unwrap();
            assert!(check_symmetric_feasible(&y, &inst).unwrap().is_feasible());
        }
    }

    #[test]
    fn failing_tally_reports_fail() {
        let mut t = Tally::new();
        t.close(1.0, 2.0, 0.5, || "x".into());
        let r = t.report(0, "demo", Instant::now());
        assert!(!r.passed);
        assert!(r.to_string().contains("FAIL"));
        assert!(!Tally::new().report(0, "empty", Instant::now()).passed);
    }
}
