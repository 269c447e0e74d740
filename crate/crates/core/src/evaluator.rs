//! Average load of a partition, computed four independent ways:
//! exhaustive over demand vectors (full `x`), over per-type request tuples
//! (symmetric `y`), by the tail-sum closed form (monotone `y`) and by the
//! per-type closed form (uniform `z`).

use crate::error::{Error, Result};
use crate::exec::{map_blocks, Execution};
use crate::math::{binomial, power_difference, KahanSum};
use crate::partition::{is_monotone, DemandVector, FullPartition, Instance, SymmetricPartition, UniformPartition};

/// Default cap on the number of enumerated demand tuples.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

const BLOCK: u64 = 4096;

/// Load for one demand vector: `sum over nonempty S of max_{k in S} x[d_k][S \ {k}]`.
pub fn load_for_demand(x: &FullPartition, d: &DemandVector) -> Result<f64> {
    d.check_shape(x.users(), x.files())?;
    Ok(demand_load(x, d.files()))
}

fn demand_load(x: &FullPartition, d: &[usize]) -> f64 {
    let k = x.users();
    let mut total = 0.0;
    for mask in 1u32..(1 << k) {
        let mut longest = 0.0f64;
        let mut rest = mask;
        while rest != 0 {
            let user = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            longest = longest.max(x.get(d[user], mask & !(1 << user)));
        }
        total += longest;
    }
    total
}

fn checked_count(base: usize, exp: usize) -> Option<u64> {
    (base as u64).checked_pow(exp as u32)
}

/// Exact expectation of [`load_for_demand`] over all `N^K` demand vectors.
pub fn avg_load_bruteforce(x: &FullPartition, inst: &Instance) -> Result<f64> {
    avg_load_bruteforce_with(x, inst, DEFAULT_ENUMERATION_CAP, Execution::default())
}

pub fn avg_load_bruteforce_with(
    x: &FullPartition,
    inst: &Instance,
    cap: u64,
    exec: Execution,
) -> Result<f64> {
    if x.users() != inst.k() || x.files() != inst.n() {
        return Err(Error::Shape("partition does not match instance".into()));
    }
    let (k, n) = (inst.k(), inst.n());
    let total = checked_count(n, k).filter(|t| *t <= cap).ok_or(Error::Capacity {
        what: "demand enumeration N^K",
        required: (n as u128).saturating_pow(k as u32),
        cap: cap as u128,
    })?;
    let probs = inst.pop().probs();
    let blocks = map_blocks(exec, total, BLOCK, |start, end| {
        let mut d = crate::partition::decode_index(start, k, n);
        let mut acc = KahanSum::new();
        for _ in start..end {
            let weight: f64 = d.iter().map(|&f| probs[f]).product();
            if weight > 0.0 {
                acc.add(weight * demand_load(x, &d));
            }
            advance(&mut d, n);
        }
        acc.value()
    });
    Ok(blocks.into_iter().collect::<KahanSum>().value())
}

/// Odometer increment, last digit fastest.
fn advance(d: &mut [usize], base: usize) {
    for digit in d.iter_mut().rev() {
        *digit += 1;
        if *digit < base {
            return;
        }
        *digit = 0;
    }
}

/// Average load of a symmetric partition by enumerating request tuples per type:
/// `sum_s C(K,s) sum_{(d_1..d_s) in N^s} prod p_{d_k} max_k y[d_k][s-1]`.
///
/// Makes no monotonicity assumption on `y`.
pub fn avg_load_symmetric(y: &SymmetricPartition, inst: &Instance) -> Result<f64> {
    avg_load_symmetric_with(y, inst, DEFAULT_ENUMERATION_CAP, Execution::default())
}

pub fn avg_load_symmetric_with(
    y: &SymmetricPartition,
    inst: &Instance,
    cap: u64,
    exec: Execution,
) -> Result<f64> {
    if y.users() != inst.k() || y.files() != inst.n() {
        return Err(Error::Shape("partition does not match instance".into()));
    }
    let (k, n) = (inst.k(), inst.n());
    let required: Option<u64> = (1..=k).try_fold(0u64, |acc, s| acc.checked_add(checked_count(n, s)?));
    if required.is_none_or(|r| r > cap) {
        return Err(Error::Capacity {
            what: "request-tuple enumeration sum_s N^s",
            required: (1..=k).map(|s| (n as u128).saturating_pow(s as u32)).sum(),
            cap: cap as u128,
        });
    }
    let probs = inst.pop().probs();
    let mut outer = KahanSum::new();
    for s in 1..=k {
        let count = checked_count(n, s).expect("checked above");
        let blocks = map_blocks(exec, count, BLOCK, |start, end| {
            let mut d = crate::partition::decode_index(start, s, n);
            let mut acc = KahanSum::new();
            for _ in start..end {
                let weight: f64 = d.iter().map(|&f| probs[f]).product();
                let longest = d.iter().map(|&f| y.get(f, s - 1)).fold(0.0, f64::max);
                acc.add(weight * longest);
                advance(&mut d, n);
            }
            acc.value()
        });
        outer.add(binomial(k, s) * blocks.into_iter().collect::<KahanSum>().value());
    }
    Ok(outer.value())
}

/// Coefficient of `y[n][s-1]` in the tail-sum form of the average load,
/// `C(K,s) * (T_n^s - T_{n+1}^s)` with `T_n = sum_{n' >= n} p_{n'}`.
///
/// Indexed `[n][s-1]` for `n` in `0..N`, `s` in `1..=K`.
pub fn monotone_coefficients(inst: &Instance) -> Vec<Vec<f64>> {
    let k = inst.k();
    let tails = inst.pop().tails();
    let probs = inst.pop().probs();
    (0..inst.n())
        .map(|n| {
            (1..=k)
                .map(|s| binomial(k, s) * power_difference(tails[n], tails[n + 1], probs[n], s as u32))
                .collect()
        })
        .collect()
}

/// Tail-sum closed form, valid only for monotone `y` (rejects otherwise).
pub fn avg_load_monotone(y: &SymmetricPartition, inst: &Instance) -> Result<f64> {
    if y.users() != inst.k() || y.files() != inst.n() {
        return Err(Error::Shape("partition does not match instance".into()));
    }
    if !is_monotone(y) {
        return Err(Error::Precondition(
            "tail-sum load formula requires y[n][s] >= y[n+1][s] for s >= 1".into(),
        ));
    }
    let coeffs = monotone_coefficients(inst);
    let mut acc = KahanSum::new();
    for (n, row) in coeffs.iter().enumerate() {
        for (s1, c) in row.iter().enumerate() {
            acc.add(c * y.get(n, s1));
        }
    }
    Ok(acc.value())
}

/// `sum_s C(K,s) (K-s)/(s+1) z_s`.
pub fn avg_load_uniform(z: &UniformPartition) -> f64 {
    let k = z.users();
    (0..=k)
        .map(|s| binomial(k, s) * (k - s) as f64 / (s + 1) as f64 * z.get(s))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{expand_symmetric, expand_uniform};
    use crate::popularity::zipf;

    fn mn_pair() -> (Instance, FullPartition) {
        let inst = Instance::uniform(2, 2, 1.0).unwrap();
        let z = UniformPartition::new(vec![0.0, 0.5, 0.0]).unwrap();
        let x = expand_symmetric(&expand_uniform(&z, 2).unwrap()).unwrap();
        (inst, x)
    }

    #[test]
    fn single_demand_loads() {
        let x = FullPartition::uncached(3, 2).unwrap();
        let d = DemandVector::from_one_based(&[1, 2, 2], 2).unwrap();
        assert_eq!(load_for_demand(&x, &d).unwrap(), 3.0);

        let mut all = FullPartition::zeros(3, 2).unwrap();
        all.set(0, 0b111, 1.0);
        all.set(1, 0b111, 1.0);
        assert_eq!(load_for_demand(&all, &d).unwrap(), 0.0);

        let (_, x) = mn_pair();
        let d = DemandVector::from_one_based(&[1, 2], 2).unwrap();
        assert_eq!(load_for_demand(&x, &d).unwrap(), 0.5);
    }

    #[test]
    fn demand_shape_checked() {
        let x = FullPartition::uncached(2, 2).unwrap();
        let d = DemandVector::from_one_based(&[1], 2).unwrap();
        assert!(matches!(load_for_demand(&x, &d), Err(Error::Shape(_))));
    }

    #[test]
    fn bruteforce_small_cases() {
        let inst = Instance::new(3, 3, 0.0, zipf(3, 1.2).unwrap()).unwrap();
        let x = FullPartition::uncached(3, 3).unwrap();
        assert!((avg_load_bruteforce(&x, &inst).unwrap() - 3.0).abs() < 1e-14);

        // Four equally likely demands, each needing one pair message of 1/2.
        let (inst, x) = mn_pair();
        assert_eq!(avg_load_bruteforce(&x, &inst).unwrap(), 0.5);
    }

    #[test]
    fn bruteforce_cap() {
        let (inst, x) = mn_pair();
        let err = avg_load_bruteforce_with(&x, &inst, 3, Execution::Sequential).unwrap_err();
        assert!(matches!(err, Error::Capacity { cap: 3, required: 4, .. }));
    }

    #[test]
    fn symmetric_and_monotone_forms() {
        let inst = Instance::new(3, 4, 0.0, zipf(4, 0.8).unwrap()).unwrap();
        let y = SymmetricPartition::new(vec![vec![1.0, 0.0, 0.0, 0.0]; 4]).unwrap();
        assert!((avg_load_symmetric(&y, &inst).unwrap() - 3.0).abs() < 1e-14);
        assert!((avg_load_monotone(&y, &inst).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn uniform_closed_form() {
        assert_eq!(avg_load_uniform(&UniformPartition::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap()), 3.0);
        assert_eq!(avg_load_uniform(&UniformPartition::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap()), 0.0);
        assert_eq!(avg_load_uniform(&UniformPartition::new(vec![0.0, 0.5, 0.0]).unwrap()), 0.5);
    }

    #[test]
    fn uniform_forms_agree() {
        let inst = Instance::uniform(3, 3, 1.5).unwrap();
        let z = UniformPartition::new(vec![0.0, 1.0 / 6.0, 1.0 / 6.0, 0.0]).unwrap();
        let y = expand_uniform(&z, 3).unwrap();
        let closed = avg_load_uniform(&z);
        assert!((avg_load_symmetric(&y, &inst).unwrap() - closed).abs() < 1e-12);
        assert!((avg_load_monotone(&y, &inst).unwrap() - closed).abs() < 1e-12);
    }

    #[test]
    fn monotone_rejects_unsorted_rows() {
        let inst = Instance::uniform(1, 2, 0.5).unwrap();
        let y = SymmetricPartition::new(vec![vec![0.9, 0.1], vec![0.8, 0.2]]).unwrap();
        assert!(matches!(avg_load_monotone(&y, &inst), Err(Error::Precondition(_))));
        assert!(avg_load_symmetric(&y, &inst).is_ok());
    }

    #[test]
    fn sequential_and_parallel_identical() {
        let inst = Instance::new(4, 4, 1.0, zipf(4, 1.1).unwrap()).unwrap();
        let y = SymmetricPartition::new(vec![
            vec![0.3, 0.1, 0.05, 0.0, 0.0],
            vec![0.5, 0.1, 0.0166, 0.0, 0.0],
            vec![0.7, 0.05, 0.0166, 0.0, 0.0],
            vec![0.8, 0.05, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let x = expand_symmetric(&y).unwrap();
        let a = avg_load_bruteforce_with(&x, &inst, 1 << 20, Execution::Sequential).unwrap();
        let b = avg_load_bruteforce_with(&x, &inst, 1 << 20, Execution::Parallel).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
