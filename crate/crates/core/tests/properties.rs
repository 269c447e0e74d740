use codedcache::bounds::lb_genie;
use codedcache::evaluator::{avg_load_bruteforce, avg_load_monotone, avg_load_symmetric, avg_load_uniform};
use codedcache::optimizer::{baseline_mn_centralized, solve_problem3};
use codedcache::partition::{
    check_full_feasible, check_symmetric_feasible, expand_symmetric, expand_uniform, symmetrize, FullPartition,
    Instance, UniformPartition,
};
use codedcache::popularity::zipf;
use codedcache::math::binomial;
use proptest::prelude::*;

fn random_full(k: usize, n: usize, weights: &[f64]) -> FullPartition {
    let subsets = 1usize << k;
    let mut x = FullPartition::zeros(k, n).unwrap();
    for file in 0..n {
        let row = &weights[file * subsets..(file + 1) * subsets];
        let total: f64 = row.iter().sum();
        for (mask, w) in row.iter().enumerate() {
            x.set(file, mask as u32, w / total);
        }
    }
    x
}

fn used_memory(x: &FullPartition) -> f64 {
    let k = x.users();
    (0..k)
        .map(|user| {
            (0..x.files())
                .map(|f| (0..1u32 << k).filter(|m| m & (1 << user) != 0).map(|m| x.get(f, m)).sum::<f64>())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetrizing_never_hurts(k in 1usize..=3, n in 1usize..=3, gamma in 0.0f64..2.0,
                                weights in proptest::collection::vec(0.01f64..1.0, 24)) {
        let x = random_full(k, n, &weights);
        let m = used_memory(&x).min(n as f64);
        let inst = Instance::new(k, n, m, zipf(n, gamma).unwrap()).unwrap();
        prop_assert!(check_full_feasible(&x, &inst).unwrap().is_feasible());
        let y = symmetrize(&x, &inst).unwrap();
        prop_assert!(check_symmetric_feasible(&y, &inst).unwrap().is_feasible());
        let before = avg_load_bruteforce(&x, &inst).unwrap();
        let after = avg_load_symmetric(&y, &inst).unwrap();
        prop_assert!(after <= before + 1e-12, "{after} > {before}");
    }

    #[test]
    fn uniform_formula_matches_general_evaluators(k in 1usize..=4, n in 1usize..=4,
                                                   weights in proptest::collection::vec(0.0f64..1.0, 5)) {
        let w = &weights[..=k];
        let total: f64 = (0..=k).map(|s| binomial(k, s) * w[s]).sum();
        prop_assume!(total > 1e-6);
        let z = UniformPartition::new(w.iter().map(|v| v / total).collect()).unwrap();
        let y = expand_uniform(&z, n).unwrap();
        let m = y.memory_used().min(n as f64);
        let inst = Instance::uniform(k, n, m).unwrap();
        let closed = avg_load_uniform(&z);
        prop_assert!((avg_load_monotone(&y, &inst).unwrap() - closed).abs() < 1e-10);
        prop_assert!((avg_load_bruteforce(&expand_symmetric(&y).unwrap(), &inst).unwrap() - closed).abs() < 1e-10);
    }

    #[test]
    fn optimum_is_sandwiched(k in 1usize..=5, n in 1usize..=8, frac in 0.0f64..=1.0, gamma in 0.0f64..2.0) {
        let inst = Instance::new(k, n, frac * n as f64, zipf(n, gamma).unwrap()).unwrap();
        let opt = solve_problem3(&inst).unwrap();
        let y = opt.symmetric().unwrap();
        prop_assert!(check_symmetric_feasible(y, &inst).unwrap().is_feasible());
        prop_assert!((avg_load_monotone(y, &inst).unwrap() - opt.value).abs() < 1e-8);
        let lb = lb_genie(&inst);
        let base = baseline_mn_centralized(&inst).unwrap().value;
        prop_assert!(0.0 <= lb && lb <= opt.value + 1e-7, "{lb} vs {}", opt.value);
        prop_assert!(opt.value <= base + 1e-7, "{} vs {base}", opt.value);
    }
}
