use codedcache::evaluator::{avg_load_bruteforce, avg_load_symmetric, load_for_demand};
use codedcache::optimizer::{solve_problem1_oracle, solve_problem2_oracle, solve_problem3};
use codedcache::partition::{expand_symmetric, is_monotone, symmetrize, DemandVector, Instance, SymmetricPartition};
use codedcache::popularity::{zipf, Popularity};

fn inst(k: usize, n: usize, m: f64, gamma: f64) -> Instance {
    Instance::new(k, n, m, zipf(n, gamma).unwrap()).unwrap()
}

#[test]
fn full_and_symmetric_oracles_agree() {
    for (k, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for gamma in [0.0, 0.7, 1.0, 2.0] {
            for h in 0..=2 * n {
                let i = inst(k, n, h as f64 / 2.0, gamma);
                let p1 = solve_problem1_oracle(&i).unwrap();
                let p2 = solve_problem2_oracle(&i).unwrap();
                assert!((p1.value - p2.value).abs() <= 1e-7, "K={k} N={n} gamma={gamma} M={}", i.m());
                // The symmetrized full optimum is itself optimal.
                let y = symmetrize(p1.full().unwrap(), &i).unwrap();
                assert!((avg_load_symmetric(&y, &i).unwrap() - p1.value).abs() <= 1e-7);
            }
        }
    }
}

#[test]
fn ordered_program_never_beats_unordered() {
    for (k, n) in [(2, 3), (3, 3)] {
        for gamma in [0.0, 1.0, 2.0] {
            for h in 0..=2 * n {
                let i = inst(k, n, h as f64 / 2.0, gamma);
                let p2 = solve_problem2_oracle(&i).unwrap().value;
                let p3 = solve_problem3(&i).unwrap().value;
                assert!(p3 >= p2 - 1e-9);
                if gamma == 0.0 {
                    assert!((p3 - p2).abs() <= 1e-7);
                }
            }
        }
    }
}

// K = 2, N = 2, p = (0.8, 0.2), M = 1.5.
//
// Unordered: file 1 cached whole at both users, file 2 split into two
// disjoint halves (one per user), memory 1 + 0.5. Demands (1,2), (2,1),
// (2,2) each cost one coded half: 0.5 (1 - 0.64) = 0.18.
//
// Best ordered placement keeps y[2][1] <= y[1][1] = 0, so file 2 is half
// cached at both users: (1,2) and (2,1) cost 0.5, (2,2) costs 1 (two
// unicasts): 0.32 * 0.5 + 0.04 = 0.2.
#[test]
fn ordering_constraint_can_cost_load() {
    let i = Instance::new(2, 2, 1.5, Popularity::new(vec![0.8, 0.2]).unwrap()).unwrap();
    let unordered = SymmetricPartition::new(vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.5, 0.0]]).unwrap();
    assert!(!is_monotone(&unordered));
    let x = expand_symmetric(&unordered).unwrap();
    assert!((avg_load_bruteforce(&x, &i).unwrap() - 0.18).abs() < 1e-15);
    let d = |a: usize, b: usize| DemandVector::from_one_based(&[a, b], 2).unwrap();
    assert_eq!(load_for_demand(&x, &d(2, 2)).unwrap(), 0.5);
    assert_eq!(load_for_demand(&x, &d(1, 1)).unwrap(), 0.0);

    assert!((solve_problem1_oracle(&i).unwrap().value - 0.18).abs() < 1e-12);
    assert!((solve_problem2_oracle(&i).unwrap().value - 0.18).abs() < 1e-12);
    let ordered = solve_problem3(&i).unwrap();
    assert!((ordered.value - 0.2).abs() < 1e-12);
    let y = ordered.symmetric().unwrap();
    assert!((avg_load_bruteforce(&expand_symmetric(y).unwrap(), &i).unwrap() - 0.2).abs() < 1e-12);
}
