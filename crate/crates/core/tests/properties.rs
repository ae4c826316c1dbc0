//! Randomized properties of the update map and the solvers.

mod common;

use common::{random_instance, rel, rng};
use msat_core::dual::{f_value, update_map, ClusterChoice};
use msat_core::oracle::recompute_sinr;
use msat_core::{solve_dual, solve_simple, SolverOptions};
use proptest::prelude::*;

fn lambdas(users: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, users)
        .prop_map(|v| v.into_iter().map(|e| 10f64.powf(e)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn f_is_positive_monotone_and_scalable(
        seed in any::<u64>(),
        lambda in lambdas(3),
        bump in lambdas(3),
        size in 1usize..4,
    ) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 3, 2, size);
        let raised: Vec<f64> = lambda.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let doubled: Vec<f64> = lambda.iter().map(|a| 2.0 * a).collect();
        for m in 0..3 {
            for t in 0..2 {
                let g = inst.targets[m];
                let f = f_value(&inst.catalog, m, t, &lambda, g).unwrap();
                prop_assert!(f > 0.0);
                let up = f_value(&inst.catalog, m, t, &raised, g).unwrap();
                prop_assert!(up >= f * (1.0 - 1e-12));
                let scaled = f_value(&inst.catalog, m, t, &doubled, g).unwrap();
                prop_assert!(2.0 * f > scaled);
            }
        }
    }

    #[test]
    fn minimum_over_clusters_keeps_the_axioms(seed in any::<u64>(), lambda in lambdas(2)) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 2, 3, 2);
        let f = update_map(&inst, &lambda, ClusterChoice::Best).unwrap();
        let doubled: Vec<f64> = lambda.iter().map(|a| 2.0 * a).collect();
        let f2 = update_map(&inst, &doubled, ClusterChoice::Best).unwrap();
        for m in 0..2 {
            prop_assert!(f[m] > 0.0);
            prop_assert!(f2[m] >= f[m] * (1.0 - 1e-12));
            prop_assert!(2.0 * f[m] > f2[m]);
        }
    }

    #[test]
    fn solutions_meet_targets_and_close_the_gap(seed in any::<u64>(), users in 1usize..4) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, users, 3, 2);
        let opts = SolverOptions::default();
        if let (Ok(dual), Ok(simple)) = (solve_dual(&inst, &opts), solve_simple(&inst, &opts)) {
            prop_assert!(dual.duality_gap() < 1e-6);
            prop_assert!(simple.duality_gap() < 1e-6);
            prop_assert!(dual.total_power_w <= simple.total_power_w * (1.0 + 1e-9));
            for sol in [&dual, &simple] {
                for (s, u) in recompute_sinr(sol, &inst).iter().zip(&sol.users) {
                    prop_assert!(rel(*s, u.target_sinr) < 1e-6);
                }
                let total: f64 = sol.users.iter().map(|u| u.power_w).sum();
                prop_assert!(rel(total, sol.total_power_w) < 1e-12);
            }
        }
    }
}
