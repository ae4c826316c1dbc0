//! Baseline: each user keeps the cluster with the strongest direct channel,
//! then multipliers and powers follow from the same duality machinery.

use crate::clustering::ClusterCatalog;
use crate::dual::{assemble, iterate, ClusterChoice, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::norm_sqr;
use crate::problem::{Algorithm, Instance, PrecoderSolution};

/// `argmax_t ‖g_{m,m}^t‖²`, lowest index on ties.
pub fn strongest_cluster(catalog: &ClusterCatalog, m: usize) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (t, c) in catalog.clusters(m).iter().enumerate() {
        let e = norm_sqr(c.direct());
        if best.is_none_or(|(_, b)| e > b) {
            best = Some((t, e));
        }
    }
    best.map(|(t, _)| t)
        .ok_or(Error::NoCandidateCluster { user: m })
}

pub fn solve_simple(inst: &Instance, opts: &SolverOptions) -> Result<PrecoderSolution> {
    let choice = (0..inst.num_users())
        .map(|m| strongest_cluster(&inst.catalog, m))
        .collect::<Result<Vec<_>>>()?;
    let state = iterate(inst, opts, ClusterChoice::Fixed(&choice))?;
    assemble(inst, opts, state, choice, Algorithm::Simple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::solve_dual;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn singleton_catalog() {
        let cat = ClusterCatalog::from_responses(vec![vec![vec![vec![c(0.1, 0.0)]]]]).unwrap();
        assert_eq!(strongest_cluster(&cat, 0).unwrap(), 0);
    }

    #[test]
    fn doubled_channel_wins() {
        let g = vec![c(0.3, -0.2), c(0.1, 0.1)];
        let doubled: Vec<_> = g.iter().map(|x| x * 2.0).collect();
        let cat =
            ClusterCatalog::from_responses(vec![vec![vec![g.clone()], vec![doubled], vec![g]]])
                .unwrap();
        assert_eq!(strongest_cluster(&cat, 0).unwrap(), 1);
    }

    #[test]
    fn empty_catalog_is_an_error() {
        let cat = ClusterCatalog::from_responses(vec![vec![]]).unwrap();
        assert!(matches!(
            strongest_cluster(&cat, 0),
            Err(Error::NoCandidateCluster { user: 0 })
        ));
    }

    #[test]
    fn single_user_matches_dual() {
        let cat = ClusterCatalog::from_responses(vec![vec![vec![vec![c(0.7, 0.1), c(0.2, 0.0)]]]])
            .unwrap();
        let inst = Instance::new(cat, vec![3.0], 0.1).unwrap();
        let a = solve_dual(&inst, &SolverOptions::default()).unwrap();
        let b = solve_simple(&inst, &SolverOptions::default()).unwrap();
        assert_eq!(a.lambda, b.lambda);
        assert_eq!(a.total_power_w, b.total_power_w);
    }

    #[test]
    fn strong_but_interfering_cluster_loses_to_dual() {
        // User 0's strongest cluster also hits user 1 hard; its second cluster
        // is slightly weaker but clean.
        let cat = ClusterCatalog::from_responses(vec![
            vec![
                vec![vec![c(1.0, 0.0)], vec![c(0.9, 0.0)]],
                vec![vec![c(0.8, 0.0)], vec![c(0.0, 0.0)]],
            ],
            vec![vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]]],
        ])
        .unwrap();
        let inst = Instance::new(cat, vec![3.0, 3.0], 1.0).unwrap();
        let opts = SolverOptions::default();
        let dual = solve_dual(&inst, &opts).unwrap();
        let simple = solve_simple(&inst, &opts).unwrap();
        assert_eq!(simple.assignment(), vec![0, 0]);
        assert_eq!(dual.assignment(), vec![1, 0]);
        assert!(simple.total_power_w > dual.total_power_w * 1.5);
    }
}
