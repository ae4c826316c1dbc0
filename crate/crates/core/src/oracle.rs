//! Brute-force certification over every cluster assignment.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::EffectiveChannelTensor;
use crate::dual::{downlink_sinr, iterate, solve_dual, ClusterChoice, SolverOptions};
use crate::error::{Error, Result};
use crate::problem::{Instance, PrecoderSolution};

pub const DEFAULT_ORACLE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AssignmentPower {
    Feasible(f64),
    /// The fixed point diverged or stalled for this assignment.
    Infeasible,
}

impl AssignmentPower {
    pub fn power(&self) -> Option<f64> {
        match self {
            AssignmentPower::Feasible(p) => Some(*p),
            AssignmentPower::Infeasible => None,
        }
    }
}

/// Minimum total power with the association frozen to `assignment`.
///
/// Runs the multiplier iteration with a single cluster per user and returns
/// `Σ λ_m σ²`, which equals the optimal downlink power for that association.
pub fn fixed_assignment_power(
    inst: &Instance,
    assignment: &[usize],
    opts: &SolverOptions,
) -> AssignmentPower {
    match iterate(inst, opts, ClusterChoice::Fixed(assignment)) {
        Ok(state) => AssignmentPower::Feasible(state.lambda.iter().sum::<f64>() * inst.noise_power),
        Err(_) => AssignmentPower::Infeasible,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub best_assignment: Option<Vec<usize>>,
    pub best_power: Option<f64>,
    pub assignments_evaluated: u128,
    pub dual_power: Option<f64>,
    pub dual_assignment: Option<Vec<usize>>,
    /// `(dual − best)/best`.
    pub relative_gap: Option<f64>,
    pub globally_infeasible: bool,
    /// Error text when the dual solver failed.
    pub dual_error: Option<String>,
}

fn decode(mut index: u128, counts: &[usize]) -> Vec<usize> {
    counts
        .iter()
        .map(|&c| {
            let t = (index % c as u128) as usize;
            index /= c as u128;
            t
        })
        .collect()
}

/// Enumerates all `Π_m T_m` assignments and compares the best against the
/// dual solver.
pub fn exhaustive_minimum(
    inst: &Instance,
    opts: &SolverOptions,
    cap: u128,
) -> Result<OracleReport> {
    inst.catalog.ensure_servable()?;
    let total = inst.catalog.assignment_count();
    if total > cap {
        return Err(Error::OracleTooLarge {
            assignments: total,
            cap,
        });
    }
    let counts = inst.catalog.counts();
    // Ties resolve to the smallest enumeration index so the result does not
    // depend on thread scheduling.
    let best = (0..total)
        .into_par_iter()
        .filter_map(|k| {
            let a = decode(k, &counts);
            fixed_assignment_power(inst, &a, opts)
                .power()
                .map(|p| (p, k))
        })
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let (dual_power, dual_assignment, dual_error) = match solve_dual(inst, opts) {
        Ok(sol) => (Some(sol.total_power_w), Some(sol.assignment()), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let best_power = best.map(|b| b.0);
    let relative_gap = match (dual_power, best_power) {
        (Some(d), Some(b)) => Some((d - b) / b),
        _ => None,
    };
    Ok(OracleReport {
        best_assignment: best.map(|b| decode(b.1, &counts)),
        best_power,
        assignments_evaluated: total,
        dual_power,
        dual_assignment,
        relative_gap,
        globally_infeasible: best.is_none(),
        dual_error,
    })
}

/// Per-user SINR of a solution, evaluated from the concatenated channels with
/// interference from every other user's serving cluster.
pub fn recompute_sinr(solution: &PrecoderSolution, inst: &Instance) -> Vec<f64> {
    let clusters: Vec<usize> = solution.users.iter().map(|u| u.cluster).collect();
    let precoders: Vec<_> = solution.users.iter().map(|u| u.precoder.clone()).collect();
    downlink_sinr(&inst.catalog, &clusters, &precoders, solution.noise_power_w)
}

/// Per-user SINR evaluated beam by beam from the effective channel tensor,
/// following the received-signal model directly.
pub fn tensor_sinr(solution: &PrecoderSolution, tensor: &EffectiveChannelTensor) -> Vec<f64> {
    let users = solution.users.len();
    let amplitude = |src: usize, dst: usize| {
        let s = &solution.users[src];
        s.beams
            .iter()
            .zip(&s.precoder)
            .map(|(&n, u)| tensor.get(s.satellite, n, dst) * u)
            .sum::<num_complex::Complex64>()
            .norm_sqr()
    };
    (0..users)
        .map(|m| {
            let interference: f64 = (0..users)
                .filter(|&j| j != m)
                .map(|j| amplitude(j, m))
                .sum();
            amplitude(m, m) / (interference + solution.noise_power_w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::ClusterCatalog;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_closed_form() {
        let cat = ClusterCatalog::from_responses(vec![vec![vec![vec![c(0.6, 0.8)]]]]).unwrap();
        let inst = Instance::new(cat, vec![2.0], 0.5).unwrap();
        let p = fixed_assignment_power(&inst, &[0], &SolverOptions::default());
        assert!((p.power().unwrap() - 2.0 * 0.5 / 1.0).abs() < 1e-9);
    }

    #[test]
    fn decoupled_users_add_up() {
        let z = c(0.0, 0.0);
        let cat = ClusterCatalog::from_responses(vec![
            vec![vec![vec![c(2.0, 0.0)], vec![z]]],
            vec![vec![vec![z], vec![c(0.5, 0.0)]]],
        ])
        .unwrap();
        let inst = Instance::new(cat, vec![1.0, 4.0], 1.0).unwrap();
        let p = fixed_assignment_power(&inst, &[0, 0], &SolverOptions::default());
        assert!((p.power().unwrap() - (1.0 / 4.0 + 4.0 / 0.25)).abs() < 1e-8);
    }

    #[test]
    fn assignment_count_and_decode() {
        let g = vec![c(1.0, 0.0)];
        let per_user: Vec<Vec<Vec<Vec<Complex64>>>> = (0..2)
            .map(|_| {
                (0..10)
                    .map(|_| vec![g.clone(), vec![c(0.01, 0.0)]])
                    .collect()
            })
            .collect();
        let cat = ClusterCatalog::from_responses(per_user).unwrap();
        let inst = Instance::new(cat, vec![1.0, 1.0], 1.0).unwrap();
        let report =
            exhaustive_minimum(&inst, &SolverOptions::default(), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(report.assignments_evaluated, 100);
        assert_eq!(decode(37, &[10, 10]), vec![7, 3]);
    }

    #[test]
    fn cap_is_enforced() {
        let g = vec![c(1.0, 0.0)];
        let cat = ClusterCatalog::from_responses(vec![vec![vec![g.clone()]; 11]]).unwrap();
        let inst = Instance::new(cat, vec![1.0], 1.0).unwrap();
        let err = exhaustive_minimum(&inst, &SolverOptions::default(), 10).unwrap_err();
        assert!(matches!(
            err,
            Error::OracleTooLarge {
                assignments: 11,
                cap: 10
            }
        ));
    }
}
