//! Joint cluster association and precoding through uplink-downlink duality.
//!
//! Index convention: `cluster(m, t).to(j)` is the concatenated channel from
//! user `m`'s cluster `t` to receiving user `j`. The virtual uplink filter of
//! cluster `(m, t)` therefore collects every user's channel into that cluster:
//!
//! ```text
//! û = (Σ_j λ_j g_j g_jᴴ + I)⁻¹ g_m,     g_j = cluster(m, t).to(j)
//! f_m^t(λ) = (1 + 1/γ_m)⁻¹ / (g_mᴴ (Σ_j λ_j g_j g_jᴴ + I)⁻¹ g_m)
//! ```
//!
//! The downlink amplitude a user sees from coefficients `u` is the bilinear
//! sum `Σ_i g_i u_i`, so the transmitted precoder is `√δ · conj(û)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::clustering::ClusterCatalog;
use crate::error::{Error, Result};
use crate::linalg::{dot_h, norm_sqr, CVector, HermitianMatrix};
use crate::problem::{Algorithm, Instance, PrecoderSolution, UserSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Users updated in ascending order using the freshest multipliers.
    GaussSeidel,
    /// All users updated from the previous iterate.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative sup-norm change that ends the iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Multiplier ceiling; `None` means `1e12 / σ²`.
    pub lambda_cap: Option<f64>,
    pub initial_lambda: f64,
    pub sweep: SweepMode,
    pub update: UpdateRule,
    /// Relative tolerance on achieved versus target SINR.
    pub sinr_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
            lambda_cap: None,
            initial_lambda: 0.0,
            sweep: SweepMode::GaussSeidel,
            update: UpdateRule::Exact,
            sinr_tolerance: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn cap(&self, noise_power: f64) -> f64 {
        self.lambda_cap.unwrap_or(1e12 / noise_power)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualState {
    pub lambda: Vec<f64>,
    pub iterations: usize,
    pub max_delta: f64,
    pub converged: bool,
}

/// How a single multiplier is refreshed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    /// Solve `λ_m = min_t f_m^t(λ)` in `λ_m` with the other multipliers held,
    /// which gives `min_t γ_m / (g_mᴴ (I + Σ_{j≠m} λ_j g_j g_jᴴ)⁻¹ g_m)`.
    /// Same fixed point as `Plain`; the contraction no longer degrades as
    /// `γ/(1+γ) → 1`, so high targets and infeasibility resolve quickly.
    Exact,
    /// One application of `f_m^t` as written.
    Plain,
}

/// Which clusters the update map may choose from.
#[derive(Debug, Clone, Copy)]
pub enum ClusterChoice<'a> {
    /// Minimum over the whole catalog of each user.
    Best,
    /// Frozen per-user cluster index.
    Fixed(&'a [usize]),
}

fn uplink_covariance(
    catalog: &ClusterCatalog,
    m: usize,
    t: usize,
    lambda: &[f64],
) -> HermitianMatrix {
    let c = catalog.cluster(m, t);
    let mut a = HermitianMatrix::identity(c.size());
    for (j, &l) in lambda.iter().enumerate() {
        if l != 0.0 {
            a.add_outer(l, c.to(j));
        }
    }
    a
}

fn solve_uplink(catalog: &ClusterCatalog, m: usize, t: usize, lambda: &[f64]) -> Result<CVector> {
    uplink_covariance(catalog, m, t, lambda)
        .cholesky_solve(catalog.cluster(m, t).direct())
        .ok_or(Error::SingularF {
            condition: f64::INFINITY,
        })
}

/// Standard interference function `f_m^t(λ)` of cluster `t` of user `m`.
pub fn f_value(
    catalog: &ClusterCatalog,
    m: usize,
    t: usize,
    lambda: &[f64],
    target: f64,
) -> Result<f64> {
    let g = catalog.cluster(m, t).direct();
    if norm_sqr(g) == 0.0 {
        return Err(Error::ZeroDirectChannel {
            user: m,
            cluster: t,
        });
    }
    let x = solve_uplink(catalog, m, t, lambda)?;
    let q = dot_h(g, &x).re;
    Ok(target / ((1.0 + target) * q))
}

/// Coordinate fixed point of `f_m^t` in `λ_m`, the other multipliers held.
pub fn coordinate_value(
    catalog: &ClusterCatalog,
    m: usize,
    t: usize,
    lambda: &[f64],
    target: f64,
) -> Result<f64> {
    let mut others = lambda.to_vec();
    others[m] = 0.0;
    Ok(f_value(catalog, m, t, &others, target)? * (1.0 + target))
}

/// Update value with unusable clusters mapped to `+∞`.
fn f_or_inf(
    catalog: &ClusterCatalog,
    m: usize,
    t: usize,
    lambda: &[f64],
    target: f64,
    rule: UpdateRule,
) -> Result<f64> {
    let value = match rule {
        UpdateRule::Exact => coordinate_value(catalog, m, t, lambda, target),
        UpdateRule::Plain => f_value(catalog, m, t, lambda, target),
    };
    match value {
        Err(Error::ZeroDirectChannel { .. }) => Ok(f64::INFINITY),
        other => other,
    }
}

/// `(argmin_t f_m^t(λ), min)`, lowest index on exact ties.
fn best_cluster(
    catalog: &ClusterCatalog,
    m: usize,
    lambda: &[f64],
    target: f64,
    rule: UpdateRule,
) -> Result<(usize, f64)> {
    let mut best = (0, f64::INFINITY);
    for t in 0..catalog.clusters(m).len() {
        let f = f_or_inf(catalog, m, t, lambda, target, rule)?;
        if f < best.1 {
            best = (t, f);
        }
    }
    Ok(best)
}

/// Update map `F(λ)_m = min_t f_m^t(λ)`, or `f_m^{t_m}(λ)` for a frozen choice.
pub fn update_map(inst: &Instance, lambda: &[f64], choice: ClusterChoice) -> Result<Vec<f64>> {
    (0..inst.num_users())
        .map(|m| user_update(inst, m, lambda, choice, UpdateRule::Plain))
        .collect()
}

fn user_update(
    inst: &Instance,
    m: usize,
    lambda: &[f64],
    choice: ClusterChoice,
    rule: UpdateRule,
) -> Result<f64> {
    let target = inst.targets[m];
    match choice {
        ClusterChoice::Best => Ok(best_cluster(&inst.catalog, m, lambda, target, rule)?.1),
        ClusterChoice::Fixed(sel) => f_or_inf(&inst.catalog, m, sel[m], lambda, target, rule),
    }
}

/// Fixed-point iteration on the multipliers.
pub fn iterate(inst: &Instance, opts: &SolverOptions, choice: ClusterChoice) -> Result<DualState> {
    inst.catalog.ensure_servable()?;
    let cap = opts.cap(inst.noise_power);
    let users = inst.num_users();
    let mut lambda = vec![opts.initial_lambda; users];
    let mut max_delta = f64::INFINITY;

    for iteration in 1..=opts.max_iterations {
        let previous = lambda.clone();
        max_delta = 0.0;
        for m in 0..users {
            let source = match opts.sweep {
                SweepMode::GaussSeidel => &lambda,
                SweepMode::Jacobi => &previous,
            };
            let next = user_update(inst, m, source, choice, opts.update)?;
            if !(next <= cap) {
                return Err(Error::Infeasible {
                    user: m,
                    lambda: next,
                    cap,
                });
            }
            let delta = (next - previous[m]).abs() / next.max(f64::MIN_POSITIVE);
            max_delta = max_delta.max(delta);
            lambda[m] = next;
        }
        if max_delta < opts.tolerance {
            return Ok(DualState {
                lambda,
                iterations: iteration,
                max_delta,
                converged: true,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        max_delta,
    })
}

/// Multipliers at the fixed point of `λ_m = min_t f_m^t(λ)`.
pub fn fixed_point_iterate(inst: &Instance, opts: &SolverOptions) -> Result<DualState> {
    iterate(inst, opts, ClusterChoice::Best)
}

/// `t_m = argmin_t f_m^t(λ)` for every user.
pub fn select_clusters(inst: &Instance, lambda: &[f64]) -> Result<Vec<usize>> {
    (0..inst.num_users())
        .map(|m| {
            best_cluster(&inst.catalog, m, lambda, inst.targets[m], UpdateRule::Plain)
                .map(|(t, _)| t)
        })
        .collect()
}

/// MMSE receive filter of cluster `t` of user `m` in the virtual uplink.
pub fn mmse_receiver(
    catalog: &ClusterCatalog,
    m: usize,
    t: usize,
    lambda: &[f64],
) -> Result<CVector> {
    solve_uplink(catalog, m, t, lambda)
}

/// Row-equilibrated 1-norm condition number, `None` when not invertible.
fn condition_estimate(f: &DMatrix<f64>) -> Option<f64> {
    let mut scaled = f.clone();
    for i in 0..f.nrows() {
        let d = f[(i, i)].abs();
        if d == 0.0 {
            return None;
        }
        scaled.row_mut(i).scale_mut(1.0 / d);
    }
    let inv = scaled.clone().try_inverse()?;
    let norm1 = |m: &DMatrix<f64>| {
        m.column_iter()
            .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    Some(norm1(&scaled) * norm1(&inv))
}

/// Downlink power scaling `δ` that puts every user exactly on its target.
pub fn power_scaling(
    inst: &Instance,
    winners: &[usize],
    receivers: &[CVector],
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let users = inst.num_users();
    let catalog = &inst.catalog;
    // gain[m][j] = |g_{m,j}^{t_j H} û_j|², power leaking from j's cluster to m.
    let gain = DMatrix::from_fn(users, users, |m, j| {
        dot_h(catalog.cluster(j, winners[j]).to(m), &receivers[j]).norm_sqr()
    });
    let f = DMatrix::from_fn(users, users, |m, j| {
        if m == j {
            gain[(m, m)] / inst.targets[m]
        } else {
            -gain[(m, j)]
        }
    });

    let condition = condition_estimate(&f).unwrap_or(f64::INFINITY);
    if !(condition <= 1e12) {
        return Err(Error::SingularF { condition });
    }
    let rhs = DVector::from_element(users, inst.noise_power);
    let delta = f
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularF { condition })?;

    let scale = delta.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let mut out = Vec::with_capacity(users);
    for (m, &d) in delta.iter().enumerate() {
        if d < -1e-12 * scale {
            return Err(Error::NegativePower { user: m, delta: d });
        }
        out.push(d.max(0.0));
    }

    for m in 0..users {
        let signal = out[m] * gain[(m, m)];
        let interference: f64 = (0..users)
            .filter(|&j| j != m)
            .map(|j| out[j] * gain[(m, j)])
            .sum();
        let sinr = signal / (interference + inst.noise_power);
        if ((sinr - inst.targets[m]) / inst.targets[m]).abs() > opts.sinr_tolerance {
            return Err(Error::TargetMissed {
                user: m,
                achieved: sinr,
                target: inst.targets[m],
            });
        }
    }
    Ok(out)
}

/// SINR of every user under bilinear downlink reception of `precoders`,
/// where `precoders[j]` is transmitted on cluster `clusters[j]` of user `j`.
pub fn downlink_sinr(
    catalog: &ClusterCatalog,
    clusters: &[usize],
    precoders: &[CVector],
    noise_power: f64,
) -> Vec<f64> {
    let users = catalog.num_users();
    (0..users)
        .map(|m| {
            let rx = |j: usize| {
                crate::linalg::dot_t(catalog.cluster(j, clusters[j]).to(m), &precoders[j])
                    .norm_sqr()
            };
            let interference: f64 = (0..users).filter(|&j| j != m).map(rx).sum();
            rx(m) / (interference + noise_power)
        })
        .collect()
}

/// Turns converged multipliers and a cluster choice into precoders.
pub(crate) fn assemble(
    inst: &Instance,
    opts: &SolverOptions,
    state: DualState,
    winners: Vec<usize>,
    algorithm: Algorithm,
) -> Result<PrecoderSolution> {
    let receivers = winners
        .iter()
        .enumerate()
        .map(|(m, &t)| mmse_receiver(&inst.catalog, m, t, &state.lambda))
        .collect::<Result<Vec<_>>>()?;
    let delta = power_scaling(inst, &winners, &receivers, opts)?;

    let precoders: Vec<CVector> = receivers
        .iter()
        .zip(&delta)
        .map(|(r, d)| r.iter().map(|x| x.conj() * d.sqrt()).collect())
        .collect();
    let sinr = downlink_sinr(&inst.catalog, &winners, &precoders, inst.noise_power);

    let users: Vec<UserSolution> = (0..inst.num_users())
        .map(|m| {
            let c = inst.catalog.cluster(m, winners[m]);
            UserSolution {
                user: m,
                cluster: winners[m],
                satellite: c.satellite,
                beams: c.beams.clone(),
                power_w: norm_sqr(&precoders[m]),
                precoder: precoders[m].clone(),
                delta: delta[m],
                sinr: sinr[m],
                target_sinr: inst.targets[m],
            }
        })
        .collect();
    let total_power_w = users.iter().map(|u| u.power_w).sum();
    let dual_objective_w = state.lambda.iter().sum::<f64>() * inst.noise_power;
    Ok(PrecoderSolution {
        algorithm,
        users,
        lambda: state.lambda,
        noise_power_w: inst.noise_power,
        total_power_w,
        dual_objective_w,
        iterations: state.iterations,
        converged: state.converged,
    })
}

/// Minimum-power cluster association and precoding.
pub fn solve_dual(inst: &Instance, opts: &SolverOptions) -> Result<PrecoderSolution> {
    let state = fixed_point_iterate(inst, opts)?;
    let winners = select_clusters(inst, &state.lambda)?;
    assemble(inst, opts, state, winners, Algorithm::Dual)
}

/// `Ω_m^t(λ) = I − (λ_m/γ_m) g_m g_mᴴ + Σ_{j≠m} λ_j g_j g_jᴴ`.
pub fn omega_matrix(inst: &Instance, m: usize, t: usize, lambda: &[f64]) -> HermitianMatrix {
    let c = inst.catalog.cluster(m, t);
    let mut omega = HermitianMatrix::identity(c.size());
    omega.add_outer(-lambda[m] / inst.targets[m], c.direct());
    for (j, &l) in lambda.iter().enumerate() {
        if j != m && l != 0.0 {
            omega.add_outer(l, c.to(j));
        }
    }
    omega
}

/// `1 + (λ_m/γ_m)‖g_m‖² + Σ_{j≠m} λ_j ‖g_j‖²`, the spectral norm `Ω` would
/// have without cancellation between its terms.
pub fn omega_scale(inst: &Instance, m: usize, t: usize, lambda: &[f64]) -> f64 {
    let c = inst.catalog.cluster(m, t);
    let others: f64 = (0..lambda.len())
        .filter(|&j| j != m)
        .map(|j| lambda[j] * norm_sqr(c.to(j)))
        .sum();
    1.0 + lambda[m] / inst.targets[m] * norm_sqr(c.direct()) + others
}

/// Smallest eigenvalue of `Ω_m^t` relative to [`omega_scale`].
///
/// At the optimum the serving cluster's `Ω` is singular. For single-beam
/// clusters it is the scalar zero, so its own norm is pure rounding noise and
/// cannot serve as the reference.
pub fn omega_ratio(inst: &Instance, m: usize, t: usize, lambda: &[f64]) -> f64 {
    omega_matrix(inst, m, t, lambda).eigenvalues()[0] / omega_scale(inst, m, t, lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaCertificate {
    /// [`omega_ratio`] at the serving cluster, near zero at the optimum.
    pub winner_ratio: f64,
    /// Smallest [`omega_ratio`] over the other clusters, `None` when `T_m = 1`.
    pub min_loser_ratio: Option<f64>,
}

/// Spectral check of the Lagrangian matrices at the multipliers.
pub fn omega_certificate(
    inst: &Instance,
    lambda: &[f64],
    winners: &[usize],
) -> Vec<OmegaCertificate> {
    (0..inst.num_users())
        .map(|m| {
            let mut loser: Option<f64> = None;
            let mut winner_ratio = f64::NAN;
            for t in 0..inst.catalog.clusters(m).len() {
                let r = omega_ratio(inst, m, t, lambda);
                if t == winners[m] {
                    winner_ratio = r;
                } else {
                    loser = Some(loser.map_or(r, |x| x.min(r)));
                }
            }
            OmegaCertificate {
                winner_ratio,
                min_loser_ratio: loser,
            }
        })
        .collect()
}
