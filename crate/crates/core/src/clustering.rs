//! Candidate beam sets and the per-user cluster catalog.
//!
//! Catalog order is fixed: for each user, satellites in ascending id; within a
//! satellite, B-combinations of the candidate beams (sorted by beam index) in
//! lexicographic order. A cluster's position in that order is its catalog
//! index `t`.

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{BeamGrid, EffectiveChannelTensor};
use crate::error::{Error, Result};
use crate::geometry::UvCoordinate;
use crate::linalg::CVector;

pub const DEFAULT_CANDIDATE_SIZE: usize = 5;
pub const DEFAULT_CLUSTER_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateBeamSet {
    pub satellite: usize,
    pub user: usize,
    /// Nearest first.
    pub beams: Vec<usize>,
}

fn wrapped_delta(x: f64, period: f64) -> f64 {
    if period.is_finite() && period > 0.0 {
        x - period * (x / period).round()
    } else {
        x
    }
}

/// The `s` beams closest to `user` in the (U,V) plane.
///
/// Distances are taken modulo the grating-lobe period of the array so a user
/// outside the principal cell is matched to the beams whose lobes cover it.
/// Squared distances are compared on a 1e-15 grid; ties go to the lower index.
pub fn candidate_beams(user: &UvCoordinate, grid: &BeamGrid, s: usize) -> Vec<usize> {
    let mut scored: Vec<(u64, usize)> = grid
        .centers
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let du = wrapped_delta(user.u - c.u, grid.period_u);
            let dv = wrapped_delta(user.v - c.v, grid.period_v);
            (((du * du + dv * dv) * 1e15).round() as u64, n)
        })
        .collect();
    scored.sort_unstable();
    scored.into_iter().take(s).map(|(_, n)| n).collect()
}

/// Candidate sets for every (satellite, user) pair; `None` marks an invisible
/// link and yields an empty set.
pub fn build_candidates(
    user_uv: &[Vec<Option<UvCoordinate>>],
    grid: &BeamGrid,
    s: usize,
) -> Vec<CandidateBeamSet> {
    let mut out = Vec::new();
    for (l, row) in user_uv.iter().enumerate() {
        for (m, uv) in row.iter().enumerate() {
            out.push(CandidateBeamSet {
                satellite: l,
                user: m,
                beams: uv.map_or_else(Vec::new, |uv| candidate_beams(&uv, grid, s)),
            });
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of clusters a satellite contributes for a candidate set of size
/// `candidates`.
pub fn cluster_count(candidates: usize, cluster_size: usize) -> u128 {
    match candidates {
        0 => 0,
        c if c <= cluster_size => 1,
        c => binomial(c, cluster_size),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub owner: usize,
    pub satellite: usize,
    /// Ascending beam indices.
    pub beams: Vec<usize>,
    pub index: usize,
    /// `responses[j]` is the concatenated channel from this cluster's beams to
    /// user `j`.
    #[serde(skip)]
    pub responses: Vec<CVector>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.responses.first().map_or(self.beams.len(), Vec::len)
    }

    /// Channel to the owning user.
    pub fn direct(&self) -> &[Complex64] {
        &self.responses[self.owner]
    }

    pub fn to(&self, user: usize) -> &[Complex64] {
        &self.responses[user]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterCatalog {
    users: usize,
    clusters: Vec<Vec<Cluster>>,
}

impl ClusterCatalog {
    /// Builds a catalog from raw concatenated channels indexed
    /// `[owner m][cluster t][receiving user j]`. Satellite ids are set to 0
    /// and beam ids to positions, which suits synthetic instances.
    pub fn from_responses(responses: Vec<Vec<Vec<CVector>>>) -> Result<Self> {
        let users = responses.len();
        let mut clusters = Vec::with_capacity(users);
        for (m, per_user) in responses.into_iter().enumerate() {
            let mut list = Vec::with_capacity(per_user.len());
            for (t, resp) in per_user.into_iter().enumerate() {
                if resp.len() != users {
                    return Err(Error::config(
                        format!("catalog[{m}][{t}]"),
                        format!("expected {users} receiving users, got {}", resp.len()),
                    ));
                }
                let size = resp[0].len();
                if size == 0 || resp.iter().any(|r| r.len() != size) {
                    return Err(Error::config(
                        format!("catalog[{m}][{t}]"),
                        "channel vectors must share one non-zero length",
                    ));
                }
                list.push(Cluster {
                    owner: m,
                    satellite: 0,
                    beams: (0..size).collect(),
                    index: t,
                    responses: resp,
                });
            }
            clusters.push(list);
        }
        Ok(Self { users, clusters })
    }

    pub fn num_users(&self) -> usize {
        self.users
    }

    pub fn clusters(&self, user: usize) -> &[Cluster] {
        &self.clusters[user]
    }

    pub fn cluster(&self, user: usize, t: usize) -> &Cluster {
        &self.clusters[user][t]
    }

    /// `T_m` for every user.
    pub fn counts(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    /// `Π_m T_m`, saturating.
    pub fn assignment_count(&self) -> u128 {
        self.clusters
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
    }

    /// Returns an error naming the first user without any cluster.
    pub fn ensure_servable(&self) -> Result<()> {
        match self.clusters.iter().position(Vec::is_empty) {
            Some(user) => Err(Error::NoCandidateCluster { user }),
            None => Ok(()),
        }
    }

    /// Catalog that keeps only `assignment[m]` for each user.
    pub fn restrict(&self, assignment: &[usize]) -> Self {
        let clusters = self
            .clusters
            .iter()
            .zip(assignment)
            .map(|(list, &t)| {
                let mut c = list[t].clone();
                c.index = 0;
                vec![c]
            })
            .collect();
        Self {
            users: self.users,
            clusters,
        }
    }

    /// Catalog with clusters of each user in a different order.
    pub fn permuted(&self, orders: &[Vec<usize>]) -> Self {
        let clusters = self
            .clusters
            .iter()
            .zip(orders)
            .map(|(list, order)| {
                order
                    .iter()
                    .enumerate()
                    .map(|(t, &src)| {
                        let mut c = list[src].clone();
                        c.index = t;
                        c
                    })
                    .collect()
            })
            .collect();
        Self {
            users: self.users,
            clusters,
        }
    }
}

/// Enumerates every user's clusters and gathers their concatenated channels
/// from the tensor.
pub fn enumerate_clusters(
    candidates: &[CandidateBeamSet],
    tensor: &EffectiveChannelTensor,
    cluster_size: usize,
) -> Result<ClusterCatalog> {
    if cluster_size == 0 {
        return Err(Error::config("cluster_size", "must be at least 1"));
    }
    let users = tensor.users();
    let mut sorted: Vec<&CandidateBeamSet> = candidates.iter().collect();
    sorted.sort_by_key(|c| (c.user, c.satellite));

    let mut clusters: Vec<Vec<Cluster>> = vec![Vec::new(); users];
    for set in sorted {
        if set.beams.is_empty() {
            continue;
        }
        let mut beams = set.beams.clone();
        beams.sort_unstable();
        beams.dedup();
        let combos: Vec<Vec<usize>> = if beams.len() <= cluster_size {
            vec![beams]
        } else {
            beams.into_iter().combinations(cluster_size).collect()
        };
        let list = &mut clusters[set.user];
        for beams in combos {
            let responses = (0..users)
                .map(|j| {
                    beams
                        .iter()
                        .map(|&n| tensor.get(set.satellite, n, j))
                        .collect()
                })
                .collect();
            list.push(Cluster {
                owner: set.user,
                satellite: set.satellite,
                index: list.len(),
                beams,
                responses,
            });
        }
    }
    let catalog = ClusterCatalog { users, clusters };
    catalog.ensure_servable()?;
    Ok(catalog)
}
