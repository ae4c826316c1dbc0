use serde::{Deserialize, Serialize};

use crate::clustering::ClusterCatalog;
use crate::error::{Error, Result};
use crate::linalg::CVector;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// A solvable power-minimization instance: catalog, linear SINR targets and
/// the receiver noise power.
#[derive(Debug, Clone)]
pub struct Instance {
    pub catalog: ClusterCatalog,
    pub targets: Vec<f64>,
    pub noise_power: f64,
}

impl Instance {
    pub fn new(catalog: ClusterCatalog, targets: Vec<f64>, noise_power: f64) -> Result<Self> {
        if targets.len() != catalog.num_users() {
            return Err(Error::config(
                "targets",
                format!(
                    "{} targets for {} users",
                    targets.len(),
                    catalog.num_users()
                ),
            ));
        }
        if let Some(m) = targets.iter().position(|g| !(*g > 0.0) || !g.is_finite()) {
            return Err(Error::config(format!("targets[{m}]"), "must be positive"));
        }
        if !(noise_power > 0.0) {
            return Err(Error::config("noise_power", "must be positive"));
        }
        Ok(Self {
            catalog,
            targets,
            noise_power,
        })
    }

    pub fn num_users(&self) -> usize {
        self.catalog.num_users()
    }

    /// Same channels and targets, one fixed cluster per user.
    pub fn restricted(&self, assignment: &[usize]) -> Self {
        Self {
            catalog: self.catalog.restrict(assignment),
            targets: self.targets.clone(),
            noise_power: self.noise_power,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dual,
    Simple,
    Oracle,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Dual => "dual",
            Algorithm::Simple => "simple",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dual" => Ok(Algorithm::Dual),
            "simple" => Ok(Algorithm::Simple),
            "oracle" => Ok(Algorithm::Oracle),
            other => Err(Error::config(
                "algorithm",
                format!("unknown algorithm `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserSolution {
    pub user: usize,
    /// Catalog index of the serving cluster.
    pub cluster: usize,
    pub satellite: usize,
    pub beams: Vec<usize>,
    /// Beam-wise transmit coefficients, one per beam of the cluster.
    pub precoder: CVector,
    pub delta: f64,
    pub power_w: f64,
    pub sinr: f64,
    pub target_sinr: f64,
}

/// Cluster association and precoders. Only the serving cluster of each user
/// carries a precoder; every other cluster is implicitly silent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecoderSolution {
    pub algorithm: Algorithm,
    pub users: Vec<UserSolution>,
    pub lambda: Vec<f64>,
    pub noise_power_w: f64,
    pub total_power_w: f64,
    /// `Σ λ_m σ²`.
    pub dual_objective_w: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl PrecoderSolution {
    pub fn total_power_dbw(&self) -> f64 {
        linear_to_db(self.total_power_w)
    }

    pub fn assignment(&self) -> Vec<usize> {
        self.users.iter().map(|u| u.cluster).collect()
    }

    pub fn duality_gap(&self) -> f64 {
        (self.total_power_w - self.dual_objective_w).abs() / self.dual_objective_w
    }
}
