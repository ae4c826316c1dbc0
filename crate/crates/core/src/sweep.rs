//! Parameter sweeps over cluster size, target SINR or user count.
//!
//! Table columns, in order:
//!
//! ```text
//! parameter,value,seed,algorithm,status,total_power_w,total_power_dbw,mean_user_power_w,iterations
//! ```
//!
//! followed by `wall_time_s` when timings are requested. `status` is one of
//! `ok`, `infeasible`, `not_converged`, `too_large` (oracle cap exceeded) or
//! `error`; numeric columns are empty unless `status` is `ok`. Rows are
//! ordered by value, then seed, then algorithm as listed in the spec. Wall
//! time is the only column that varies between runs, so it is off by default.

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{solve_dual, SolverOptions};
use crate::error::{Error, Result};
use crate::oracle::{exhaustive_minimum, DEFAULT_ORACLE_CAP};
use crate::problem::{linear_to_db, Algorithm, PrecoderSolution};
use crate::scenario::{generate_users, Scenario};
use crate::simple::solve_simple;

pub const TABLE_HEADER: &str = "parameter,value,seed,algorithm,status,total_power_w,total_power_dbw,mean_user_power_w,iterations";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    ClusterSize,
    TargetSinrDb,
    NumUsers,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::ClusterSize => "cluster_size",
            SweepParameter::TargetSinrDb => "target_sinr_db",
            SweepParameter::NumUsers => "num_users",
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" | "cluster_size" => Ok(SweepParameter::ClusterSize),
            "gamma" | "target_sinr_db" => Ok(SweepParameter::TargetSinrDb),
            "users" | "M" | "num_users" => Ok(SweepParameter::NumUsers),
            other => Err(Error::config(
                "param",
                format!("unknown sweep parameter '{other}'"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub timings: bool,
    #[serde(default = "default_cap")]
    pub oracle_cap: u128,
}

fn default_cap() -> u128 {
    DEFAULT_ORACLE_CAP
}

impl SweepSpec {
    pub fn new(
        parameter: SweepParameter,
        values: Vec<f64>,
        seeds: Vec<u64>,
        algorithms: Vec<Algorithm>,
    ) -> Self {
        Self {
            parameter,
            values,
            seeds,
            algorithms,
            timings: false,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::config("values", "at least one value is required"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config(
                "algorithms",
                "at least one algorithm is required",
            ));
        }
        for (i, &v) in self.values.iter().enumerate() {
            let integral = v.fract() == 0.0 && v >= 1.0;
            if self.parameter != SweepParameter::TargetSinrDb && !integral {
                return Err(Error::config(
                    format!("values[{i}]"),
                    format!(
                        "{} needs a positive integer, got {v}",
                        self.parameter.as_str()
                    ),
                ));
            }
            if !v.is_finite() {
                return Err(Error::config(format!("values[{i}]"), "must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Infeasible,
    NotConverged,
    TooLarge,
    Error,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Infeasible => "infeasible",
            RowStatus::NotConverged => "not_converged",
            RowStatus::TooLarge => "too_large",
            RowStatus::Error => "error",
        }
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::Infeasible { .. } => RowStatus::Infeasible,
            Error::NotConverged { .. } => RowStatus::NotConverged,
            Error::OracleTooLarge { .. } => RowStatus::TooLarge,
            _ => RowStatus::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub status: RowStatus,
    pub total_power_w: Option<f64>,
    pub mean_user_power_w: Option<f64>,
    pub iterations: Option<usize>,
    pub wall_time_s: Option<f64>,
}

impl SweepRow {
    pub fn total_power_dbw(&self) -> Option<f64> {
        self.total_power_w.map(linear_to_db)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub timings: bool,
}

impl SweepTable {
    pub fn header(&self) -> String {
        if self.timings {
            format!("{TABLE_HEADER},wall_time_s")
        } else {
            TABLE_HEADER.to_string()
        }
    }

    /// Rows matching `algorithm` at `value`, in seed order.
    pub fn select(&self, value: f64, algorithm: Algorithm) -> impl Iterator<Item = &SweepRow> {
        self.rows
            .iter()
            .filter(move |r| r.value == value && r.algorithm == algorithm)
    }
}

/// The scenario a sweep point runs on.
pub fn scenario_for(
    base: &Scenario,
    parameter: SweepParameter,
    value: f64,
    seed: u64,
) -> Result<Scenario> {
    let mut s = base.clone();
    let count = match parameter {
        SweepParameter::NumUsers => value as usize,
        _ => base.users.len(),
    };
    match &base.region {
        Some(region) => s.replace_users(generate_users(count, region, seed))?,
        None if parameter == SweepParameter::NumUsers => {
            return Err(Error::config(
                "region",
                "a user-count sweep needs a region to draw users from",
            ));
        }
        None => {}
    }
    s.rng_seed = seed;
    match parameter {
        SweepParameter::ClusterSize => s.cluster_size = value as usize,
        SweepParameter::TargetSinrDb => s.set_uniform_target(value),
        SweepParameter::NumUsers => {}
    }
    Ok(s)
}

fn outcome(
    result: Result<PrecoderSolution>,
) -> (RowStatus, Option<f64>, Option<f64>, Option<usize>) {
    match result {
        Ok(sol) => (
            RowStatus::Ok,
            Some(sol.total_power_w),
            Some(sol.total_power_w / sol.users.len() as f64),
            Some(sol.iterations),
        ),
        Err(e) => (RowStatus::from_error(&e), None, None, None),
    }
}

fn run_point(base: &Scenario, spec: &SweepSpec, value: f64, seed: u64) -> Vec<SweepRow> {
    let prepared = scenario_for(base, spec.parameter, value, seed).and_then(|s| {
        let opts = s.solver;
        s.prepare().map(|p| (p, opts))
    });
    spec.algorithms
        .iter()
        .map(|&algorithm| {
            let start = Instant::now();
            let (status, total, mean, iterations) = match &prepared {
                Err(e) => (RowStatus::from_error(e), None, None, None),
                Ok((p, opts)) => match algorithm {
                    Algorithm::Dual => outcome(solve_dual(&p.instance, opts)),
                    Algorithm::Simple => outcome(solve_simple(&p.instance, opts)),
                    Algorithm::Oracle => oracle_outcome(&p.instance, opts, spec.oracle_cap),
                },
            };
            let elapsed = start.elapsed().as_secs_f64();
            SweepRow {
                parameter: spec.parameter,
                value,
                seed,
                algorithm,
                status,
                total_power_w: total,
                mean_user_power_w: mean,
                iterations,
                wall_time_s: spec.timings.then_some(elapsed),
            }
        })
        .collect()
}

fn oracle_outcome(
    inst: &crate::problem::Instance,
    opts: &SolverOptions,
    cap: u128,
) -> (RowStatus, Option<f64>, Option<f64>, Option<usize>) {
    match exhaustive_minimum(inst, opts, cap) {
        Ok(report) => match report.best_power {
            Some(p) => (
                RowStatus::Ok,
                Some(p),
                Some(p / inst.num_users() as f64),
                None,
            ),
            None => (RowStatus::Infeasible, None, None, None),
        },
        Err(e) => (RowStatus::from_error(&e), None, None, None),
    }
}

/// Runs every (value, seed, algorithm) combination. Points run in parallel;
/// a failing row is recorded and never aborts the sweep.
pub fn run_sweep(base: &Scenario, spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let points: Vec<(f64, u64)> = spec
        .values
        .iter()
        .flat_map(|&v| spec.seeds.iter().map(move |&s| (v, s)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(v, s)| run_point(base, spec, v, s))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(SweepTable {
        rows,
        timings: spec.timings,
    })
}
