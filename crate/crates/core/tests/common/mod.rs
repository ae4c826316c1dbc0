#![allow(dead_code)]

use msat_core::clustering::ClusterCatalog;
use msat_core::linalg::CVector;
use msat_core::scenario::{Scenario, REFERENCE_SATELLITES};
use msat_core::Instance;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn cv(v: &[(f64, f64)]) -> CVector {
    v.iter().map(|&(re, im)| Complex64::new(re, im)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> CVector {
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * (scale / 2f64.sqrt())
        })
        .collect()
}

/// Catalog with i.i.d. complex Gaussian responses; direct links have unit
/// scale and cross links `cross`.
pub fn random_catalog(
    rng: &mut ChaCha8Rng,
    users: usize,
    clusters: usize,
    size: usize,
    cross: f64,
) -> ClusterCatalog {
    let responses = (0..users)
        .map(|m| {
            (0..clusters)
                .map(|_| {
                    (0..users)
                        .map(|j| gaussian(rng, size, if j == m { 1.0 } else { cross }))
                        .collect()
                })
                .collect()
        })
        .collect();
    ClusterCatalog::from_responses(responses).unwrap()
}

pub fn random_instance(
    rng: &mut ChaCha8Rng,
    users: usize,
    clusters: usize,
    size: usize,
) -> Instance {
    let catalog = random_catalog(rng, users, clusters, size, 0.3);
    let targets = (0..users)
        .map(|_| 10f64.powf(rng.random_range(-0.5..0.8)))
        .collect();
    Instance::new(catalog, targets, 1.0).unwrap()
}

/// Reference geometry with `satellites` of the three satellites, random
/// users, `candidates` nearest beams and clusters of `cluster_size`.
pub fn small_physical(
    seed: u64,
    satellites: usize,
    users: usize,
    candidates: usize,
    cluster_size: usize,
) -> Scenario {
    let mut s = Scenario::reference(users, seed);
    s.satellites
        .truncate(satellites.min(REFERENCE_SATELLITES.len()));
    s.candidate_size = candidates;
    s.cluster_size = cluster_size;
    s
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
