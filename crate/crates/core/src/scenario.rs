//! Scenario files and the pipeline from positions to a solvable instance.
//!
//! Scenarios are TOML. Only `satellites` and `users` are required; every other
//! field falls back to the documented defaults (19 GHz carrier, 10×10 URA with
//! 2.5λ spacing and 2×2 subarray elements, 16×16 DFT codebook, 41.45 dBi user
//! terminals at 224.5 K, S = 5 candidate beams, clusters of B = 3).
//!
//! Random user placement uses ChaCha8 (`rand_chacha` 0.9) seeded with
//! `seed_from_u64(seed)`. Each user draws latitude then longitude as
//! `lo + (hi − lo)·U` with `U = (next_u64() >> 11) · 2⁻⁵³`.

use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{
    build_codebook, effective_channels, noise_power, synthesize_channel, ArrayConfig,
    CodebookConfig, EffectiveChannelTensor, LinkBudget, DEFAULT_BANDWIDTH_HZ, DEFAULT_CARRIER_HZ,
    DEFAULT_RX_GAIN_DBI, DEFAULT_TEMPERATURE_K, DEFAULT_TX_ELEMENT_GAIN_DBI,
};
use crate::clustering::{
    build_candidates, enumerate_clusters, CandidateBeamSet, DEFAULT_CANDIDATE_SIZE,
    DEFAULT_CLUSTER_SIZE,
};
use crate::dual::SolverOptions;
use crate::error::{Error, Result};
use crate::geometry::{
    link_geometry, BoresightSpec, GeodeticPosition, DEFAULT_MIN_ELEVATION_DEG,
    DEFAULT_SATELLITE_ALTITUDE_M,
};
use crate::problem::{db_to_linear, Instance};

/// Satellite sub-points used in the reference three-satellite setup.
pub const REFERENCE_SATELLITES: [(f64, f64); 3] = [
    (52.817247, 9.291984),
    (52.589261, 7.669242),
    (52.054784, 7.876349),
];

pub const REFERENCE_REGION: Region = Region {
    lat_min: 51.0,
    lon_min: 5.5,
    lat_max: 54.0,
    lon_max: 9.5,
};

fn default_satellite_altitude() -> f64 {
    DEFAULT_SATELLITE_ALTITUDE_M
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteConfig {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default = "default_satellite_altitude")]
    pub altitude_m: f64,
    #[serde(default)]
    pub boresight: BoresightSpec,
}

impl SatelliteConfig {
    pub fn at(latitude_deg: f64, longitude_deg: f64) -> Self {
        Self {
            latitude_deg,
            longitude_deg,
            altitude_m: DEFAULT_SATELLITE_ALTITUDE_M,
            boresight: BoresightSpec::default(),
        }
    }

    pub fn position(&self) -> GeodeticPosition {
        GeodeticPosition {
            latitude_deg: self.latitude_deg,
            longitude_deg: self.longitude_deg,
            altitude_m: self.altitude_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub lat_min: f64,
    pub lon_min: f64,
    pub lat_max: f64,
    pub lon_max: f64,
}

impl Region {
    pub fn validate(&self, path: &str) -> Result<()> {
        for (name, lo, hi, bound) in [
            ("lat", self.lat_min, self.lat_max, 90.0),
            ("lon", self.lon_min, self.lon_max, 180.0),
        ] {
            if !(lo >= -bound && hi <= bound && lo <= hi) {
                return Err(Error::config(
                    format!("{path}.{name}"),
                    format!("invalid range [{lo}, {hi}]"),
                ));
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Region {
    type Err = Error;

    /// `lat1,lon1,lat2,lon2`; corners may come in either order.
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::config("region", e.to_string()))?;
        if v.len() != 4 {
            return Err(Error::config("region", "expected lat1,lon1,lat2,lon2"));
        }
        let r = Region {
            lat_min: v[0].min(v[2]),
            lon_min: v[1].min(v[3]),
            lat_max: v[0].max(v[2]),
            lon_max: v[1].max(v[3]),
        };
        r.validate("region")?;
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub carrier_hz: f64,
    pub tx_element_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub temperature_k: f64,
    pub bandwidth_hz: f64,
    /// Overrides `k_B·T·B` when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_power_w: Option<f64>,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            carrier_hz: DEFAULT_CARRIER_HZ,
            tx_element_gain_dbi: DEFAULT_TX_ELEMENT_GAIN_DBI,
            rx_gain_dbi: DEFAULT_RX_GAIN_DBI,
            temperature_k: DEFAULT_TEMPERATURE_K,
            bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
            noise_power_w: None,
        }
    }
}

impl LinkConfig {
    pub fn budget(&self) -> Result<LinkBudget> {
        let noise_power_w = match self.noise_power_w {
            Some(n) => n,
            None => noise_power(self.temperature_k, self.bandwidth_hz)
                .map_err(|e| Error::config("link", e.to_string()))?,
        };
        let b = LinkBudget {
            carrier_hz: self.carrier_hz,
            tx_element_gain_dbi: self.tx_element_gain_dbi,
            rx_gain_dbi: self.rx_gain_dbi,
            noise_power_w,
        };
        b.validate()?;
        Ok(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSinr {
    Uniform(f64),
    PerUser(Vec<f64>),
}

impl Default for TargetSinr {
    fn default() -> Self {
        TargetSinr::Uniform(5.0)
    }
}

fn default_candidate_size() -> usize {
    DEFAULT_CANDIDATE_SIZE
}
fn default_cluster_size() -> usize {
    DEFAULT_CLUSTER_SIZE
}
fn default_min_elevation() -> f64 {
    DEFAULT_MIN_ELEVATION_DEG
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub satellites: Vec<SatelliteConfig>,
    pub users: Vec<GeodeticPosition>,
    #[serde(default)]
    pub array: ArrayConfig,
    #[serde(default)]
    pub codebook: CodebookConfig,
    #[serde(default)]
    pub link: LinkConfig,
    #[serde(default = "default_candidate_size")]
    pub candidate_size: usize,
    #[serde(default = "default_cluster_size")]
    pub cluster_size: usize,
    /// Per-user SINR targets in dB; a single number applies to everyone.
    #[serde(default)]
    pub target_sinr_db: TargetSinr,
    #[serde(default = "default_min_elevation")]
    pub min_elevation_deg: f64,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default)]
    pub solver: SolverOptions,
}

/// Scenario turned into channels, candidates and a solvable instance.
#[derive(Debug, Clone)]
pub struct PreparedScenario {
    pub instance: Instance,
    pub tensor: EffectiveChannelTensor,
    pub candidates: Vec<CandidateBeamSet>,
    pub budget: LinkBudget,
}

impl Scenario {
    /// Three reference satellites, `users` drawn uniformly in the reference
    /// region, every other field at its default.
    pub fn reference(users: usize, seed: u64) -> Self {
        let mut s = Self {
            satellites: REFERENCE_SATELLITES
                .iter()
                .map(|&(lat, lon)| SatelliteConfig::at(lat, lon))
                .collect(),
            users: generate_users(users, &REFERENCE_REGION, seed),
            array: ArrayConfig::default(),
            codebook: CodebookConfig::default(),
            link: LinkConfig::default(),
            candidate_size: DEFAULT_CANDIDATE_SIZE,
            cluster_size: DEFAULT_CLUSTER_SIZE,
            target_sinr_db: TargetSinr::default(),
            min_elevation_deg: DEFAULT_MIN_ELEVATION_DEG,
            rng_seed: seed,
            region: Some(REFERENCE_REGION),
            solver: SolverOptions::default(),
        };
        s.expand_targets();
        s
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut s: Scenario = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|sp| format!("byte {}..{}", sp.start, sp.end))
                .unwrap_or_else(|| "scenario".into());
            Error::config(field, e.message().to_string())
        })?;
        s.validate()?;
        s.expand_targets();
        Ok(s)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }

    /// Replaces a uniform target by one entry per user.
    pub fn expand_targets(&mut self) {
        if let TargetSinr::Uniform(g) = self.target_sinr_db {
            self.target_sinr_db = TargetSinr::PerUser(vec![g; self.users.len()]);
        }
    }

    pub fn set_uniform_target(&mut self, db: f64) {
        self.target_sinr_db = TargetSinr::PerUser(vec![db; self.users.len()]);
    }

    pub fn targets_db(&self) -> Vec<f64> {
        match &self.target_sinr_db {
            TargetSinr::Uniform(g) => vec![*g; self.users.len()],
            TargetSinr::PerUser(v) => v.clone(),
        }
    }

    /// Replaces the users, keeping a uniform target uniform.
    pub fn replace_users(&mut self, users: Vec<GeodeticPosition>) -> Result<()> {
        let targets = self.targets_db();
        let uniform = targets.windows(2).all(|w| w[0] == w[1]);
        if !uniform && users.len() != targets.len() {
            return Err(Error::config(
                "target_sinr_db",
                "per-user targets cannot follow a change in user count",
            ));
        }
        let first = targets
            .first()
            .copied()
            .unwrap_or(TargetSinr::default().uniform());
        self.users = users;
        if uniform {
            self.set_uniform_target(first);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.satellites.is_empty() {
            return Err(Error::config(
                "satellites",
                "at least one satellite is required",
            ));
        }
        if self.users.is_empty() {
            return Err(Error::config("users", "at least one user is required"));
        }
        for (i, s) in self.satellites.iter().enumerate() {
            s.position().validate(&format!("satellites[{i}]"))?;
        }
        for (i, u) in self.users.iter().enumerate() {
            u.validate(&format!("users[{i}]"))?;
        }
        if self.cluster_size == 0 {
            return Err(Error::config("cluster_size", "must be at least 1"));
        }
        if self.candidate_size == 0 {
            return Err(Error::config("candidate_size", "must be at least 1"));
        }
        self.array.validate()?;
        self.link.budget()?;
        if let TargetSinr::PerUser(v) = &self.target_sinr_db {
            if v.len() != self.users.len() {
                return Err(Error::config(
                    "target_sinr_db",
                    format!("{} targets for {} users", v.len(), self.users.len()),
                ));
            }
        }
        if let Some(i) = self.targets_db().iter().position(|g| !g.is_finite()) {
            return Err(Error::config(
                format!("target_sinr_db[{i}]"),
                "must be finite",
            ));
        }
        if let Some(r) = &self.region {
            r.validate("region")?;
        }
        Ok(())
    }

    /// Runs geometry, channel synthesis and cluster enumeration.
    pub fn prepare(&self) -> Result<PreparedScenario> {
        self.validate()?;
        let budget = self.link.budget()?;
        let codebook = build_codebook(&self.array, &self.codebook)?;
        let grid = codebook.beam_grid();

        let mut uv = Vec::with_capacity(self.satellites.len());
        let mut channels = Vec::with_capacity(self.satellites.len());
        for sat in &self.satellites {
            let mut uv_row = Vec::with_capacity(self.users.len());
            let mut h_row = Vec::with_capacity(self.users.len());
            for user in &self.users {
                match link_geometry(
                    &sat.position(),
                    user,
                    &sat.boresight,
                    self.min_elevation_deg,
                ) {
                    Ok(link) => {
                        uv_row.push(Some(link.uv));
                        h_row.push(Some(synthesize_channel(&link, &self.array, &budget)?));
                    }
                    Err(Error::UserNotVisible { .. }) => {
                        uv_row.push(None);
                        h_row.push(None);
                    }
                    Err(e) => return Err(e),
                }
            }
            uv.push(uv_row);
            channels.push(h_row);
        }

        let tensor = effective_channels(&channels, &codebook);
        let candidates = build_candidates(&uv, &grid, self.candidate_size);
        let catalog = enumerate_clusters(&candidates, &tensor, self.cluster_size)?;
        let targets = self.targets_db().into_iter().map(db_to_linear).collect();
        let instance = Instance::new(catalog, targets, budget.noise_power_w)?;
        Ok(PreparedScenario {
            instance,
            tensor,
            candidates,
            budget,
        })
    }
}

impl TargetSinr {
    fn uniform(&self) -> f64 {
        match self {
            TargetSinr::Uniform(g) => *g,
            TargetSinr::PerUser(v) => v[0],
        }
    }
}

fn unit_interval(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Users drawn i.i.d. uniform in latitude and longitude over `region`, at
/// ground level.
pub fn generate_users(count: usize, region: &Region, seed: u64) -> Vec<GeodeticPosition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let lat = region.lat_min + (region.lat_max - region.lat_min) * unit_interval(&mut rng);
            let lon = region.lon_min + (region.lon_max - region.lon_min) * unit_interval(&mut rng);
            GeodeticPosition {
                latitude_deg: lat,
                longitude_deg: lon,
                altitude_m: 0.0,
            }
        })
        .collect()
}
