//! URA steering vectors, the 2D-DFT beam codebook and the DFT-effective
//! channel tensor `g[ℓ][n][m] = h_m^ℓ^H w_n`.
//!
//! Element `(k₁, k₂)` of a `rows × cols` array sits at flat index
//! `k₁·cols + k₂`; `k₁` runs along the antenna-frame x axis (u) and `k₂`
//! along y (v). Codebook vectors carry `exp(+j2π(k₁n₁/F₁ + k₂n₂/F₂))/√K`;
//! steering vectors carry `exp(+j2π·d·(k₁u + k₂v))`, so the inner product
//! `h^H w_n` peaks where `d·u ≡ n₁/F₁ (mod 1)`. Beam `n = n₁·F₂ + n₂`
//! therefore points at `u = wrap(n₁/F₁)/d`, `v = wrap(n₂/F₂)/d`, with `wrap`
//! mapping into `[-0.5, 0.5)`. The array pattern repeats every `1/d` in u
//! and v (grating lobes); see [`BeamGrid`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LinkGeometry, UvCoordinate};
use crate::linalg::{dot_h, CVector};

pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const DEFAULT_CARRIER_HZ: f64 = 19e9;
pub const DEFAULT_RX_GAIN_DBI: f64 = 41.45;
pub const DEFAULT_TEMPERATURE_K: f64 = 224.5;
pub const DEFAULT_BANDWIDTH_HZ: f64 = 250e6;
/// Aperture gain of one 2.5λ × 2.5λ element cell, `10·log10(4π·2.5²)`.
pub const DEFAULT_TX_ELEMENT_GAIN_DBI: f64 = 18.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArrayConfig {
    pub rows: usize,
    pub cols: usize,
    pub element_spacing_wavelengths: f64,
    pub subarray_rows: usize,
    pub subarray_cols: usize,
    pub subarray_spacing_wavelengths: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            rows: 10,
            cols: 10,
            element_spacing_wavelengths: 2.5,
            subarray_rows: 2,
            subarray_cols: 2,
            subarray_spacing_wavelengths: 1.25,
        }
    }
}

impl ArrayConfig {
    pub fn elements(&self) -> usize {
        self.rows * self.cols
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("array.rows", self.rows),
            ("array.cols", self.cols),
            ("array.subarray_rows", self.subarray_rows),
            ("array.subarray_cols", self.subarray_cols),
        ] {
            if n == 0 {
                return Err(Error::config(name, "must be at least 1"));
            }
        }
        for (name, s) in [
            (
                "array.element_spacing_wavelengths",
                self.element_spacing_wavelengths,
            ),
            (
                "array.subarray_spacing_wavelengths",
                self.subarray_spacing_wavelengths,
            ),
        ] {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::config(name, format!("{s} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CodebookConfig {
    pub fft_rows: usize,
    pub fft_cols: usize,
}

impl Default for CodebookConfig {
    fn default() -> Self {
        Self {
            fft_rows: 16,
            fft_cols: 16,
        }
    }
}

impl CodebookConfig {
    pub fn beams(&self) -> usize {
        self.fft_rows * self.fft_cols
    }
}

/// Beam centres in (U,V) plus the grating-lobe period of the array factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamGrid {
    pub centers: Vec<UvCoordinate>,
    pub period_u: f64,
    pub period_v: f64,
}

#[derive(Debug, Clone)]
pub struct Codebook {
    pub config: CodebookConfig,
    pub vectors: Vec<CVector>,
    element_spacing: f64,
}

fn wrap_half(x: f64) -> f64 {
    if x >= 0.5 {
        x - 1.0
    } else {
        x
    }
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn beam_index(&self, n1: usize, n2: usize) -> usize {
        n1 * self.config.fft_cols + n2
    }

    pub fn beam_center(&self, n: usize) -> UvCoordinate {
        let (n1, n2) = (n / self.config.fft_cols, n % self.config.fft_cols);
        UvCoordinate::new(
            wrap_half(n1 as f64 / self.config.fft_rows as f64) / self.element_spacing,
            wrap_half(n2 as f64 / self.config.fft_cols as f64) / self.element_spacing,
        )
    }

    pub fn beam_grid(&self) -> BeamGrid {
        BeamGrid {
            centers: (0..self.len()).map(|n| self.beam_center(n)).collect(),
            period_u: 1.0 / self.element_spacing,
            period_v: 1.0 / self.element_spacing,
        }
    }
}

pub fn build_codebook(array: &ArrayConfig, cb: &CodebookConfig) -> Result<Codebook> {
    array.validate()?;
    if cb.fft_rows < array.rows {
        return Err(Error::config(
            "codebook.fft_rows",
            format!("{} smaller than array rows {}", cb.fft_rows, array.rows),
        ));
    }
    if cb.fft_cols < array.cols {
        return Err(Error::config(
            "codebook.fft_cols",
            format!("{} smaller than array cols {}", cb.fft_cols, array.cols),
        ));
    }
    let scale = 1.0 / (array.elements() as f64).sqrt();
    let mut vectors = Vec::with_capacity(cb.beams());
    for n1 in 0..cb.fft_rows {
        for n2 in 0..cb.fft_cols {
            let w = (0..array.rows)
                .flat_map(|k1| (0..array.cols).map(move |k2| (k1, k2)))
                .map(|(k1, k2)| {
                    // Integer phase reduction keeps the taps exact for large indices.
                    let p1 = ((k1 * n1) % cb.fft_rows) as f64 / cb.fft_rows as f64;
                    let p2 = ((k2 * n2) % cb.fft_cols) as f64 / cb.fft_cols as f64;
                    Complex64::from_polar(scale, 2.0 * PI * (p1 + p2))
                })
                .collect();
            vectors.push(w);
        }
    }
    Ok(Codebook {
        config: *cb,
        vectors,
        element_spacing: array.element_spacing_wavelengths,
    })
}

fn linear_factor(count: usize, spacing: f64, x: f64) -> f64 {
    let s: Complex64 = (0..count)
        .map(|i| Complex64::from_polar(1.0, 2.0 * PI * spacing * i as f64 * x))
        .sum();
    s.norm() / count as f64
}

/// Amplitude pattern of one element, modelled as a uniformly fed subarray.
/// Normalized to 1 at boresight.
pub fn element_pattern(array: &ArrayConfig, uv: &UvCoordinate) -> f64 {
    linear_factor(
        array.subarray_rows,
        array.subarray_spacing_wavelengths,
        uv.u,
    ) * linear_factor(
        array.subarray_cols,
        array.subarray_spacing_wavelengths,
        uv.v,
    )
}

/// Array response toward `uv`, including the element pattern.
pub fn steering_vector(array: &ArrayConfig, uv: &UvCoordinate) -> Result<CVector> {
    if uv.u * uv.u + uv.v * uv.v > 1.0 {
        return Err(Error::InvalidDirection { u: uv.u, v: uv.v });
    }
    let amp = element_pattern(array, uv);
    let d = array.element_spacing_wavelengths;
    Ok((0..array.rows)
        .flat_map(|k1| (0..array.cols).map(move |k2| (k1, k2)))
        .map(|(k1, k2)| {
            Complex64::from_polar(amp, 2.0 * PI * d * (k1 as f64 * uv.u + k2 as f64 * uv.v))
        })
        .collect())
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub carrier_hz: f64,
    pub tx_element_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub noise_power_w: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            carrier_hz: DEFAULT_CARRIER_HZ,
            tx_element_gain_dbi: DEFAULT_TX_ELEMENT_GAIN_DBI,
            rx_gain_dbi: DEFAULT_RX_GAIN_DBI,
            noise_power_w: BOLTZMANN * DEFAULT_TEMPERATURE_K * DEFAULT_BANDWIDTH_HZ,
        }
    }
}

impl LinkBudget {
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0) {
            return Err(Error::config("budget.carrier_hz", "must be positive"));
        }
        if !(self.noise_power_w > 0.0) {
            return Err(Error::config("budget.noise_power_w", "must be positive"));
        }
        Ok(())
    }
}

/// `k_B · T · B`.
pub fn noise_power(temperature_k: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(temperature_k > 0.0) {
        return Err(Error::config("temperature_k", "must be positive"));
    }
    if !(bandwidth_hz > 0.0) {
        return Err(Error::config("bandwidth_hz", "must be positive"));
    }
    Ok(BOLTZMANN * temperature_k * bandwidth_hz)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    pub satellite: usize,
    pub user: usize,
    pub h: CVector,
}

/// Free-space line-of-sight channel: Friis amplitude per element, a common
/// propagation phase `e^{-j2πd/λ}` and the URA spatial signature.
pub fn synthesize_channel(
    link: &LinkGeometry,
    array: &ArrayConfig,
    budget: &LinkBudget,
) -> Result<CVector> {
    let lambda = budget.wavelength_m();
    let d = link.slant_range_m;
    let gain = db_to_linear(budget.tx_element_gain_dbi)
        * db_to_linear(budget.rx_gain_dbi)
        * (lambda / (4.0 * PI * d)).powi(2);
    // Phase of the range reduced modulo one wavelength before scaling.
    let cycles = (d / lambda).fract();
    let common = Complex64::from_polar(gain.sqrt(), -2.0 * PI * cycles);
    Ok(steering_vector(array, &link.uv)?
        .into_iter()
        .map(|a| a * common)
        .collect())
}

/// `g[ℓ][n][m]`, stored flat with users fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannelTensor {
    satellites: usize,
    beams: usize,
    users: usize,
    data: Vec<Complex64>,
}

impl EffectiveChannelTensor {
    pub fn zeros(satellites: usize, beams: usize, users: usize) -> Self {
        Self {
            satellites,
            beams,
            users,
            data: vec![Complex64::new(0.0, 0.0); satellites * beams * users],
        }
    }

    pub fn satellites(&self) -> usize {
        self.satellites
    }

    pub fn beams(&self) -> usize {
        self.beams
    }

    pub fn users(&self) -> usize {
        self.users
    }

    fn offset(&self, sat: usize, beam: usize, user: usize) -> usize {
        (sat * self.beams + beam) * self.users + user
    }

    pub fn get(&self, sat: usize, beam: usize, user: usize) -> Complex64 {
        self.data[self.offset(sat, beam, user)]
    }

    pub fn set(&mut self, sat: usize, beam: usize, user: usize, value: Complex64) {
        let i = self.offset(sat, beam, user);
        self.data[i] = value;
    }
}

/// Inner products of every available channel with every codebook vector.
/// `channels[ℓ][m]` is `None` for links that are not visible; those entries
/// stay zero for all beams.
pub fn effective_channels(
    channels: &[Vec<Option<CVector>>],
    codebook: &Codebook,
) -> EffectiveChannelTensor {
    let sats = channels.len();
    let users = channels.first().map_or(0, Vec::len);
    let mut tensor = EffectiveChannelTensor::zeros(sats, codebook.len(), users);
    for (l, row) in channels.iter().enumerate() {
        for (m, h) in row.iter().enumerate() {
            if let Some(h) = h {
                for (n, w) in codebook.vectors.iter().enumerate() {
                    tensor.set(l, n, m, dot_h(h, w));
                }
            }
        }
    }
    tensor
}
