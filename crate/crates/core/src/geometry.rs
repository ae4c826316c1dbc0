//! Geodetic positions, WGS-84 conversions and satellite-to-user link geometry.
//!
//! The antenna frame of a satellite is its local North-East-Down frame at the
//! sub-satellite point, rotated about the down (boresight) axis by the
//! configured azimuth. Direction cosines of a user are
//! `u = sinθ cosφ = d·x̂` and `v = sinθ sinφ = d·ŷ`, where `d` is the unit
//! vector from the satellite to the user.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// WGS-84 semi-major axis (m).
pub const WGS84_A: f64 = 6_378_137.0;
/// WGS-84 flattening.
pub const WGS84_F: f64 = 1.0 / 298.257_223_563;
/// WGS-84 first eccentricity squared.
pub const WGS84_E2: f64 = WGS84_F * (2.0 - WGS84_F);

pub const DEFAULT_SATELLITE_ALTITUDE_M: f64 = 550_000.0;
pub const DEFAULT_MIN_ELEVATION_DEG: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPosition {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default)]
    pub altitude_m: f64,
}

impl GeodeticPosition {
    pub fn new(latitude_deg: f64, longitude_deg: f64, altitude_m: f64) -> Result<Self> {
        let p = Self {
            latitude_deg,
            longitude_deg,
            altitude_m,
        };
        p.validate("position")?;
        Ok(p)
    }

    /// Checks the field bounds, naming offending fields relative to `path`.
    pub fn validate(&self, path: &str) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.latitude_deg) {
            return Err(Error::config(
                format!("{path}.latitude_deg"),
                format!("{} outside [-90, 90]", self.latitude_deg),
            ));
        }
        if !(-180.0..=180.0).contains(&self.longitude_deg) {
            return Err(Error::config(
                format!("{path}.longitude_deg"),
                format!("{} outside [-180, 180]", self.longitude_deg),
            ));
        }
        if !self.altitude_m.is_finite() || self.altitude_m < 0.0 {
            return Err(Error::config(
                format!("{path}.altitude_m"),
                format!("{} must be finite and non-negative", self.altitude_m),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UvCoordinate {
    pub u: f64,
    pub v: f64,
}

impl UvCoordinate {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn radius(&self) -> f64 {
        self.u.hypot(self.v)
    }
}

/// Antenna pointing: nadir boresight with a rotation about the boresight axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoresightSpec {
    #[serde(default)]
    pub azimuth_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub uv: UvCoordinate,
    pub slant_range_m: f64,
    /// Elevation of the satellite seen from the user.
    pub elevation_deg: f64,
}

/// Earth-centred Earth-fixed coordinates (m) on the WGS-84 ellipsoid.
pub fn geodetic_to_ecef(pos: &GeodeticPosition) -> Vector3<f64> {
    let (sin_lat, cos_lat) = pos.latitude_deg.to_radians().sin_cos();
    let (sin_lon, cos_lon) = pos.longitude_deg.to_radians().sin_cos();
    let n = WGS84_A / (1.0 - WGS84_E2 * sin_lat * sin_lat).sqrt();
    let h = pos.altitude_m;
    Vector3::new(
        (n + h) * cos_lat * cos_lon,
        (n + h) * cos_lat * sin_lon,
        (n * (1.0 - WGS84_E2) + h) * sin_lat,
    )
}

/// Inverse of [`geodetic_to_ecef`] by fixed-point iteration on latitude.
pub fn ecef_to_geodetic(x: &Vector3<f64>) -> GeodeticPosition {
    let p = x.x.hypot(x.y);
    let lon = x.y.atan2(x.x);
    let mut lat = x.z.atan2(p * (1.0 - WGS84_E2));
    let mut h = 0.0;
    for _ in 0..20 {
        let sin_lat = lat.sin();
        let n = WGS84_A / (1.0 - WGS84_E2 * sin_lat * sin_lat).sqrt();
        h = if lat.cos().abs() > 1e-9 {
            p / lat.cos() - n
        } else {
            x.z.abs() - n * (1.0 - WGS84_E2)
        };
        let next = x.z.atan2(p * (1.0 - WGS84_E2 * n / (n + h)));
        if (next - lat).abs() < 1e-15 {
            lat = next;
            break;
        }
        lat = next;
    }
    GeodeticPosition {
        latitude_deg: lat.to_degrees(),
        longitude_deg: lon.to_degrees(),
        altitude_m: h,
    }
}

fn local_up(pos: &GeodeticPosition) -> Vector3<f64> {
    let (sin_lat, cos_lat) = pos.latitude_deg.to_radians().sin_cos();
    let (sin_lon, cos_lon) = pos.longitude_deg.to_radians().sin_cos();
    Vector3::new(cos_lat * cos_lon, cos_lat * sin_lon, sin_lat)
}

/// Antenna-frame axes `(x̂, ŷ, ẑ)` of a satellite; `ẑ` is the nadir boresight.
pub fn antenna_frame(
    sat: &GeodeticPosition,
    boresight: &BoresightSpec,
) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let (sin_lat, cos_lat) = sat.latitude_deg.to_radians().sin_cos();
    let (sin_lon, cos_lon) = sat.longitude_deg.to_radians().sin_cos();
    let north = Vector3::new(-sin_lat * cos_lon, -sin_lat * sin_lon, cos_lat);
    let east = Vector3::new(-sin_lon, cos_lon, 0.0);
    let down = -local_up(sat);
    let (s, c) = boresight.azimuth_deg.to_radians().sin_cos();
    (c * north + s * east, -s * north + c * east, down)
}

pub fn link_geometry(
    sat: &GeodeticPosition,
    user: &GeodeticPosition,
    boresight: &BoresightSpec,
    min_elevation_deg: f64,
) -> Result<LinkGeometry> {
    if sat.altitude_m <= user.altitude_m {
        return Err(Error::config(
            "satellite.altitude_m",
            format!(
                "satellite altitude {} must exceed user altitude {}",
                sat.altitude_m, user.altitude_m
            ),
        ));
    }
    let s = geodetic_to_ecef(sat);
    let r = geodetic_to_ecef(user);
    let d = r - s;
    let range = d.norm();
    let dir = d / range;

    let elevation_deg = (-dir)
        .dot(&local_up(user))
        .clamp(-1.0, 1.0)
        .asin()
        .to_degrees();
    if elevation_deg < min_elevation_deg {
        return Err(Error::UserNotVisible {
            elevation_deg,
            min_elevation_deg,
        });
    }

    let (x, y, _) = antenna_frame(sat, boresight);
    Ok(LinkGeometry {
        uv: UvCoordinate::new(dir.dot(&x), dir.dot(&y)),
        slant_range_m: range,
        elevation_deg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pos(lat: f64, lon: f64, alt: f64) -> GeodeticPosition {
        GeodeticPosition::new(lat, lon, alt).unwrap()
    }

    #[test]
    fn equator_and_pole() {
        let e = geodetic_to_ecef(&pos(0.0, 0.0, 0.0));
        assert_eq!(e, Vector3::new(WGS84_A, 0.0, 0.0));
        let p = geodetic_to_ecef(&pos(90.0, 0.0, 0.0));
        assert!(p.x.abs() < 1e-9 && p.y.abs() < 1e-9);
        assert!((p.z - 6_356_752.314245).abs() < 1e-6);
    }

    #[test]
    fn satellite_ecef_matches_reference_values() {
        // Textbook WGS-84 evaluation done outside this crate.
        let e = geodetic_to_ecef(&pos(52.817247, 9.291984, 550e3));
        assert!((e.x - 4_140_250.722_162_566).abs() < 1e-6);
        assert!((e.y - 677_397.293_205_42).abs() < 1e-6);
        assert!((e.z - 5_496_469.688_546_31).abs() < 1e-6);
    }

    #[test]
    fn sub_satellite_user_is_at_boresight() {
        let sat = pos(52.817247, 9.291984, 550e3);
        let user = pos(52.817247, 9.291984, 0.0);
        let g = link_geometry(&sat, &user, &BoresightSpec::default(), 10.0).unwrap();
        assert!(g.uv.radius() < 1e-12);
        assert!((g.slant_range_m - 550e3).abs() < 1.0);
        assert!((g.elevation_deg - 90.0).abs() < 1e-6);
    }

    #[test]
    fn off_nadir_user_matches_reference_values() {
        let sat = pos(52.817247, 9.291984, 550e3);
        let user = pos(52.0, 8.0, 0.0);
        let g = link_geometry(&sat, &user, &BoresightSpec::default(), 10.0).unwrap();
        assert!((g.uv.u - -0.159_375_666_772_440_94).abs() < 1e-12);
        assert!((g.uv.v - -0.156_872_431_243_958_05).abs() < 1e-12);
        assert!((g.slant_range_m - 565_576.614_388_527_8).abs() < 1e-6);
        assert!((g.elevation_deg - 75.942_443_712_303_88).abs() < 1e-9);
    }

    #[test]
    fn azimuth_rotation_rotates_uv() {
        let sat = pos(52.817247, 9.291984, 550e3);
        let user = pos(52.0, 8.0, 0.0);
        let a = link_geometry(&sat, &user, &BoresightSpec::default(), 10.0).unwrap();
        let b = link_geometry(&sat, &user, &BoresightSpec { azimuth_deg: 90.0 }, 10.0).unwrap();
        assert!((b.uv.u - a.uv.v).abs() < 1e-12);
        assert!((b.uv.v + a.uv.u).abs() < 1e-12);
    }

    #[test]
    fn low_elevation_user_is_not_visible() {
        let sat = pos(52.0, 9.0, 550e3);
        let user = pos(30.0, 9.0, 0.0);
        let err = link_geometry(&sat, &user, &BoresightSpec::default(), 10.0).unwrap_err();
        assert!(matches!(err, Error::UserNotVisible { .. }));
    }

    #[test]
    fn invalid_latitude_names_the_field() {
        let err = GeodeticPosition::new(91.0, 0.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("latitude_deg"));
        assert!(GeodeticPosition::new(0.0, 181.0, 0.0).is_err());
        assert!(GeodeticPosition::new(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn geometry_is_deterministic() {
        let sat = pos(52.589261, 7.669242, 550e3);
        let user = pos(51.3, 6.1, 0.0);
        let a = link_geometry(&sat, &user, &BoresightSpec::default(), 10.0).unwrap();
        let b = link_geometry(&sat, &user, &BoresightSpec::default(), 10.0).unwrap();
        assert_eq!(a.uv.u.to_bits(), b.uv.u.to_bits());
        assert_eq!(a.uv.v.to_bits(), b.uv.v.to_bits());
        assert_eq!(a.slant_range_m.to_bits(), b.slant_range_m.to_bits());
    }

    proptest! {
        #[test]
        fn ecef_round_trip(lat in -89.9f64..89.9, lon in -179.9f64..179.9, alt in 0.0f64..2.0e6) {
            let p = pos(lat, lon, alt);
            let q = ecef_to_geodetic(&geodetic_to_ecef(&p));
            let back = geodetic_to_ecef(&q);
            prop_assert!((back - geodetic_to_ecef(&p)).norm() < 1e-6);
            prop_assert!((q.altitude_m - alt).abs() < 1e-6);
        }

        #[test]
        fn uv_inside_unit_disk(lat in 45.0f64..60.0, lon in 0.0f64..20.0) {
            let sat = pos(52.5, 9.0, 550e3);
            let user = pos(lat, lon, 0.0);
            if let Ok(g) = link_geometry(&sat, &user, &BoresightSpec::default(), -90.0) {
                prop_assert!(g.uv.u * g.uv.u + g.uv.v * g.uv.v <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn off_axis_radius_grows_along_ray(bearing in 0.0f64..360.0) {
            // Walk away from the sub-satellite point on a local great-circle ray.
            let sat = pos(52.5, 8.0, 550e3);
            let (sb, cb) = bearing.to_radians().sin_cos();
            let mut last = -1.0;
            for step in 0..12 {
                let dist_deg = step as f64 * 0.25;
                let lat = 52.5 + dist_deg * cb;
                let lon = 8.0 + dist_deg * sb / 52.5f64.to_radians().cos();
                let g = link_geometry(&sat, &pos(lat, lon, 0.0), &BoresightSpec::default(), -90.0).unwrap();
                prop_assert!(g.uv.radius() > last);
                last = g.uv.radius();
            }
        }
    }
}
