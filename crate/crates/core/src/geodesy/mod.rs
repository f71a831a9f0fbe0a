//! WGS84 inverse geodesics and capital-to-capital country distances.

mod karney;
pub(crate) mod math;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::country::CountryCode;
pub use karney::InverseSolver;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesyError {
    #[error("non-finite or out-of-range coordinate: lat={lat}, lon={lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },
    #[error("invalid ellipsoid: a={a}, 1/f={inv_f}")]
    InvalidEllipsoid { a: f64, inv_f: f64 },
    #[error("no capital registered for {0}")]
    UnknownCountry(CountryCode),
}

/// A position on the surface: latitude in [-90, 90] degrees, longitude
/// normalised to [-180, 180).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeoPoint {
    lat_deg: f64,
    lon_deg: f64,
}

impl GeoPoint {
    pub fn new(lat_deg: f64, lon_deg: f64) -> Result<Self, GeodesyError> {
        if !lat_deg.is_finite() || !lon_deg.is_finite() || lat_deg.abs() > 90.0 {
            return Err(GeodesyError::InvalidCoordinate {
                lat: lat_deg,
                lon: lon_deg,
            });
        }
        let mut lon = math::ang_normalize(lon_deg);
        if lon == 180.0 {
            lon = -180.0;
        }
        Ok(GeoPoint {
            lat_deg,
            lon_deg: lon,
        })
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }
}

/// Reference ellipsoid given by its semi-major axis (meters) and inverse
/// flattening.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ellipsoid {
    pub semi_major_axis_m: f64,
    pub inverse_flattening: f64,
}

/// World Geodetic System 1984.
pub const WGS84: Ellipsoid = Ellipsoid {
    semi_major_axis_m: 6_378_137.0,
    inverse_flattening: 298.257_223_563,
};

impl Ellipsoid {
    pub fn new(semi_major_axis_m: f64, inverse_flattening: f64) -> Result<Self, GeodesyError> {
        if !(semi_major_axis_m > 0.0) || !(inverse_flattening > 1.0) {
            return Err(GeodesyError::InvalidEllipsoid {
                a: semi_major_axis_m,
                inv_f: inverse_flattening,
            });
        }
        Ok(Ellipsoid {
            semi_major_axis_m,
            inverse_flattening,
        })
    }

    pub fn flattening(&self) -> f64 {
        1.0 / self.inverse_flattening
    }

    pub fn solver(&self) -> InverseSolver {
        InverseSolver::new(self.semi_major_axis_m, self.flattening())
    }
}

/// Length in meters of the shortest geodesic between two points on the
/// ellipsoid. Input validity (finite, in-range coordinates) is enforced by
/// [`GeoPoint::new`].
pub fn inverse_geodesic(p1: GeoPoint, p2: GeoPoint, ellipsoid: &Ellipsoid) -> f64 {
    ellipsoid
        .solver()
        .distance(p1.lat_deg, p1.lon_deg, p2.lat_deg, p2.lon_deg)
}

/// Capital seat-of-government coordinates for every analysed country.
#[derive(Debug, Clone, Default)]
pub struct CapitalRegistry {
    entries: BTreeMap<CountryCode, (String, GeoPoint)>,
}

impl CapitalRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, country: CountryCode, name: String, point: GeoPoint) {
        self.entries.insert(country, (name, point));
    }

    pub fn get(&self, country: CountryCode) -> Option<&(String, GeoPoint)> {
        self.entries.get(&country)
    }

    pub fn point(&self, country: CountryCode) -> Result<GeoPoint, GeodesyError> {
        self.entries
            .get(&country)
            .map(|(_, p)| *p)
            .ok_or(GeodesyError::UnknownCountry(country))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn countries(&self) -> impl Iterator<Item = CountryCode> + '_ {
        self.entries.keys().copied()
    }

    /// Geodesic distance between two capitals in meters on WGS84, using a
    /// caller-provided solver so the distance matrix reuses one instance.
    pub fn capital_distance_m(
        &self,
        solver: &InverseSolver,
        c1: CountryCode,
        c2: CountryCode,
    ) -> Result<f64, GeodesyError> {
        let p1 = self.point(c1)?;
        let p2 = self.point(c2)?;
        Ok(solver.distance(p1.lat_deg, p1.lon_deg, p2.lat_deg, p2.lon_deg))
    }

    /// Capital-to-capital distance in kilometers (full precision; the report
    /// layer rounds to integer km).
    pub fn capital_distance_km(
        &self,
        solver: &InverseSolver,
        c1: CountryCode,
        c2: CountryCode,
    ) -> Result<f64, GeodesyError> {
        Ok(self.capital_distance_m(solver, c1, c2)? / 1000.0)
    }
}
