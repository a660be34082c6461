//! Great-circle distances and the urban-centre radius filter.

use alloc::string::String;

use crate::error::{Error, Result};
use crate::record::TweetRecord;

/// Mean Earth radius used for every distance.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Default geo-filter radius around each centre.
pub const DEFAULT_RADIUS_KM: f64 = 10.0;

/// A validated latitude/longitude pair in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon {
    lat: f64,
    lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::InvalidCoordinates { lat, lon });
        }
        Ok(LatLon { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrbanCentre {
    pub name: String,
    pub location: LatLon,
}

/// Haversine distance in kilometres.
pub fn haversine_km(a: LatLon, b: LatLon) -> f64 {
    let to_rad = core::f64::consts::PI / 180.0;
    let phi1 = a.lat * to_rad;
    let phi2 = b.lat * to_rad;
    let dphi = (b.lat - a.lat) * to_rad;
    let dlambda = (b.lon - a.lon) * to_rad;
    let s1 = libm::sin(dphi / 2.0);
    let s2 = libm::sin(dlambda / 2.0);
    let h = s1 * s1 + libm::cos(phi1) * libm::cos(phi2) * s2 * s2;
    // rounding can push h a hair past 1 for antipodal points
    let h = h.clamp(0.0, 1.0);
    2.0 * EARTH_RADIUS_KM * libm::asin(libm::sqrt(h))
}

/// Distance to the closest centre, or `None` when the list is empty.
pub fn nearest_centre_km(point: LatLon, centres: &[UrbanCentre]) -> Option<f64> {
    centres
        .iter()
        .map(|c| haversine_km(point, c.location))
        .fold(None, |best, d| match best {
            Some(b) if b <= d => Some(b),
            _ => Some(d),
        })
}

/// True iff the record carries coordinates and lies within `radius_km` of at
/// least one centre. The boundary is inclusive.
pub fn within_centres(record: &TweetRecord, centres: &[UrbanCentre], radius_km: f64) -> bool {
    match record.location {
        None => false,
        Some(p) => nearest_centre_km(p, centres).is_some_and(|d| d <= radius_km),
    }
}
