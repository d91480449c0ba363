//! Unit conversions at the crate boundary.
//!
//! Every rate inside the model is an angular frequency in rad/µs
//! (equivalently 2π × MHz). Files and flags use ordinary frequency in MHz.

use std::f64::consts::TAU;

/// Ordinary frequency in MHz to angular frequency in rad/µs.
#[inline]
pub fn mhz_to_rad(mhz: f64) -> f64 {
    TAU * mhz
}

/// Angular frequency in rad/µs to ordinary frequency in MHz.
#[inline]
pub fn rad_to_mhz(rad_per_us: f64) -> f64 {
    rad_per_us / TAU
}

/// MHz per tesla for a gyromagnetic ratio given as γ_e/2π in GHz/T.
#[inline]
pub fn ghz_per_tesla_to_mhz_per_tesla(ghz_per_tesla: f64) -> f64 {
    ghz_per_tesla * 1.0e3
}

/// Decibel value of a non-negative linear power ratio, clamped at `floor_db`.
///
/// An exact zero maps to the floor.
#[inline]
pub fn to_db_clamped(linear: f64, floor_db: f64) -> f64 {
    if linear > 0.0 {
        (10.0 * linear.log10()).max(floor_db)
    } else {
        floor_db
    }
}
