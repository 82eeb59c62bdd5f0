//! Physical constants and unit conversions. Everything internal is SI:
//! meters, seconds, rad/s.

use std::f64::consts::PI;

/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// 2√(2 ln 2): ratio of a Gaussian's intensity FWHM to its standard deviation.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

pub const NM: f64 = 1e-9;
pub const FS: f64 = 1e-15;

pub fn nm(value: f64) -> f64 {
    value * NM
}

pub fn to_nm(meters: f64) -> f64 {
    meters / NM
}

pub fn fs(value: f64) -> f64 {
    value * FS
}

pub fn to_fs(seconds: f64) -> f64 {
    seconds / FS
}

/// Angular frequency of light with vacuum wavelength `lambda` (m).
pub fn wavelength_to_omega(lambda: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / lambda
}

/// Vacuum wavelength of light at angular frequency `omega` (rad/s).
pub fn omega_to_wavelength(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

/// Converts a wavelength-domain intensity FWHM at `lambda` into the
/// angular-frequency intensity FWHM (first-order Jacobian).
pub fn fwhm_wavelength_to_omega(lambda: f64, fwhm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * fwhm / (lambda * lambda)
}
