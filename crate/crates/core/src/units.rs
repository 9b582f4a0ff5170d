//! Physical constants (CODATA 2018, SI) and unit conversions.

use std::f64::consts::TAU;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One e·a₀ in C·m.
pub const EA0: f64 = ELEMENTARY_CHARGE * BOHR_RADIUS;
/// One e·a₀² in C·m².
pub const EA0_SQ: f64 = ELEMENTARY_CHARGE * BOHR_RADIUS * BOHR_RADIUS;

pub fn wavenumber_to_angular(cm_inv: f64) -> f64 {
    TAU * SPEED_OF_LIGHT * 100.0 * cm_inv
}

pub fn hz_to_angular(hz: f64) -> f64 {
    TAU * hz
}

pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TAU
}
