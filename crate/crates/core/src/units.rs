//! Unit conventions.
//!
//! All rates are carried as linear frequencies in MHz. Multiplying by 2π
//! gives angular frequencies in rad/µs, which is what the equations of motion
//! use. Quantities that carry time units (K in µs, L in µs^½, the control
//! energy h in rad²/µs) are always stored in the angular system.

use std::f64::consts::TAU;

/// Linear MHz → angular rad/µs.
#[inline]
pub fn angular(mhz: f64) -> f64 {
    TAU * mhz
}

/// Angular rad/µs → linear MHz.
#[inline]
pub fn linear(rad_per_us: f64) -> f64 {
    rad_per_us / TAU
}
