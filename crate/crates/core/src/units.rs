//! Physical constants and unit conversions.
//!
//! Internally everything is SI: angular frequency in rad/s, propagation
//! constants in 1/m, lengths in m. Wavelengths at API boundaries are in um.

use core::f64::consts::PI;
// Float methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum wavelength in um to angular frequency in rad/s.
#[inline]
pub fn omega_from_um(lambda_um: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (lambda_um * 1e-6)
}

/// Angular frequency in rad/s to vacuum wavelength in um.
#[inline]
pub fn um_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e6
}

/// Vacuum wavenumber 2 pi / lambda in 1/m.
#[inline]
pub fn k0_from_omega(omega: f64) -> f64 {
    omega / SPEED_OF_LIGHT
}

/// Unnormalised sinc, sin(x)/x.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Wavelength bandwidth (nm) at a centre wavelength (um) to angular-frequency
/// bandwidth (rad/s), first order.
pub fn omega_width_from_nm(center_um: f64, width_nm: f64) -> f64 {
    let lambda = center_um * 1e-6;
    2.0 * PI * SPEED_OF_LIGHT * width_nm * 1e-9 / (lambda * lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_round_trip() {
        for l in [0.532, 1.0, 1.55, 3.0] {
            assert!((um_from_omega(omega_from_um(l)) - l).abs() < 1e-14);
        }
    }

    #[test]
    fn sinc_branches_agree() {
        let x = 1e-4;
        assert!((sinc(x * 0.999) - (x * 0.999).sin() / (x * 0.999)).abs() < 1e-16);
        assert_eq!(sinc(0.0), 1.0);
    }
}
