//! Bessel functions for the step-index fibre mode.

// Float methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

#[inline]
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}

#[inline]
pub fn bessel_j1(x: f64) -> f64 {
    libm::j1(x)
}

/// `exp(x) K_nu(x)` for `nu` in {0, 1} and `x > 0`.
///
/// Trapezoid rule on `int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt`. The
/// integrand is analytic in a strip around the real axis, so the rule
/// converges geometrically; a step of 1/8 is at round-off level.
fn bessel_k_scaled(nu: u8, x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::INFINITY;
    }
    const H: f64 = 0.125;
    let mut sum = 0.5;
    for k in 1..4000u32 {
        let t = H * k as f64;
        let s = (0.5 * t).sinh();
        let e = (-2.0 * x * s * s).exp();
        let term = if nu == 0 { e } else { e * t.cosh() };
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    H * sum
}

pub fn bessel_k0_scaled(x: f64) -> f64 {
    bessel_k_scaled(0, x)
}

pub fn bessel_k1_scaled(x: f64) -> f64 {
    bessel_k_scaled(1, x)
}

pub fn bessel_k0(x: f64) -> f64 {
    (-x).exp() * bessel_k0_scaled(x)
}

pub fn bessel_k1(x: f64) -> f64 {
    (-x).exp() * bessel_k1_scaled(x)
}
