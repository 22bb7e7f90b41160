//! Supermodes of two coupled guides and coupling-constant models.
//!
//! Conventions: guide amplitudes obey `d/dz (a, b) = i M (a, b)` with
//! `M = [[beta_A, kappa], [kappa, beta_B]]`. The even (`+`) supermode has the
//! larger propagation constant `mean + psi`; coefficient vectors are `(c_A,
//! c_B)` with `c_B >= 0`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
// Float methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::dispersion::{lp01_mode, FiberParams, MIN_TABLE_ROWS};
use crate::special::{bessel_k0_scaled, bessel_k1_scaled};
use crate::spline::CubicSpline;
use crate::units::{omega_from_um, um_from_omega};
use crate::{Error, Result};

/// Supermode record at one frequency. All quantities in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Supermodes {
    pub beta_mean: f64,
    pub delta_beta: f64,
    pub kappa: f64,
    pub psi: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
}

pub fn supermodes(beta_a: f64, beta_b: f64, kappa: f64) -> Supermodes {
    let beta_mean = 0.5 * (beta_a + beta_b);
    let delta_beta = 0.5 * (beta_a - beta_b);
    let psi = delta_beta.hypot(kappa);
    Supermodes {
        beta_mean,
        delta_beta,
        kappa,
        psi,
        beta_plus: beta_mean + psi,
        beta_minus: beta_mean - psi,
    }
}

/// Normalised guide coefficients `(c_A, c_B)` of both supermodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupermodeFields {
    pub even: [f64; 2],
    pub odd: [f64; 2],
    /// Set when `delta_beta = kappa = 0`, where any orthonormal pair is an
    /// eigenbasis and the symmetric pair is returned.
    pub degenerate: bool,
}

impl SupermodeFields {
    /// Normalisation factors `N = sqrt(r^2 + 1)` with `r = c_A / c_B`;
    /// infinite for a mode confined to guide A.
    pub fn normalization(&self) -> (f64, f64) {
        (1.0 / self.even[1], 1.0 / self.odd[1])
    }

    /// Fraction of the even mode's power carried by guide A.
    pub fn even_fraction_a(&self) -> f64 {
        self.even[0] * self.even[0]
    }
}

pub fn supermode_fields(delta_beta: f64, kappa: f64) -> SupermodeFields {
    if delta_beta == 0.0 && kappa == 0.0 {
        return SupermodeFields {
            even: [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            odd: [-FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            degenerate: true,
        };
    }
    let psi = delta_beta.hypot(kappa);
    // Two parallel forms of each eigenvector; the longer one avoids
    // cancellation.
    let even = longer([delta_beta + psi, kappa], [kappa, psi - delta_beta]);
    let odd = longer([delta_beta - psi, kappa], [-kappa, delta_beta + psi]);
    SupermodeFields { even: normalize(even), odd: normalize(odd), degenerate: false }
}

fn longer(u: [f64; 2], v: [f64; 2]) -> [f64; 2] {
    if u[0].hypot(u[1]) >= v[0].hypot(v[1]) {
        u
    } else {
        v
    }
}

fn normalize(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    let mut out = [v[0] / n, v[1] / n];
    if out[1] < 0.0 || (out[1] == 0.0 && out[0] < 0.0) {
        out = [-out[0], -out[1]];
    }
    out
}

/// Twin-core coupling constant of identical step-index fibres,
///
/// `kappa = sqrt(2 Delta)/a * U^2/V^3 * K0(W d/a) / K1(W)^2`,
///
/// with `d` the centre-to-centre separation.
pub fn fiber_coupling(
    guide_a: &FiberParams,
    guide_b: &FiberParams,
    separation_um: f64,
    omega: f64,
) -> Result<f64> {
    if guide_a != guide_b {
        return Err(Error::invalid("fibre coupling formula needs identical cores"));
    }
    let a = guide_a.core_radius_um;
    if !(separation_um > 2.0 * a) {
        return Err(Error::invalid("fibre cores overlap: separation <= 2 core radii"));
    }
    let m = lp01_mode(guide_a, omega)?;
    if m.w == 0.0 {
        return Ok(0.0);
    }
    let delta = (m.n_core * m.n_core - m.n_clad * m.n_clad) / (2.0 * m.n_core * m.n_core);
    let x = m.w * separation_um / a;
    let k1 = bessel_k1_scaled(m.w);
    let bessel = bessel_k0_scaled(x) / (k1 * k1) * (2.0 * m.w - x).exp();
    let a_m = a * 1e-6;
    Ok((2.0 * delta).sqrt() / a_m * m.u * m.u / (m.v * m.v * m.v) * bessel)
}

/// Coupling constant as a function of frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingModel {
    Constant(f64),
    /// `kappa = kappa0 exp(rate (lambda - lambda0))`, wavelengths in um.
    Exponential {
        kappa0: f64,
        lambda0_um: f64,
        rate_per_um: f64,
    },
    Fiber {
        params: FiberParams,
        separation_um: f64,
    },
    /// Spline of kappa against angular frequency.
    Tabulated(CubicSpline),
}

impl CouplingModel {
    pub fn none() -> Self {
        CouplingModel::Constant(0.0)
    }

    pub fn exponential(kappa0: f64, lambda0_um: f64, rate_per_um: f64) -> Result<Self> {
        if !(kappa0 >= 0.0 && kappa0.is_finite() && lambda0_um > 0.0 && rate_per_um.is_finite()) {
            return Err(Error::invalid("exponential coupling needs kappa0 >= 0, lambda0 > 0"));
        }
        Ok(CouplingModel::Exponential { kappa0, lambda0_um, rate_per_um })
    }

    /// Exponential model through two `(wavelength_um, kappa)` points.
    pub fn exponential_fit(p1: (f64, f64), p2: (f64, f64)) -> Result<Self> {
        if !(p1.1 > 0.0 && p2.1 > 0.0) || p1.0 == p2.0 {
            return Err(Error::invalid("exponential fit needs two distinct points with kappa > 0"));
        }
        let rate = (p2.1 / p1.1).ln() / (p2.0 - p1.0);
        Self::exponential(p1.1, p1.0, rate)
    }

    /// Tabulated model from `(wavelength_um, kappa_per_m)` rows sorted by
    /// ascending wavelength.
    pub fn tabulated(rows: &[(f64, f64)]) -> Result<Self> {
        if rows.len() < MIN_TABLE_ROWS {
            return Err(Error::invalid("tabulated coupling needs at least 8 rows"));
        }
        if rows.iter().any(|r| !(r.0 > 0.0) || !(r.1 >= 0.0)) {
            return Err(Error::invalid("coupling rows need positive wavelengths and kappa >= 0"));
        }
        if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("coupling wavelengths must be strictly ascending"));
        }
        let (omega, kappa): (Vec<f64>, Vec<f64>) =
            rows.iter().rev().map(|&(l, k)| (omega_from_um(l), k)).unzip();
        Ok(CouplingModel::Tabulated(CubicSpline::new(omega, kappa)?))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CouplingModel::Constant(k) if *k == 0.0)
            || matches!(self, CouplingModel::Exponential { kappa0, .. } if *kappa0 == 0.0)
    }
}

pub fn coupling_eval(model: &CouplingModel, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("angular frequency must be positive"));
    }
    let k = match model {
        CouplingModel::Constant(k) => *k,
        CouplingModel::Exponential { kappa0, lambda0_um, rate_per_um } => {
            kappa0 * (rate_per_um * (um_from_omega(omega) - lambda0_um)).exp()
        }
        CouplingModel::Fiber { params, separation_um } => {
            fiber_coupling(params, params, *separation_um, omega)?
        }
        CouplingModel::Tabulated(s) => {
            let (lo, hi) = s.domain();
            s.eval(omega).ok_or(Error::OutOfDomain { quantity: "omega", value: omega, min: lo, max: hi })?
        }
    };
    if !(k >= 0.0) && !matches!(model, CouplingModel::Tabulated(_)) {
        return Err(Error::invalid("coupling constant must be non-negative"));
    }
    // Spline overshoot between non-negative samples is clipped.
    Ok(k.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeatLength {
    Finite(f64),
    Infinite,
}

impl BeatLength {
    pub fn meters(&self) -> f64 {
        match self {
            BeatLength::Finite(l) => *l,
            BeatLength::Infinite => f64::INFINITY,
        }
    }
}

/// Full power-transfer period `pi / psi`.
pub fn beat_length(psi: f64) -> Result<BeatLength> {
    period(PI, psi)
}

/// Field-amplitude period `2 pi / psi`.
pub fn field_period(psi: f64) -> Result<BeatLength> {
    period(2.0 * PI, psi)
}

fn period(scale: f64, psi: f64) -> Result<BeatLength> {
    if !(psi >= 0.0) || !psi.is_finite() {
        return Err(Error::invalid("psi must be finite and non-negative"));
    }
    if psi == 0.0 {
        return Ok(BeatLength::Infinite);
    }
    Ok(BeatLength::Finite(scale / psi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let s = supermodes(1000.0 + 300.0, 1000.0 - 300.0, 400.0);
        assert_eq!(s.delta_beta, 300.0);
        assert_eq!(s.psi, 500.0);
        assert_eq!(s.beta_plus, 1500.0);
        assert_eq!(s.beta_minus, 500.0);
    }

    #[test]
    fn symmetric_pair() {
        let k = 5.9e6;
        let s = supermodes(k, k, 250.0);
        assert_eq!(s.beta_plus, k + 250.0);
        assert_eq!(s.beta_minus, k - 250.0);
        assert_eq!(s.psi, 250.0);
        let f = supermode_fields(0.0, 250.0);
        assert!((f.even[0] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.even[1] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.odd[0] + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(!f.degenerate);
    }

    #[test]
    fn decoupled_limit_labels() {
        let s = supermodes(10.0, 4.0, 0.0);
        assert_eq!((s.beta_plus, s.beta_minus, s.psi), (10.0, 4.0, 3.0));
        let f = supermode_fields(3.0, 0.0);
        assert_eq!((f.even, f.odd), ([1.0, 0.0], [0.0, 1.0]));
        let g = supermode_fields(-3.0, 0.0);
        assert_eq!((g.even, g.odd), ([0.0, 1.0], [1.0, 0.0]));
    }

    #[test]
    fn degenerate_input_is_flagged() {
        let f = supermode_fields(0.0, 0.0);
        assert!(f.degenerate);
        assert_eq!(f.even[0], f.even[1]);
    }

    #[test]
    fn three_quarter_ratio() {
        let kappa = 400.0;
        let f = supermode_fields(0.75 * kappa, kappa);
        let psi = 1.25 * kappa;
        // c_A/c_B = (db +- psi)/kappa in the M = [[bA, k], [k, bB]] convention.
        assert!((f.even[0] / f.even[1] - (0.75 * kappa + psi) / kappa).abs() < 1e-12);
        assert!((f.odd[0] / f.odd[1] - (0.75 * kappa - psi) / kappa).abs() < 1e-12);
        let (ne, no) = f.normalization();
        assert!((ne - (4.0f64 + 1.0).sqrt()).abs() < 1e-12);
        assert!((no - (0.25f64 + 1.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn strong_asymmetry_localizes() {
        let f = supermode_fields(10.0, 1.0);
        assert!(f.even_fraction_a() >= 0.99);
    }

    #[test]
    fn exponential_model() {
        let m = CouplingModel::exponential(46e3, 1.55, 0.0).unwrap();
        for l in [0.5, 1.55, 3.0] {
            assert_eq!(coupling_eval(&m, omega_from_um(l)).unwrap(), 46e3);
        }
        let m = CouplingModel::exponential(46e3, 1.55, 1.7).unwrap();
        assert_eq!(coupling_eval(&m, omega_from_um(1.55)).unwrap(), 46e3);
        let fit = CouplingModel::exponential_fit((1.2, 1e4), (1.6, 4e4)).unwrap();
        let k = coupling_eval(&fit, omega_from_um(1.6)).unwrap();
        assert!((k - 4e4).abs() < 1e-9);
    }

    #[test]
    fn beat_lengths() {
        assert_eq!(beat_length(PI).unwrap(), BeatLength::Finite(1.0));
        assert_eq!(beat_length(0.0).unwrap(), BeatLength::Infinite);
        assert_eq!(field_period(PI).unwrap(), BeatLength::Finite(2.0));
        assert!(beat_length(-1.0).is_err());
        let l = beat_length(46e3).unwrap().meters();
        assert!((l - 68.295e-6).abs() < 1e-9);
        assert!((beat_length(250.0).unwrap().meters() - 12.566e-3).abs() < 1e-6);
    }
}
