
// Float methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use super::material::{material_index, MaterialModel};
use crate::roots::brent;
use crate::special::{bessel_j0, bessel_j1, bessel_k0_scaled, bessel_k1_scaled};
use crate::units::{k0_from_omega, um_from_omega};
use crate::{Error, Result};

/// First zero of J0, the LP11 cutoff.
pub const LP11_CUTOFF_V: f64 = 2.404_825_557_695_773;

/// Step-index fibre. The core index is `n_clad (1 + core_index_step)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberParams {
    pub core_radius_um: f64,
    pub core_index_step: f64,
    pub cladding: MaterialModel,
}

/// Solution of the scalar LP01 eigenvalue problem at one wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lp01 {
    pub u: f64,
    pub w: f64,
    pub v: f64,
    pub n_eff: f64,
    pub n_core: f64,
    pub n_clad: f64,
}

impl FiberParams {
    /// SMF-28-like: 4.1 um core radius, 0.36 % index step over fused silica.
    pub fn smf28_like() -> Self {
        FiberParams {
            core_radius_um: 4.1,
            core_index_step: 0.0036,
            cladding: MaterialModel::fused_silica(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.core_radius_um > 0.0 && self.core_radius_um.is_finite()) {
            return Err(Error::invalid("core radius must be positive"));
        }
        if !(self.core_index_step >= 0.0 && self.core_index_step < 1.0) {
            return Err(Error::invalid("core index step must be in [0, 1)"));
        }
        self.cladding.validate()
    }

    pub fn v_number(&self, wavelength_um: f64) -> Result<f64> {
        let ncl = material_index(&self.cladding, wavelength_um)?;
        let nco = ncl * (1.0 + self.core_index_step);
        Ok(2.0 * core::f64::consts::PI / wavelength_um
            * self.core_radius_um
            * (nco * nco - ncl * ncl).sqrt())
    }

    pub fn is_single_mode(&self, wavelength_um: f64) -> Result<bool> {
        Ok(self.v_number(wavelength_um)? < LP11_CUTOFF_V)
    }
}

/// Solves `U J1(U)/J0(U) = W K1(W)/K0(W)`, `U^2 + W^2 = V^2`, for the
/// fundamental mode.
pub fn lp01_mode(params: &FiberParams, omega: f64) -> Result<Lp01> {
    params.validate()?;
    let lambda = um_from_omega(omega);
    let n_clad = material_index(&params.cladding, lambda)?;
    let n_core = n_clad * (1.0 + params.core_index_step);
    let v = params.v_number(lambda)?;
    // Below V ~ 0.2 the normalised index b = W^2/V^2 is < 1e-20; the mode is
    // indistinguishable from the cladding light line.
    if v < 0.2 {
        return Ok(Lp01 { u: v, w: 0.0, v, n_eff: n_clad, n_core, n_clad });
    }
    let f = |u: f64| {
        let w = (v * v - u * u).sqrt();
        u * bessel_j1(u) / bessel_j0(u) - w * bessel_k1_scaled(w) / bessel_k0_scaled(w)
    };
    let hi = v.min(LP11_CUTOFF_V) * (1.0 - 1e-13);
    let u = brent(f, 1e-9 * v, hi, 1e-15)?;
    let w = (v * v - u * u).sqrt();
    let b = (w / v) * (w / v);
    let n_eff = (n_clad * n_clad + b * (n_core * n_core - n_clad * n_clad)).sqrt();
    Ok(Lp01 { u, w, v, n_eff, n_core, n_clad })
}

pub fn fiber_beta(params: &FiberParams, omega: f64) -> Result<f64> {
    Ok(lp01_mode(params, omega)?.n_eff * k0_from_omega(omega))
}
