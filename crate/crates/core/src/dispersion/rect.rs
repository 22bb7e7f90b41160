
// Float methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use super::material::{material_index, MaterialModel};
use crate::roots::brent;
use crate::units::{k0_from_omega, um_from_omega};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Te,
    Tm,
}

/// Silicon coupler cross-section: guide A (FWM guide) and guide B (bus).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceGeometry {
    pub w_a_um: f64,
    pub h_a_um: f64,
    pub w_b_um: f64,
    pub h_b_um: f64,
    pub separation_um: f64,
    pub pedestal_height_um: f64,
}

impl DeviceGeometry {
    /// 0.32 x 0.22 um and 0.4 x 0.42 um guides, 0.6 um apart, on a 20 nm
    /// pedestal.
    pub fn reference_coupler() -> Self {
        DeviceGeometry {
            w_a_um: 0.32,
            h_a_um: 0.22,
            w_b_um: 0.4,
            h_b_um: 0.42,
            separation_um: 0.6,
            pedestal_height_um: 0.02,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            self.w_a_um,
            self.h_a_um,
            self.w_b_um,
            self.h_b_um,
            self.separation_um,
            self.pedestal_height_um,
        ];
        if dims.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::invalid("all geometry dimensions must be positive"));
        }
        if self.separation_um <= 0.5 * (self.w_a_um + self.w_b_um) {
            return Err(Error::invalid("guides overlap: separation <= (w_A + w_B)/2"));
        }
        Ok(())
    }

    /// Gap between the facing sidewalls.
    pub fn gap_um(&self) -> f64 {
        self.separation_um - 0.5 * (self.w_a_um + self.w_b_um)
    }

    pub fn guide_a(&self, polarization: Polarization) -> RectGuide {
        RectGuide::silicon_on_silica(self.w_a_um, self.h_a_um, polarization)
    }

    pub fn guide_b(&self, polarization: Polarization) -> RectGuide {
        RectGuide::silicon_on_silica(self.w_b_um, self.h_b_um, polarization)
    }
}

/// Rectangular core on a substrate, with a uniform cover on top and sides.
///
/// The pedestal under a silicon rib is folded into the substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct RectGuide {
    pub width_um: f64,
    pub height_um: f64,
    pub core: MaterialModel,
    pub substrate: MaterialModel,
    pub cover_index: f64,
    pub polarization: Polarization,
}

impl RectGuide {
    pub fn silicon_on_silica(width_um: f64, height_um: f64, polarization: Polarization) -> Self {
        RectGuide {
            width_um,
            height_um,
            core: MaterialModel::silicon(),
            substrate: MaterialModel::fused_silica(),
            cover_index: 1.0,
            polarization,
        }
    }

    /// Overlap of the core and substrate validity windows.
    pub fn window_um(&self) -> (f64, f64) {
        (
            self.core.window_um.0.max(self.substrate.window_um.0),
            self.core.window_um.1.min(self.substrate.window_um.1),
        )
    }

    pub fn effective_index(&self, wavelength_um: f64) -> Result<f64> {
        if !(self.width_um > 0.0 && self.height_um > 0.0) {
            return Err(Error::invalid("guide width and height must be positive"));
        }
        let k0 = 2.0 * core::f64::consts::PI / wavelength_um;
        let n_core = material_index(&self.core, wavelength_um)?;
        let n_sub = material_index(&self.substrate, wavelength_um)?;
        let n_cov = self.cover_index;
        // TE (E along the width): TE slab vertically, TM slab laterally.
        let tm_vertical = self.polarization == Polarization::Tm;
        let not_guided = |_| Error::NotGuided { wavelength_um };
        let n_vert = slab_effective_index(k0, self.height_um, n_core, n_sub, n_cov, tm_vertical)
            .map_err(not_guided)?;
        let n_eff = slab_effective_index(k0, self.width_um, n_vert, n_cov, n_cov, !tm_vertical)
            .map_err(not_guided)?;
        if n_eff <= n_sub {
            return Err(Error::NotGuided { wavelength_um });
        }
        Ok(n_eff)
    }
}

/// Fundamental-mode effective index of an asymmetric three-layer slab.
///
/// `k0` and `thickness` must be in reciprocal and direct units of the same
/// length. Solves `q t - atan(r_s p_s / q) - atan(r_c p_c / q) = 0` with
/// `r = n_core^2 / n_clad^2` for TM and 1 for TE.
pub fn slab_effective_index(
    k0: f64,
    thickness: f64,
    n_core: f64,
    n_sub: f64,
    n_cover: f64,
    tm: bool,
) -> Result<f64> {
    let lo = n_sub.max(n_cover);
    if n_core <= lo {
        return Err(Error::invalid("slab core index must exceed both claddings"));
    }
    let nc2 = n_core * n_core;
    let (rs, rc) = if tm {
        (nc2 / (n_sub * n_sub), nc2 / (n_cover * n_cover))
    } else {
        (1.0, 1.0)
    };
    let f = |n: f64| {
        let n2 = n * n;
        let q = k0 * (nc2 - n2).max(0.0).sqrt();
        let ps = k0 * (n2 - n_sub * n_sub).max(0.0).sqrt();
        let pc = k0 * (n2 - n_cover * n_cover).max(0.0).sqrt();
        q * thickness - (rs * ps).atan2(q) - (rc * pc).atan2(q)
    };
    if f(lo) <= 0.0 {
        return Err(Error::numerical("slab below cutoff"));
    }
    brent(f, lo, n_core, 0.0)
}

pub fn rect_beta(guide: &RectGuide, omega: f64) -> Result<f64> {
    Ok(guide.effective_index(um_from_omega(omega))? * k0_from_omega(omega))
}
