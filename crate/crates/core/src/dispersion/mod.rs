//! Propagation constants of isolated guides.
//!
//! All providers map angular frequency (rad/s) to `beta` (1/m) and refuse
//! to evaluate outside their declared domain.

mod fiber;
mod material;
mod rect;

use alloc::vec::Vec;

pub use fiber::{fiber_beta, lp01_mode, FiberParams, Lp01, LP11_CUTOFF_V};
pub use material::{material_index, MaterialModel, MaterialName};
pub use rect::{rect_beta, slab_effective_index, DeviceGeometry, Polarization, RectGuide};

use crate::spline::CubicSpline;
use crate::units::{k0_from_omega, omega_from_um, SPEED_OF_LIGHT};
use crate::{Error, Result};

/// Relative step of the group-index central difference.
pub const GROUP_INDEX_STEP: f64 = 1e-4;

/// Minimum number of rows of a tabulated provider.
pub const MIN_TABLE_ROWS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum ProviderKind {
    /// `beta = sum_k c_k omega^k`.
    Polynomial(Vec<f64>),
    Fiber(FiberParams),
    Rect(RectGuide),
    /// Spline of the effective index against angular frequency.
    Tabulated(CubicSpline),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionProvider {
    kind: ProviderKind,
    omega_min: f64,
    omega_max: f64,
}

impl DispersionProvider {
    /// `beta = n omega / c`.
    pub fn dispersionless(index: f64, omega_min: f64, omega_max: f64) -> Result<Self> {
        Self::polynomial(alloc::vec![0.0, index / SPEED_OF_LIGHT], omega_min, omega_max)
    }

    pub fn polynomial(coefficients: Vec<f64>, omega_min: f64, omega_max: f64) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("polynomial provider needs finite coefficients"));
        }
        Self::with_domain(ProviderKind::Polynomial(coefficients), omega_min, omega_max)
    }

    /// LP01 mode of a step-index fibre between two wavelengths (um).
    pub fn fiber(params: FiberParams, lambda_min_um: f64, lambda_max_um: f64) -> Result<Self> {
        params.validate()?;
        check_window(params.cladding.window_um, lambda_min_um, lambda_max_um)?;
        Self::with_domain(
            ProviderKind::Fiber(params),
            omega_from_um(lambda_max_um),
            omega_from_um(lambda_min_um),
        )
    }

    /// Effective-index model of a rectangular guide between two wavelengths.
    pub fn rect(guide: RectGuide, lambda_min_um: f64, lambda_max_um: f64) -> Result<Self> {
        check_window(guide.window_um(), lambda_min_um, lambda_max_um)?;
        Self::with_domain(
            ProviderKind::Rect(guide),
            omega_from_um(lambda_max_um),
            omega_from_um(lambda_min_um),
        )
    }

    /// Spline through `(omega, n_eff)` samples with `omega` strictly increasing.
    pub fn tabulated(omega: Vec<f64>, n_eff: Vec<f64>) -> Result<Self> {
        if omega.len() < MIN_TABLE_ROWS {
            return Err(Error::invalid("tabulated dispersion needs at least 8 rows"));
        }
        if n_eff.iter().any(|n| !(*n > 0.0)) {
            return Err(Error::invalid("tabulated effective indices must be positive"));
        }
        let (lo, hi) = (omega[0], omega[omega.len() - 1]);
        let spline = CubicSpline::new(omega, n_eff)?;
        Self::with_domain(ProviderKind::Tabulated(spline), lo, hi)
    }

    fn with_domain(kind: ProviderKind, omega_min: f64, omega_max: f64) -> Result<Self> {
        if !(omega_min > 0.0 && omega_max > omega_min && omega_max.is_finite()) {
            return Err(Error::invalid("provider domain must satisfy 0 < omega_min < omega_max"));
        }
        Ok(DispersionProvider { kind, omega_min, omega_max })
    }

    pub fn kind(&self) -> &ProviderKind {
        &self.kind
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.kind, ProviderKind::Tabulated(_))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.omega_min, self.omega_max)
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.omega_min && omega <= self.omega_max
    }

    pub fn beta(&self, omega: f64) -> Result<f64> {
        if !self.contains(omega) {
            return Err(Error::OutOfDomain {
                quantity: "omega",
                value: omega,
                min: self.omega_min,
                max: self.omega_max,
            });
        }
        match &self.kind {
            ProviderKind::Polynomial(c) => Ok(c.iter().rev().fold(0.0, |acc, ck| acc * omega + ck)),
            ProviderKind::Fiber(p) => fiber_beta(p, omega),
            ProviderKind::Rect(g) => rect_beta(g, omega),
            ProviderKind::Tabulated(s) => {
                let n = s.eval(omega).ok_or_else(|| Error::numerical("spline lookup failed"))?;
                Ok(n * k0_from_omega(omega))
            }
        }
    }

    pub fn effective_index(&self, omega: f64) -> Result<f64> {
        Ok(self.beta(omega)? / k0_from_omega(omega))
    }

    /// Tabulated copy sampled at `n` equally spaced frequencies. Used to make
    /// repeated evaluation of expensive analytic providers cheap.
    pub fn resample(&self, omega_min: f64, omega_max: f64, n: usize) -> Result<Self> {
        if n < MIN_TABLE_ROWS {
            return Err(Error::invalid("resampling needs at least 8 points"));
        }
        let step = (omega_max - omega_min) / (n - 1) as f64;
        let omega: Vec<f64> = (0..n)
            .map(|k| if k == n - 1 { omega_max } else { omega_min + step * k as f64 })
            .collect();
        let n_eff = omega.iter().map(|&w| self.effective_index(w)).collect::<Result<Vec<_>>>()?;
        Self::tabulated(omega, n_eff)
    }
}

fn check_window(window: (f64, f64), lo: f64, hi: f64) -> Result<()> {
    if !(lo < hi) {
        return Err(Error::invalid("wavelength range must be increasing"));
    }
    if lo < window.0 || hi > window.1 {
        return Err(Error::OutOfDomain {
            quantity: "wavelength_um",
            value: if lo < window.0 { lo } else { hi },
            min: window.0,
            max: window.1,
        });
    }
    Ok(())
}

/// Builds a tabulated provider from `(wavelength_um, n_eff)` rows sorted by
/// ascending wavelength.
pub fn load_tabulated(rows: &[(f64, f64)]) -> Result<DispersionProvider> {
    if rows.len() < MIN_TABLE_ROWS {
        return Err(Error::invalid("tabulated dispersion needs at least 8 rows"));
    }
    if rows.iter().any(|r| !(r.0 > 0.0) || !r.1.is_finite()) {
        return Err(Error::invalid("table rows need positive wavelengths and finite indices"));
    }
    if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::invalid("table wavelengths must be strictly ascending"));
    }
    let (omega, n_eff) = rows.iter().rev().map(|&(l, n)| (omega_from_um(l), n)).unzip();
    DispersionProvider::tabulated(omega, n_eff)
}

/// `n_g = c d(beta)/d(omega)`.
///
/// Polynomial providers are differentiated exactly. Everything else uses a
/// Richardson-extrapolated central difference with steps `h = 1e-4 omega`
/// and `h/2`, which needs both `omega +- h` inside the domain.
pub fn group_index(provider: &DispersionProvider, omega: f64) -> Result<f64> {
    if let ProviderKind::Polynomial(c) = &provider.kind {
        let h = GROUP_INDEX_STEP * omega;
        if !provider.contains(omega - h) || !provider.contains(omega + h) {
            return Err(Error::OutOfDomain {
                quantity: "omega",
                value: omega,
                min: provider.omega_min + h,
                max: provider.omega_max - h,
            });
        }
        let d = c
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, ck)| acc * omega + k as f64 * ck);
        return Ok(SPEED_OF_LIGHT * d);
    }
    group_index_with_step(|w| provider.beta(w), omega, GROUP_INDEX_STEP * omega)
}

/// Group index of any `beta(omega)` with an explicit step.
pub fn group_index_with_step<F>(mut beta: F, omega: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut diff = |h: f64| -> Result<f64> { Ok((beta(omega + h)? - beta(omega - h)?) / (2.0 * h)) };
    let d1 = diff(h)?;
    let d2 = diff(0.5 * h)?;
    Ok(SPEED_OF_LIGHT * (4.0 * d2 - d1) / 3.0)
}
