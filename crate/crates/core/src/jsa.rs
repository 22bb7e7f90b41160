//! Joint spectral amplitude `f = alpha * phi` of the generated pairs and its
//! Schmidt decomposition.
//!
//! Pump bandwidths are amplitude standard deviations in wavelength,
//! `alpha_p(omega) ~ exp(-(omega - omega_p)^2 / (2 sigma_w^2))` with
//! `sigma_w = 2 pi c sigma_nm / lambda^2`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
// Float methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::phasematch::{idler_wavelength, Branch, ProcessConfig};
use crate::spline::CubicSpline;
use crate::units::{omega_from_um, omega_width_from_nm, sinc, um_from_omega};
use crate::{Error, Result};

/// Minimum number of samples in an apodization profile.
pub const MIN_PROFILE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpTwo {
    Cw,
    /// Gaussian amplitude standard deviation in wavelength, nm.
    Pulsed { sigma_nm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    pub lambda_p1_um: f64,
    /// Gaussian amplitude standard deviation in wavelength, nm.
    pub sigma_p1_nm: f64,
    pub lambda_p2_um: f64,
    pub pump2: PumpTwo,
}

impl PumpSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_p1_nm > 0.0) {
            return Err(Error::invalid("pump 1 bandwidth must be positive"));
        }
        if let PumpTwo::Pulsed { sigma_nm } = self.pump2 {
            if !(sigma_nm > 0.0) {
                return Err(Error::invalid("pump 2 bandwidth must be positive"));
            }
        }
        if !(self.lambda_p1_um > 0.0 && self.lambda_p2_um > 0.0) {
            return Err(Error::invalid("pump wavelengths must be positive"));
        }
        Ok(())
    }

    /// Pump-1 amplitude standard deviation, rad/s.
    pub fn sigma_p1_omega(&self) -> f64 {
        omega_width_from_nm(self.lambda_p1_um, self.sigma_p1_nm)
    }

    /// Standard deviation of the pump function in `omega_s + omega_i`.
    pub fn sigma_sum_omega(&self) -> f64 {
        let s1 = self.sigma_p1_omega();
        match self.pump2 {
            PumpTwo::Cw => s1,
            PumpTwo::Pulsed { sigma_nm } => s1.hypot(omega_width_from_nm(self.lambda_p2_um, sigma_nm)),
        }
    }
}

/// `alpha(omega_s + omega_i)`, the convolution of the two pump spectra. With
/// a CW pump 2 this is pump 1's Gaussian at `omega_s + omega_i - omega_p2`
/// (unit peak); with two Gaussians it is their convolution integral.
pub fn pump_function(spec: &PumpSpec, ws: f64, wi: f64) -> Complex64 {
    let detuning = ws + wi - omega_from_um(spec.lambda_p1_um) - omega_from_um(spec.lambda_p2_um);
    let s1 = spec.sigma_p1_omega();
    let value = match spec.pump2 {
        PumpTwo::Cw => (-0.5 * (detuning / s1).powi(2)).exp(),
        PumpTwo::Pulsed { sigma_nm } => {
            let s2 = omega_width_from_nm(spec.lambda_p2_um, sigma_nm);
            let var = s1 * s1 + s2 * s2;
            (2.0 * PI).sqrt() * s1 * s2 / var.sqrt() * (-0.5 * detuning * detuning / var).exp()
        }
    };
    Complex64::new(value, 0.0)
}

/// `int_0^L exp(i q z) dz = L exp(i q L / 2) sinc(q L / 2)`.
pub fn uniform_integral(q: f64, length_m: f64) -> Complex64 {
    let half = 0.5 * q * length_m;
    Complex64::new(half.cos(), half.sin()) * (length_m * sinc(half))
}

/// Two-term phase-matching function
/// `(1/2) int_0^L [exp(i (dk + kappa) z) + exp(i (dk - kappa) z)] dz`.
pub fn pm_function(dk: f64, kappa_p2: f64, length_m: f64) -> Result<Complex64> {
    if !(length_m > 0.0) {
        return Err(Error::invalid("length must be positive"));
    }
    Ok((uniform_integral(dk + kappa_p2, length_m) + uniform_integral(dk - kappa_p2, length_m)) * 0.5)
}

/// Sampled nonlinearity weight `g(z)` on `[0, L]`, equally spaced.
#[derive(Debug, Clone, PartialEq)]
pub struct ApodizationProfile {
    length_m: f64,
    samples: Vec<f64>,
    spline: CubicSpline,
}

impl ApodizationProfile {
    pub fn from_samples(length_m: f64, samples: Vec<f64>) -> Result<Self> {
        if !(length_m > 0.0) {
            return Err(Error::invalid("profile length must be positive"));
        }
        if samples.len() < MIN_PROFILE_SAMPLES {
            return Err(Error::invalid(alloc::format!(
                "apodization profile needs at least {MIN_PROFILE_SAMPLES} samples"
            )));
        }
        if samples.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return Err(Error::invalid("apodization weights must lie in [0, 1]"));
        }
        let n = samples.len();
        let z = (0..n).map(|k| length_m * k as f64 / (n - 1) as f64).collect();
        let spline = CubicSpline::new(z, samples.clone())?;
        Ok(ApodizationProfile { length_m, samples, spline })
    }

    pub fn from_fn(length_m: f64, n: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..n).map(|k| g(k as f64 / (n - 1) as f64)).collect();
        Self::from_samples(length_m, samples)
    }

    pub fn uniform(length_m: f64, n: usize) -> Result<Self> {
        Self::from_fn(length_m, n, |_| 1.0)
    }

    /// Raised cosine (Hann) `sin^2(pi z / L)`.
    pub fn raised_cosine(length_m: f64, n: usize) -> Result<Self> {
        Self::from_fn(length_m, n, |u| (PI * u).sin().powi(2))
    }

    /// Gaussian centred at `L/2` with standard deviation `width_fraction L`.
    pub fn gaussian(length_m: f64, n: usize, width_fraction: f64) -> Result<Self> {
        if !(width_fraction > 0.0) {
            return Err(Error::invalid("Gaussian width must be positive"));
        }
        Self::from_fn(length_m, n, |u| (-0.5 * ((u - 0.5) / width_fraction).powi(2)).exp())
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        self.length_m / (self.samples.len() - 1) as f64
    }

    /// `int_0^L g(z) exp(i q z) dz`, exact for the cubic-spline
    /// interpolant of the samples.
    pub fn integral(&self, q: f64) -> Result<Complex64> {
        if q.abs() * self.spacing() > PI / 4.0 {
            return Err(Error::invalid(alloc::format!(
                "profile under-resolved: phase advance {:.3} rad per sample exceeds pi/4",
                q.abs() * self.spacing()
            )));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for p in self.spline.panels() {
            let m = moments(q, p.h);
            let local = m.iter().zip(p.coef).fold(Complex64::new(0.0, 0.0), |acc, (mk, c)| acc + mk * c);
            total += Complex64::new((q * p.x0).cos(), (q * p.x0).sin()) * local;
        }
        Ok(total)
    }
}

/// `int_0^h s^n exp(i q s) ds` for `n = 0..3`.
fn moments(q: f64, h: f64) -> [Complex64; 4] {
    if (q * h).abs() < 1.0 {
        moments_series(q, h)
    } else {
        moments_recurrence(q, h)
    }
}

/// `sum_k (i q h)^k / k! * h^(n+1) / (n + k + 1)`.
fn moments_series(q: f64, h: f64) -> [Complex64; 4] {
    let x = q * h;
    let mut m = [Complex64::new(0.0, 0.0); 4];
    for (n, mn) in m.iter_mut().enumerate() {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..60 {
            let add = term / (n + k + 1) as f64;
            sum += add;
            if add.norm() < 1e-18 * sum.norm() {
                break;
            }
            term *= Complex64::new(0.0, x) / (k + 1) as f64;
        }
        *mn = sum * h.powi(n as i32 + 1);
    }
    m
}

fn moments_recurrence(q: f64, h: f64) -> [Complex64; 4] {
    let x = q * h;
    let e = Complex64::new(x.cos(), x.sin());
    let iq = Complex64::new(0.0, q);
    let mut m = [Complex64::new(0.0, 0.0); 4];
    m[0] = (e - 1.0) / iq;
    for n in 1..4 {
        m[n] = (e * h.powi(n as i32) - m[n - 1] * n as f64) / iq;
    }
    m
}

/// Apodized two-term phase-matching function
/// `(1/2) int g(z) [exp(i (dk + kappa) z) + exp(i (dk - kappa) z)] dz`.
pub fn pm_function_apodized(profile: &ApodizationProfile, dk: f64, kappa_p2: f64) -> Result<Complex64> {
    Ok((profile.integral(dk + kappa_p2)? + profile.integral(dk - kappa_p2)?) * 0.5)
}

/// Largest `|phi(dk)|` outside the main lobe, relative to the peak, over
/// the equally spaced mismatch samples `dks` (single term, `kappa = 0`).
pub fn peak_side_lobe(profile: &ApodizationProfile, dks: &[f64]) -> Result<f64> {
    let mag = dks.iter().map(|&q| profile.integral(q).map(|v| v.norm())).collect::<Result<Vec<_>>>()?;
    let (ip, peak) = mag.iter().enumerate().fold((0, 0.0), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
    if peak == 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let mut lo = ip;
    while lo > 0 && mag[lo - 1] < mag[lo] {
        lo -= 1;
    }
    let mut hi = ip;
    while hi + 1 < mag.len() && mag[hi + 1] < mag[hi] {
        hi += 1;
    }
    let outside = mag[..lo].iter().chain(&mag[hi + 1..]).fold(0.0_f64, |a, &b| a.max(b));
    Ok(outside / peak)
}

/// Which supermode terms enter `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PmTerms {
    /// Only the configured branch (the other is far from phase matching).
    #[default]
    SelectedBranch,
    /// `(phi(dk_even) + phi(dk_odd)) / 2`.
    BothBranches,
}

/// Phase-matching lobes kept on each side of the main lobe by the
/// automatic grid extent.
pub const AUTO_PM_LOBES: f64 = 4.0;
/// `phi` is only evaluated where `|alpha|` exceeds this fraction of its
/// peak; below it `f` is zero to double precision.
pub const ALPHA_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsaGrid {
    pub n_signal: usize,
    pub n_idler: usize,
    /// Grid centre for the signal; the idler centre follows from the pumps.
    pub center_signal_um: f64,
    /// Half width of both axes in units of the pump-function sigma; `None`
    /// sizes the grid from the pump and phase-matching bandwidths.
    pub half_width_sigmas: Option<f64>,
}

impl JsaGrid {
    pub fn square(n: usize, center_signal_um: f64) -> Self {
        JsaGrid { n_signal: n, n_idler: n, center_signal_um, half_width_sigmas: None }
    }
}

/// Half width (rad/s) covering `4 sigma` of the pump function plus
/// [`AUTO_PM_LOBES`] sinc lobes of `phi` along the energy-conservation
/// ridge `omega_s + omega_i = const`, capped at `64 sigma`.
pub fn auto_half_width(
    process: &ProcessConfig,
    pump: &PumpSpec,
    center_signal_um: f64,
    length_m: f64,
) -> Result<f64> {
    let sigma = pump.sigma_sum_omega();
    let ws = omega_from_um(center_signal_um);
    let wi = omega_from_um(idler_wavelength(pump.lambda_p1_um, pump.lambda_p2_um, center_signal_um)?);
    let (wp1, wp2) = (omega_from_um(pump.lambda_p1_um), omega_from_um(pump.lambda_p2_um));
    let dk = |d: f64| process.mismatch_omegas([wp1, wp2, ws + d, wi - d], process.branch);
    let slope = ((dk(sigma)? - dk(-sigma)?) / (2.0 * sigma)).abs();
    let lobe = if slope > 0.0 { 2.0 * PI / (length_m * slope) } else { f64::INFINITY };
    Ok((4.0 * sigma + AUTO_PM_LOBES * lobe).min(64.0 * sigma))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    pub signal_omega: Vec<f64>,
    pub idler_omega: Vec<f64>,
    pub signal_um: Vec<f64>,
    pub idler_um: Vec<f64>,
    /// Row-major `[signal][idler]`.
    pub alpha: Vec<Complex64>,
    /// Zero where `|alpha|` is below [`ALPHA_FLOOR`] of its peak.
    pub phi: Vec<Complex64>,
    /// `alpha * phi / norm`, unit Frobenius norm.
    pub f: Vec<Complex64>,
    pub norm: f64,
}

impl JointSpectrum {
    pub fn shape(&self) -> (usize, usize) {
        (self.signal_omega.len(), self.idler_omega.len())
    }

    pub fn at(&self, is: usize, ii: usize) -> Complex64 {
        self.f[is * self.idler_omega.len() + ii]
    }

    /// Joint spectral intensity `|f|^2`.
    pub fn intensity(&self) -> Vec<f64> {
        self.f.iter().map(|v| v.norm_sqr()).collect()
    }
}

fn axis(center: f64, half_width: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![center];
    }
    (0..n).map(|k| center - half_width + 2.0 * half_width * k as f64 / (n - 1) as f64).collect()
}

pub fn build_jsa(
    process: &ProcessConfig,
    pump: &PumpSpec,
    grid: &JsaGrid,
    profile: Option<&ApodizationProfile>,
    length_m: f64,
    terms: PmTerms,
) -> Result<JointSpectrum> {
    pump.validate()?;
    process.validate()?;
    if grid.n_signal == 0 || grid.n_idler == 0 || grid.half_width_sigmas.is_some_and(|h| !(h > 0.0)) {
        return Err(Error::invalid("JSA grid needs at least one point per axis and a positive width"));
    }
    if !(length_m > 0.0) {
        return Err(Error::invalid("length must be positive"));
    }
    let li = idler_wavelength(pump.lambda_p1_um, pump.lambda_p2_um, grid.center_signal_um)?;
    let sigma = pump.sigma_sum_omega();
    let half = match grid.half_width_sigmas {
        Some(h) => h * sigma,
        None => auto_half_width(process, pump, grid.center_signal_um, length_m)?,
    };
    let signal_omega = axis(omega_from_um(grid.center_signal_um), half, grid.n_signal);
    let idler_omega = axis(omega_from_um(li), half, grid.n_idler);
    let (wp1, wp2) = (omega_from_um(pump.lambda_p1_um), omega_from_um(pump.lambda_p2_um));
    // Pump-1 detuning at which alpha reaches ALPHA_FLOOR (Gaussian in the
    // CW case, and a bound for the two-pulse convolution).
    let reach = sigma * (-2.0 * ALPHA_FLOOR.ln()).sqrt();

    // Spline-cached providers over every frequency phi is evaluated at.
    let first = |v: &[f64]| v[0];
    let last = |v: &[f64]| v[v.len() - 1];
    let lo = first(&signal_omega).min(first(&idler_omega)).min(wp2).min(wp1 - reach);
    let hi = last(&signal_omega).max(last(&idler_omega)).max(wp1 + reach);
    let pad = 0.01 * (hi - lo);
    let cfg = process.cached(um_from_omega(hi + pad), um_from_omega(lo - pad), 2048)?;
    let alpha_peak = pump_function(pump, 0.5 * (wp1 + wp2), 0.5 * (wp1 + wp2)).norm();

    let branches: &[(Branch, f64)] = match (process.branch, terms) {
        (Branch::None, _) => &[(Branch::None, 1.0)],
        (b, PmTerms::SelectedBranch) => {
            if b == Branch::Even {
                &[(Branch::Even, 0.5)]
            } else {
                &[(Branch::Odd, 0.5)]
            }
        }
        (_, PmTerms::BothBranches) => &[(Branch::Even, 0.5), (Branch::Odd, 0.5)],
    };

    let n = grid.n_signal * grid.n_idler;
    let mut alpha = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for &ws in &signal_omega {
        for &wi in &idler_omega {
            let a = pump_function(pump, ws, wi);
            alpha.push(a);
            let mut p = Complex64::new(0.0, 0.0);
            if a.norm() < ALPHA_FLOOR * alpha_peak {
                phi.push(p);
                continue;
            }
            for &(b, weight) in branches {
                let dk = cfg.mismatch_omegas([ws + wi - wp2, wp2, ws, wi], b)?;
                let term = match profile {
                    Some(g) => g.integral(dk)?,
                    None => uniform_integral(dk, length_m),
                };
                p += term * weight;
            }
            phi.push(p);
        }
    }
    let raw: Vec<Complex64> = alpha.iter().zip(&phi).map(|(a, p)| a * p).collect();
    let norm = raw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroSpectrum);
    }
    let f = raw.iter().map(|v| v / norm).collect();
    Ok(JointSpectrum {
        signal_um: signal_omega.iter().map(|&w| um_from_omega(w)).collect(),
        idler_um: idler_omega.iter().map(|&w| um_from_omega(w)).collect(),
        signal_omega,
        idler_omega,
        alpha,
        phi,
        f,
        norm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtReport {
    /// Normalized so that the squares sum to one, descending.
    pub singular_values: Vec<f64>,
    pub schmidt_number: f64,
    pub purity: f64,
}

/// Schmidt decomposition of a row-major `rows x cols` amplitude grid. The
/// singular values come from an SVD; the purity is `Tr[rho^2]` of the
/// reduced state `rho = F F^dagger / Tr(F F^dagger)`, which equals
/// `sum lambda_n^4` without the SVD's rounding.
pub fn schmidt_grid(rows: usize, cols: usize, data: &[Complex64]) -> Result<SchmidtReport> {
    if rows * cols != data.len() || data.is_empty() {
        return Err(Error::invalid("grid shape does not match data"));
    }
    let m = DMatrix::from_fn(rows, cols, |r, c| data[r * cols + c]);
    let rho = &m * m.adjoint();
    let trace: f64 = (0..rows).map(|k| rho[(k, k)].re).sum();
    if !(trace > 0.0) || !trace.is_finite() {
        return Err(Error::ZeroSpectrum);
    }
    let purity = rho.iter().map(|v| v.norm_sqr()).sum::<f64>() / (trace * trace);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    let scale = sv.iter().map(|s| s * s).sum::<f64>().sqrt();
    sv.iter_mut().for_each(|s| *s /= scale);
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(SchmidtReport { singular_values: sv, schmidt_number: 1.0 / purity, purity })
}

pub fn schmidt(js: &JointSpectrum) -> Result<SchmidtReport> {
    let (r, c) = js.shape();
    schmidt_grid(r, c, &js.f)
}
