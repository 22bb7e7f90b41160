//! Geometry search for simultaneous phase matching and group-velocity
//! matching of the asymmetric silicon coupler.
//!
//! The objective is
//! `(max(0, |Dk| - tol) / (2 pi / L))^2 + GVM_HINGE_WEIGHT * max(0, -margin)^2`,
//! zero exactly when both constraints hold.

use alloc::vec::Vec;
use core::f64::consts::PI;

// Float methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::coupledmode::{coupling_eval, CouplingModel};
use crate::dispersion::{DeviceGeometry, DispersionProvider, Polarization, RectGuide};
use crate::phasematch::{gvm_report, idler_wavelength, phase_mismatch, Branch, CouplingScope, ProcessConfig};
use crate::roots::{brent, golden_max};
use crate::units::omega_from_um;
use crate::{Error, Result};

pub const GVM_HINGE_WEIGHT: f64 = 10.0;
/// Rows in the tabulated coupling of a non-reference separation.
const COUPLING_ROWS: usize = 33;
const REFINE_MAX_ITER: usize = 200;
const REFINE_DIAMETER_UM: f64 = 1e-4;

/// Coupling of a reference geometry, rescaled for other separations by the
/// evanescent decay `exp(-p (S - S_ref))`, where `p` is the mean air-side
/// decay constant `k0 sqrt(n_eff^2 - 1)` of the two guides.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingLaw {
    pub reference: CouplingModel,
    pub reference_separation_um: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryBounds {
    pub w_a_um: (f64, f64),
    pub h_a_um: (f64, f64),
    pub w_b_um: (f64, f64),
    pub h_b_um: (f64, f64),
    pub separation_um: (f64, f64),
}

impl GeometryBounds {
    /// `g * (1 -+ fraction)` on every dimension.
    pub fn around(g: &DeviceGeometry, fraction: f64) -> Self {
        let r = |x: f64| (x * (1.0 - fraction), x * (1.0 + fraction));
        GeometryBounds {
            w_a_um: r(g.w_a_um),
            h_a_um: r(g.h_a_um),
            w_b_um: r(g.w_b_um),
            h_b_um: r(g.h_b_um),
            separation_um: r(g.separation_um),
        }
    }

    fn axes(&self) -> [(f64, f64); 5] {
        [self.w_a_um, self.h_a_um, self.w_b_um, self.h_b_um, self.separation_um]
    }

    pub fn validate(&self) -> Result<()> {
        for (lo, hi) in self.axes() {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::invalid("geometry bounds must satisfy 0 < lo <= hi"));
            }
        }
        Ok(())
    }

    pub fn contains(&self, g: &DeviceGeometry) -> bool {
        let x = coords(g);
        self.axes().iter().zip(x).all(|((lo, hi), v)| v >= *lo && v <= *hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignTarget {
    pub lambda_p1_um: f64,
    pub lambda_p2_um: f64,
    pub lambda_s_um: f64,
    pub length_m: f64,
    /// Accepted `|Dk|`, 1/m.
    pub tolerance_per_m: f64,
    pub require_gvm: bool,
    pub bounds: GeometryBounds,
    pub pedestal_height_um: f64,
    pub polarization: Polarization,
    pub branch: Branch,
    pub coupling: CouplingLaw,
    pub gamma: f64,
    pub power_w: f64,
    /// Co-optimize pump 1 within these bounds during `refine`.
    pub lambda_p1_bounds: Option<(f64, f64)>,
}

impl DesignTarget {
    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        if !(self.tolerance_per_m > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if !(self.length_m > 0.0) {
            return Err(Error::invalid("length must be positive"));
        }
        if let Some((lo, hi)) = self.lambda_p1_bounds {
            if !(lo > 0.0 && lo <= hi) {
                return Err(Error::invalid("pump bounds must satisfy 0 < lo <= hi"));
            }
        }
        idler_wavelength(self.lambda_p1_um, self.lambda_p2_um, self.lambda_s_um)?;
        Ok(())
    }

    pub fn lambda_i_um(&self) -> Result<f64> {
        idler_wavelength(self.lambda_p1_um, self.lambda_p2_um, self.lambda_s_um)
    }

    /// `|Dk|` that scores 1.0.
    pub fn phase_scale(&self) -> f64 {
        2.0 * PI / self.length_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub geometry: DeviceGeometry,
    pub lambda_p1_um: f64,
    pub objective: f64,
    /// `Dk` on the target branch at the target signal, 1/m.
    pub dk_residual_per_m: f64,
    /// `min` of the two group-index ordering gaps.
    pub gvm_margin: f64,
}

fn coords(g: &DeviceGeometry) -> [f64; 5] {
    [g.w_a_um, g.h_a_um, g.w_b_um, g.h_b_um, g.separation_um]
}

fn with_coords(x: &[f64], pedestal: f64) -> DeviceGeometry {
    DeviceGeometry {
        w_a_um: x[0],
        h_a_um: x[1],
        w_b_um: x[2],
        h_b_um: x[3],
        separation_um: x[4],
        pedestal_height_um: pedestal,
    }
}

/// Wavelength window for the providers of a process at these wavelengths.
fn window(guide: &RectGuide, wavelengths: &[f64]) -> (f64, f64) {
    let (lo, hi) = wavelengths.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &l| (a.min(l), b.max(l)));
    let w = guide.window_um();
    ((0.95 * lo).max(w.0), (1.05 * hi).min(w.1))
}

/// Coupling for `geometry` under `law`; the reference separation returns
/// the reference model unchanged.
pub fn coupling_for(
    law: &CouplingLaw,
    geometry: &DeviceGeometry,
    polarization: Polarization,
    window_um: (f64, f64),
) -> Result<CouplingModel> {
    let shift = geometry.separation_um - law.reference_separation_um;
    if shift == 0.0 {
        return Ok(law.reference.clone());
    }
    let (a, b) = (geometry.guide_a(polarization), geometry.guide_b(polarization));
    let mut rows = Vec::with_capacity(COUPLING_ROWS);
    for k in 0..COUPLING_ROWS {
        let l = window_um.0 + (window_um.1 - window_um.0) * k as f64 / (COUPLING_ROWS - 1) as f64;
        let decay = |g: &RectGuide| -> Result<f64> {
            let n = g.effective_index(l)?;
            Ok(2.0 * PI / l * (n * n - 1.0).max(0.0).sqrt())
        };
        let p = 0.5 * (decay(&a)? + decay(&b)?);
        let kappa = coupling_eval(&law.reference, omega_from_um(l))? * (-p * shift).exp();
        rows.push((l, kappa));
    }
    CouplingModel::tabulated(&rows)
}

/// Phase-matching process for a geometry and pump-1 wavelength.
pub fn process_for(geometry: &DeviceGeometry, lambda_p1_um: f64, target: &DesignTarget) -> Result<ProcessConfig> {
    geometry.validate()?;
    let (ga, gb) = (geometry.guide_a(target.polarization), geometry.guide_b(target.polarization));
    let li = idler_wavelength(lambda_p1_um, target.lambda_p2_um, target.lambda_s_um)?;
    let win = window(&ga, &[lambda_p1_um, target.lambda_p2_um, target.lambda_s_um, li]);
    Ok(ProcessConfig {
        guide_a: DispersionProvider::rect(ga, win.0, win.1)?,
        guide_b: Some(DispersionProvider::rect(gb, win.0, win.1)?),
        coupling: coupling_for(&target.coupling, geometry, target.polarization, win)?,
        scope: CouplingScope::AllFields,
        lambda_p1_um,
        lambda_p2_um: target.lambda_p2_um,
        gamma: target.gamma,
        power_w: target.power_w,
        branch: target.branch,
    })
}

fn score(dk: f64, margin: f64, target: &DesignTarget) -> f64 {
    let pm = ((dk.abs() - target.tolerance_per_m).max(0.0) / target.phase_scale()).powi(2);
    let gvm = if target.require_gvm { GVM_HINGE_WEIGHT * (-margin).max(0.0).powi(2) } else { 0.0 };
    pm + gvm
}

/// Scores a geometry; solver failures score `+inf`.
pub fn evaluate(geometry: &DeviceGeometry, lambda_p1_um: f64, target: &DesignTarget) -> Candidate {
    let run = || -> Result<(f64, f64)> {
        let process = process_for(geometry, lambda_p1_um, target)?;
        let dk = phase_mismatch(&process, target.lambda_s_um)?;
        let margin = gvm_report(&process, target.lambda_s_um)?.margin;
        Ok((dk, margin))
    };
    match run() {
        Ok((dk, margin)) => Candidate {
            geometry: *geometry,
            lambda_p1_um,
            objective: score(dk, margin, target),
            dk_residual_per_m: dk,
            gvm_margin: margin,
        },
        Err(e) => {
            log::debug!("geometry {geometry:?} scored +inf: {e}");
            Candidate {
                geometry: *geometry,
                lambda_p1_um,
                objective: f64::INFINITY,
                dk_residual_per_m: f64::NAN,
                gvm_margin: f64::NAN,
            }
        }
    }
}

pub fn objective(geometry: &DeviceGeometry, target: &DesignTarget) -> f64 {
    evaluate(geometry, target.lambda_p1_um, target).objective
}

/// Lexicographic grid over the bounds; one sample on an axis takes its
/// midpoint.
pub fn sweep_points(target: &DesignTarget, samples: [usize; 5], budget: usize) -> Result<Vec<DeviceGeometry>> {
    target.validate()?;
    if samples.contains(&0) {
        return Err(Error::invalid("every axis needs at least one sample"));
    }
    let total = samples.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).unwrap_or(usize::MAX);
    if total > budget {
        return Err(Error::invalid(alloc::format!("sweep of {total} points exceeds the budget of {budget}")));
    }
    let axes: Vec<Vec<f64>> = target
        .bounds
        .axes()
        .iter()
        .zip(samples)
        .map(|(&(lo, hi), n)| {
            if n == 1 {
                alloc::vec![0.5 * (lo + hi)]
            } else {
                (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
            }
        })
        .collect();
    let mut out = Vec::with_capacity(total);
    let mut idx = [0usize; 5];
    loop {
        let x: Vec<f64> = (0..5).map(|d| axes[d][idx[d]]).collect();
        out.push(with_coords(&x, target.pedestal_height_um));
        let mut d = 4;
        loop {
            idx[d] += 1;
            if idx[d] < samples[d] {
                break;
            }
            idx[d] = 0;
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
        }
    }
}

/// Sorts by objective; ties go to the lexicographically smaller geometry.
pub fn rank(candidates: &mut [Candidate]) {
    candidates.sort_by(|a, b| {
        a.objective
            .total_cmp(&b.objective)
            .then_with(|| {
                coords(&a.geometry)
                    .iter()
                    .zip(coords(&b.geometry))
                    .map(|(x, y)| x.total_cmp(&y))
                    .find(|o| o.is_ne())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .then(a.lambda_p1_um.total_cmp(&b.lambda_p1_um))
    });
}

pub fn grid_sweep(target: &DesignTarget, samples: [usize; 5], budget: usize) -> Result<Vec<Candidate>> {
    let points = sweep_points(target, samples, budget)?;
    let mut out: Vec<Candidate> = points.iter().map(|g| evaluate(g, target.lambda_p1_um, target)).collect();
    rank(&mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub candidate: Candidate,
    /// Best objective after each iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

/// Nelder-Mead descent from `start`; points outside the bounds score
/// `+inf`. Never returns a worse candidate.
pub fn refine(start: &Candidate, target: &DesignTarget) -> Candidate {
    refine_with_trace(start, target).candidate
}

pub fn refine_with_trace(start: &Candidate, target: &DesignTarget) -> Refinement {
    let mut best = *start;
    let mut trace = Vec::new();
    if !start.objective.is_finite() || target.validate().is_err() {
        return Refinement { candidate: best, trace, iterations: 0 };
    }
    let co_opt = target.lambda_p1_bounds;
    let dim = if co_opt.is_some() { 6 } else { 5 };
    let pack = |c: &Candidate| {
        let mut x: Vec<f64> = coords(&c.geometry).to_vec();
        if co_opt.is_some() {
            x.push(c.lambda_p1_um);
        }
        x
    };
    let eval = |x: &[f64]| -> Candidate {
        let g = with_coords(x, target.pedestal_height_um);
        let lp1 = if co_opt.is_some() { x[5] } else { target.lambda_p1_um };
        let inside = target.bounds.contains(&g)
            && co_opt.is_none_or(|(lo, hi)| lp1 >= lo && lp1 <= hi);
        if inside {
            evaluate(&g, lp1, target)
        } else {
            Candidate { geometry: g, lambda_p1_um: lp1, objective: f64::INFINITY, dk_residual_per_m: f64::NAN, gvm_margin: f64::NAN }
        }
    };
    let x0 = pack(start);
    let mut simplex: Vec<(Vec<f64>, Candidate)> = alloc::vec![(x0.clone(), *start)];
    for d in 0..dim {
        let mut x = x0.clone();
        let step = 0.02 * x[d];
        x[d] += step;
        let c = eval(&x);
        if !c.objective.is_finite() {
            x[d] -= 2.0 * step;
        }
        simplex.push((x.clone(), eval(&x)));
    }
    let centroid = |s: &[(Vec<f64>, Candidate)]| -> Vec<f64> {
        let mut c = alloc::vec![0.0; dim];
        for (x, _) in &s[..dim] {
            for k in 0..dim {
                c[k] += x[k] / dim as f64;
            }
        }
        c
    };
    let along = |c: &[f64], x: &[f64], t: f64| -> Vec<f64> { c.iter().zip(x).map(|(a, b)| a + t * (b - a)).collect() };
    let mut iterations = 0;
    trace.push(best.objective);
    while iterations < REFINE_MAX_ITER {
        simplex.sort_by(|a, b| a.1.objective.total_cmp(&b.1.objective));
        if simplex[0].1.objective < best.objective {
            best = simplex[0].1;
        }
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if diameter < REFINE_DIAMETER_UM || best.objective == 0.0 {
            break;
        }
        iterations += 1;
        let c = centroid(&simplex);
        let worst = simplex[dim].clone();
        let xr = along(&c, &worst.0, -1.0);
        let fr = eval(&xr);
        if fr.objective < simplex[0].1.objective {
            let xe = along(&c, &worst.0, -2.0);
            let fe = eval(&xe);
            simplex[dim] = if fe.objective < fr.objective { (xe, fe) } else { (xr, fr) };
        } else if fr.objective < simplex[dim - 1].1.objective {
            simplex[dim] = (xr, fr);
        } else {
            let outside = fr.objective < worst.1.objective;
            let xc = if outside { along(&c, &worst.0, -0.5) } else { along(&c, &worst.0, 0.5) };
            let fc = eval(&xc);
            let bound = if outside { fr.objective } else { worst.1.objective };
            if fc.objective < bound {
                simplex[dim] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let xs = along(&x_best, &v.0, 0.5);
                    *v = (xs.clone(), eval(&xs));
                }
            }
        }
        let round_best = simplex.iter().map(|v| v.1.objective).fold(f64::INFINITY, f64::min);
        if round_best < best.objective {
            best = simplex.iter().find(|v| v.1.objective == round_best).map(|v| v.1).unwrap_or(best);
        }
        trace.push(best.objective);
    }
    Refinement { candidate: best, trace, iterations }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub model: CouplingModel,
    pub kappa0_per_m: f64,
    pub rate_per_um: f64,
    /// GVM margin at the calibrated coupling.
    pub gvm_margin: f64,
}

/// `kappa0` of `kappa0 exp(rate (lambda - lambda_p2))` that zeroes the
/// branch mismatch at `lambda_s_um`: the first sign change on a log grid
/// over `[1e3, 1e7]` 1/m, then Brent.
pub fn solve_kappa0(process: &ProcessConfig, lambda_s_um: f64, rate_per_um: f64) -> Result<f64> {
    let lp2 = process.lambda_p2_um;
    let dk = |ln_k0: f64| -> f64 {
        CouplingModel::exponential(ln_k0.exp(), lp2, rate_per_um)
            .and_then(|m| phase_mismatch(&process.with_coupling(m), lambda_s_um))
            .unwrap_or(f64::NAN)
    };
    let (lo, hi) = (1e3_f64.ln(), 1e7_f64.ln());
    const N: usize = 80;
    let mut prev = (lo, dk(lo));
    for k in 1..=N {
        let x = lo + (hi - lo) * k as f64 / N as f64;
        let v = dk(x);
        if prev.1.is_finite() && v.is_finite() && prev.1.signum() != v.signum() {
            return Ok(brent(dk, prev.0, x, 1e-12)?.exp());
        }
        prev = (x, v);
    }
    Err(Error::numerical("no coupling in [1e3, 1e7] 1/m phase matches the branch"))
}

/// Exponential coupling for a process: phase matched at `lambda_s_um`
/// with the dispersion rate that maximizes the GVM margin in `rate_bounds`.
pub fn calibrate_coupling(process: &ProcessConfig, lambda_s_um: f64, rate_bounds: (f64, f64)) -> Result<Calibration> {
    if process.branch == Branch::None {
        return Err(Error::invalid("calibration needs a supermode branch"));
    }
    if !(rate_bounds.0 < rate_bounds.1) {
        return Err(Error::invalid("rate bounds must be increasing"));
    }
    let lp2 = process.lambda_p2_um;
    let margin = |rate: f64| -> Result<f64> {
        let k0 = solve_kappa0(process, lambda_s_um, rate)?;
        let cfg = process.with_coupling(CouplingModel::exponential(k0, lp2, rate)?);
        Ok(gvm_report(&cfg, lambda_s_um)?.margin)
    };
    let (rate, _) = golden_max(|r| margin(r).unwrap_or(f64::NEG_INFINITY), rate_bounds.0, rate_bounds.1, 1e-5);
    let k0 = solve_kappa0(process, lambda_s_um, rate)?;
    Ok(Calibration {
        model: CouplingModel::exponential(k0, lp2, rate)?,
        kappa0_per_m: k0,
        rate_per_um: rate,
        gvm_margin: margin(rate)?,
    })
}
