//! Four-wave-mixing phase mismatch, zero-mismatch contours, contour collapse
//! and group-velocity ordering.
//!
//! Sign convention: `Dk = beta_p1 + beta_p2 - beta_s - beta_i - gamma P`.
//! On a supermode branch the fields inside the coupling scope use
//! `mean +- psi` from [`supermodes`]; the others use guide A alone. With a
//! symmetric pair and [`CouplingScope::PumpTwo`] this is `Dk +- kappa_p2`.

use alloc::vec::Vec;

use crate::coupledmode::{coupling_eval, supermodes, CouplingModel};
use crate::dispersion::{group_index, group_index_with_step, DispersionProvider, GROUP_INDEX_STEP};
use crate::roots::{bisect, golden_max};
use crate::units::{omega_from_um, um_from_omega};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// Uncoupled guide A (`Dk`).
    None,
    /// Even supermode, larger propagation constant (`Dk+`).
    Even,
    /// Odd supermode (`Dk-`).
    Odd,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::None => "dk",
            Branch::Even => "dk_plus",
            Branch::Odd => "dk_minus",
        }
    }

    /// `+1` for even, `-1` for odd, `0` for none.
    pub fn sign(&self) -> f64 {
        match self {
            Branch::None => 0.0,
            Branch::Even => 1.0,
            Branch::Odd => -1.0,
        }
    }
}

/// Which fields see the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingScope {
    /// Only pump 2; the other fields stay in guide A.
    PumpTwo,
    AllFields,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    P1,
    P2,
    S,
    I,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::P1, Field::P2, Field::S, Field::I];
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessConfig {
    pub guide_a: DispersionProvider,
    /// Bus guide; `None` for an identical pair.
    pub guide_b: Option<DispersionProvider>,
    pub coupling: CouplingModel,
    pub scope: CouplingScope,
    pub lambda_p1_um: f64,
    pub lambda_p2_um: f64,
    /// Nonlinear parameter, 1/(W m).
    pub gamma: f64,
    /// Total peak power, W.
    pub power_w: f64,
    pub branch: Branch,
}

impl ProcessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_p1_um > 0.0 && self.lambda_p1_um < self.lambda_p2_um) {
            return Err(Error::invalid("pump wavelengths must satisfy 0 < lambda_p1 < lambda_p2"));
        }
        if !(self.gamma >= 0.0) || !(self.power_w >= 0.0) {
            return Err(Error::invalid("gamma and power must be non-negative"));
        }
        Ok(())
    }

    pub fn gamma_p(&self) -> f64 {
        self.gamma * self.power_w
    }

    pub fn omega_p1(&self) -> f64 {
        omega_from_um(self.lambda_p1_um)
    }

    pub fn omega_p2(&self) -> f64 {
        omega_from_um(self.lambda_p2_um)
    }

    pub fn with_branch(&self, branch: Branch) -> Self {
        ProcessConfig { branch, ..self.clone() }
    }

    pub fn with_coupling(&self, coupling: CouplingModel) -> Self {
        ProcessConfig { coupling, ..self.clone() }
    }

    pub fn with_pump1(&self, lambda_p1_um: f64) -> Self {
        ProcessConfig { lambda_p1_um, ..self.clone() }
    }

    /// Copy whose analytic providers are replaced by splines sampled at `n`
    /// frequencies between the two wavelengths.
    pub fn cached(&self, lambda_min_um: f64, lambda_max_um: f64, n: usize) -> Result<Self> {
        let (lo, hi) = (omega_from_um(lambda_max_um), omega_from_um(lambda_min_um));
        let resample = |p: &DispersionProvider| -> Result<DispersionProvider> {
            if p.is_analytic() {
                p.resample(lo, hi, n)
            } else {
                Ok(p.clone())
            }
        };
        Ok(ProcessConfig {
            guide_a: resample(&self.guide_a)?,
            guide_b: self.guide_b.as_ref().map(resample).transpose()?,
            ..self.clone()
        })
    }

    fn in_scope(&self, field: Field) -> bool {
        match self.scope {
            CouplingScope::PumpTwo => field == Field::P2,
            CouplingScope::AllFields => true,
        }
    }

    /// Propagation constant of `field` at `omega` on `branch`.
    pub fn branch_beta(&self, field: Field, omega: f64, branch: Branch) -> Result<f64> {
        let beta_a = self.guide_a.beta(omega)?;
        if branch == Branch::None || !self.in_scope(field) {
            return Ok(beta_a);
        }
        let beta_b = match &self.guide_b {
            Some(b) => b.beta(omega)?,
            None => beta_a,
        };
        let kappa = coupling_eval(&self.coupling, omega)?;
        let s = supermodes(beta_a, beta_b, kappa);
        Ok(if branch == Branch::Even { s.beta_plus } else { s.beta_minus })
    }

    /// Mismatch for angular frequencies `[p1, p2, s, i]`.
    pub fn mismatch_omegas(&self, omega: [f64; 4], branch: Branch) -> Result<f64> {
        let b = |f: Field, k: usize| self.branch_beta(f, omega[k], branch);
        // Grouped so that exchanging signal and idler is bit-exact.
        Ok(b(Field::P1, 0)? + b(Field::P2, 1)? - (b(Field::S, 2)? + b(Field::I, 3)?) - self.gamma_p())
    }

    /// Frequencies `[p1, p2, s, i]` for a signal wavelength.
    pub fn omegas(&self, lambda_s_um: f64) -> Result<[f64; 4]> {
        let li = idler_wavelength(self.lambda_p1_um, self.lambda_p2_um, lambda_s_um)?;
        Ok([self.omega_p1(), self.omega_p2(), omega_from_um(lambda_s_um), omega_from_um(li)])
    }
}

/// `1/l_i = 1/l_p1 + 1/l_p2 - 1/l_s`.
pub fn idler_wavelength(lp1: f64, lp2: f64, ls: f64) -> Result<f64> {
    if !(lp1 > 0.0 && lp2 > 0.0 && ls > 0.0) {
        return Err(Error::invalid("wavelengths must be positive"));
    }
    let inv = 1.0 / lp1 + 1.0 / lp2 - 1.0 / ls;
    if !(inv > 0.0) {
        return Err(Error::OutOfDomain { quantity: "idler frequency", value: inv, min: 0.0, max: f64::INFINITY });
    }
    Ok(1.0 / inv)
}

/// Phase mismatch (1/m) on the configured branch.
pub fn phase_mismatch(config: &ProcessConfig, lambda_s_um: f64) -> Result<f64> {
    config.mismatch_omegas(config.omegas(lambda_s_um)?, config.branch)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourVertex {
    pub lambda_p1_um: f64,
    pub lambda_s_um: f64,
    pub lambda_i_um: f64,
    pub mismatch_per_m: f64,
}

/// A bracket in which bisection failed to reach the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourFailure {
    pub lambda_p1_um: f64,
    pub lambda_s_bracket_um: (f64, f64),
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourSet {
    pub branch: Branch,
    pub polylines: Vec<Vec<ContourVertex>>,
    pub failures: Vec<ContourFailure>,
}

impl ContourSet {
    pub fn vertices(&self) -> impl Iterator<Item = &ContourVertex> {
        self.polylines.iter().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions {
    /// Signal samples per pump sample.
    pub n_signal: usize,
    /// Scan padding beyond the pump frequencies, as a fraction of
    /// `omega_p1 - omega_p2`.
    pub pad_fraction: f64,
    /// Bisection target `|Dk|` (1/m).
    pub tolerance: f64,
    /// Largest signal-wavelength jump joined into one polyline (um).
    pub max_jump_um: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions { n_signal: 2001, pad_fraction: 0.02, tolerance: 1e-3, max_jump_um: 0.02 }
    }
}

/// Roots of one pump-1 sample: signal frequencies are scanned over
/// `[omega_p2 - pad, omega_p1 + pad]` so both trivial roots are interior.
pub fn contour_roots(
    config: &ProcessConfig,
    lambda_p1_um: f64,
    opts: &ContourOptions,
) -> Result<(Vec<ContourVertex>, Vec<ContourFailure>)> {
    let cfg = config.with_pump1(lambda_p1_um);
    cfg.validate()?;
    if opts.n_signal < 3 {
        return Err(Error::invalid("contour scan needs at least 3 signal samples"));
    }
    let (wp1, wp2) = (cfg.omega_p1(), cfg.omega_p2());
    let sum = wp1 + wp2;
    let pad = opts.pad_fraction * (wp1 - wp2);
    let (lo, hi) = (wp2 - pad, wp1 + pad);
    let n = opts.n_signal;
    let grid: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let f = |ws: f64| cfg.mismatch_omegas([wp1, wp2, ws, sum - ws], cfg.branch);
    let values = grid.iter().map(|&w| f(w)).collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    let mut failures = Vec::new();
    let vertex = |ws: f64, dk: f64| ContourVertex {
        lambda_p1_um,
        lambda_s_um: um_from_omega(ws),
        lambda_i_um: um_from_omega(sum - ws),
        mismatch_per_m: dk,
    };
    for k in 0..n {
        if values[k] == 0.0 {
            roots.push(vertex(grid[k], 0.0));
            continue;
        }
        if k + 1 < n && values[k + 1] != 0.0 && values[k].signum() != values[k + 1].signum() {
            let g = |w: f64| f(w).unwrap_or(f64::NAN);
            match bisect(g, grid[k], grid[k + 1], opts.tolerance) {
                Ok(ws) => {
                    let dk = f(ws)?;
                    if dk.abs() < opts.tolerance {
                        roots.push(vertex(ws, dk));
                    } else {
                        failures.push(ContourFailure {
                            lambda_p1_um,
                            lambda_s_bracket_um: (um_from_omega(grid[k + 1]), um_from_omega(grid[k])),
                            error: Error::numerical("bisection stalled above tolerance"),
                        });
                    }
                }
                Err(e) => failures.push(ContourFailure {
                    lambda_p1_um,
                    lambda_s_bracket_um: (um_from_omega(grid[k + 1]), um_from_omega(grid[k])),
                    error: e,
                }),
            }
        }
    }
    Ok((roots, failures))
}

/// Pump-1 wavelengths of a contour scan, equally spaced and inclusive.
pub fn pump_samples(lp1_range_um: (f64, f64), n_samples: usize) -> Vec<f64> {
    let (a, b) = lp1_range_um;
    if n_samples == 1 {
        return alloc::vec![a];
    }
    (0..n_samples).map(|k| a + (b - a) * k as f64 / (n_samples - 1) as f64).collect()
}

pub fn solve_contours(
    config: &ProcessConfig,
    lp1_range_um: (f64, f64),
    n_samples: usize,
) -> Result<ContourSet> {
    solve_contours_with(config, lp1_range_um, n_samples, &ContourOptions::default())
}

pub fn solve_contours_with(
    config: &ProcessConfig,
    lp1_range_um: (f64, f64),
    n_samples: usize,
    opts: &ContourOptions,
) -> Result<ContourSet> {
    if n_samples == 0 || !(lp1_range_um.0 <= lp1_range_um.1) {
        return Err(Error::invalid("pump-1 range must be non-empty and increasing"));
    }
    let per_sample = pump_samples(lp1_range_um, n_samples)
        .into_iter()
        .map(|l| contour_roots(config, l, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_contours(config.branch, per_sample, opts.max_jump_um))
}

/// Joins per-sample roots (in ascending pump-1 order) into polylines by
/// nearest-neighbour continuation in signal wavelength.
pub fn assemble_contours(
    branch: Branch,
    per_sample: Vec<(Vec<ContourVertex>, Vec<ContourFailure>)>,
    max_jump_um: f64,
) -> ContourSet {
    let mut finished: Vec<Vec<ContourVertex>> = Vec::new();
    let mut open: Vec<Vec<ContourVertex>> = Vec::new();
    let mut failures = Vec::new();
    for (roots, fails) in per_sample {
        failures.extend(fails);
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (pi, line) in open.iter().enumerate() {
            let last = line[line.len() - 1].lambda_s_um;
            for (vi, v) in roots.iter().enumerate() {
                let d = (v.lambda_s_um - last).abs();
                if d <= max_jump_um {
                    pairs.push((d, pi, vi));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut line_used = alloc::vec![false; open.len()];
        let mut root_used = alloc::vec![false; roots.len()];
        let mut next_open: Vec<Vec<ContourVertex>> = Vec::new();
        let mut extended: Vec<(usize, usize)> = Vec::new();
        for (_, pi, vi) in pairs {
            if !line_used[pi] && !root_used[vi] {
                line_used[pi] = true;
                root_used[vi] = true;
                extended.push((pi, vi));
            }
        }
        extended.sort();
        let mut old: Vec<Option<Vec<ContourVertex>>> = open.into_iter().map(Some).collect();
        for (pi, vi) in extended {
            let mut line = old[pi].take().expect("line used once");
            line.push(roots[vi]);
            next_open.push(line);
        }
        finished.extend(old.into_iter().flatten());
        for (vi, v) in roots.iter().enumerate() {
            if !root_used[vi] {
                next_open.push(alloc::vec![*v]);
            }
        }
        next_open.sort_by(|a, b| a[a.len() - 1].lambda_s_um.total_cmp(&b[b.len() - 1].lambda_s_um));
        open = next_open;
    }
    finished.extend(open);
    finished.sort_by(|a, b| {
        a[0].lambda_p1_um
            .total_cmp(&b[0].lambda_p1_um)
            .then(a[0].lambda_s_um.total_cmp(&b[0].lambda_s_um))
    });
    ContourSet { branch, polylines: finished, failures }
}

/// Degenerate signal wavelength of the configured pumps.
pub fn degenerate_wavelength(config: &ProcessConfig) -> f64 {
    2.0 / (1.0 / config.lambda_p1_um + 1.0 / config.lambda_p2_um)
}

/// Branch whose contour collapses as coupling grows: odd when the
/// uncoupled mismatch at degeneracy exceeds `gamma P`, even otherwise.
pub fn collapse_branch(config: &ProcessConfig) -> Result<Branch> {
    let dk = config.with_branch(Branch::None).mismatch_omegas(
        config.omegas(degenerate_wavelength(config))?,
        Branch::None,
    )?;
    Ok(if dk >= 0.0 { Branch::Odd } else { Branch::Even })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collapse {
    pub branch: Branch,
    pub kappa_per_m: f64,
    /// Signal wavelength of the last surviving root, um.
    pub degenerate_um: f64,
}

/// Smallest and largest mismatch over the closed signal interval between
/// the pumps, with the interior extreme refined by golden section. Returns
/// `(min, max, lambda_s at the extreme relevant to the branch)`.
fn mismatch_extremes(cfg: &ProcessConfig, n: usize) -> Result<(f64, f64, f64)> {
    let (wp1, wp2) = (cfg.omega_p1(), cfg.omega_p2());
    let sum = wp1 + wp2;
    let f = |ws: f64| cfg.mismatch_omegas([wp1, wp2, ws, sum - ws], cfg.branch);
    let step = (wp1 - wp2) / (n + 1) as f64;
    let mut vals = Vec::with_capacity(n + 2);
    for k in 0..=n + 1 {
        let w = if k == n + 1 { wp1 } else { wp2 + step * k as f64 };
        vals.push((w, f(w)?));
    }
    let refine = |sign: f64, k: usize| -> Result<(f64, f64)> {
        let w = vals[k].0;
        let (a, b) = ((w - step).max(wp2 + 0.5 * step), (w + step).min(wp1 - 0.5 * step));
        let (x, fx) = golden_max(|x| sign * f(x).unwrap_or(f64::NAN), a, b, 1e-12 * w);
        Ok(if fx.is_finite() && fx >= sign * vals[k].1 { (x, fx * sign) } else { (w, vals[k].1) })
    };
    let kmax = (0..n + 2).max_by(|&a, &b| vals[a].1.total_cmp(&vals[b].1)).unwrap_or(0);
    let kmin = (0..n + 2).min_by(|&a, &b| vals[a].1.total_cmp(&vals[b].1)).unwrap_or(0);
    let (xmax, fmax) = refine(1.0, kmax)?;
    let (xmin, fmin) = refine(-1.0, kmin)?;
    let at = if cfg.branch == Branch::Even { xmin } else { xmax };
    Ok((fmin, fmax, um_from_omega(at)))
}

/// Coupling (constant, 1/m) at which the zero-mismatch contour of the given
/// branch shrinks to the degenerate point, by bisection on root existence
/// over `kappa_range`.
pub fn collapse_kappa(
    config: &ProcessConfig,
    kappa_range: (f64, f64),
    branch: Branch,
) -> Result<Collapse> {
    config.validate()?;
    if branch == Branch::None {
        return Err(Error::invalid("collapse needs a supermode branch"));
    }
    let (k_lo, k_hi) = kappa_range;
    if !(k_lo >= 0.0 && k_hi > k_lo) {
        return Err(Error::invalid("kappa range must satisfy 0 <= lo < hi"));
    }
    const N: usize = 2001;
    let exists = |kappa: f64| -> Result<(bool, f64)> {
        let cfg = config.with_branch(branch).with_coupling(CouplingModel::Constant(kappa));
        let (lo, hi, at) = mismatch_extremes(&cfg, N)?;
        Ok((lo <= 0.0 && hi >= 0.0, at))
    };
    let (start, _) = exists(k_lo)?;
    let (end, _) = exists(k_hi)?;
    if !start || end {
        return Err(Error::NoCollapse(alloc::format!(
            "contour must exist at kappa = {k_lo:e} and vanish at {k_hi:e}"
        )));
    }
    let (mut a, mut b) = (k_lo, k_hi);
    let mut at = 0.0;
    while b - a > 1e-4_f64.max(1e-13 * b) {
        let m = 0.5 * (a + b);
        let (e, x) = exists(m)?;
        if e {
            a = m;
            at = x;
        } else {
            b = m;
        }
    }
    if at == 0.0 {
        at = exists(a)?.1;
    }
    Ok(Collapse { branch, kappa_per_m: 0.5 * (a + b), degenerate_um: at })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GvmReport {
    pub branch: Branch,
    /// Group indices of `[p1, p2, s, i]`.
    pub group_index: [f64; 4],
    /// Pump-1 group index lies between the signal and idler group indices.
    pub between: bool,
    /// `v_s <= v_p1 <= v_i`, i.e. `n_s >= n_p1 >= n_i`.
    pub signal_slowest: bool,
    /// `min(n_p1 - min(n_s, n_i), max(n_s, n_i) - n_p1)`; non-negative
    /// exactly when `between` holds.
    pub margin: f64,
}

pub fn gvm_report(config: &ProcessConfig, lambda_s_um: f64) -> Result<GvmReport> {
    let omegas = config.omegas(lambda_s_um)?;
    let mut ng = [0.0; 4];
    for (k, field) in Field::ALL.iter().enumerate() {
        let w = omegas[k];
        if config.branch == Branch::None || !config.in_scope(*field) {
            ng[k] = group_index(&config.guide_a, w)?;
            continue;
        }
        ng[k] = group_index_with_step(
            |x| config.branch_beta(*field, x, config.branch),
            w,
            GROUP_INDEX_STEP * w,
        )?;
    }
    let [p1, _, s, i] = ng;
    let margin = (p1 - s.min(i)).min(s.max(i) - p1);
    Ok(GvmReport {
        branch: config.branch,
        group_index: ng,
        between: margin >= 0.0,
        signal_slowest: s >= p1 && p1 >= i,
        margin,
    })
}
