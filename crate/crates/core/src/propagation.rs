//! Split-step Fourier propagation of the four FWM envelopes (pump 1, pump 2,
//! signal, idler) in two coupled guides.
//!
//! Envelopes live in a frame co-rotating with guide A's carrier phase
//! `beta_A(omega_F) z` and retarded by pump 2's group delay. The linear
//! operator for field F at offset `Omega` is
//! `M = [[beta_A - ref, kappa_F], [kappa_F, beta_B - ref]]` with
//! `ref = beta_A(omega_F) + beta1_p2 Omega`, applied exactly as `exp(i M h)`.
//! The nonlinear step integrates, per guide and time sample,
//! `dA_F/dz = i gamma (Psi_F + Phi_F)` with RK4. The FWM factors carry
//! `exp(+i Dk z)` for signal and idler and `exp(-i Dk z)` for the pumps,
//! `Dk = beta_p1 + beta_p2 - beta_s - beta_i` of guide A, frozen at the step
//! midpoint.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// Float methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;
use rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::coupledmode::supermode_fields;
use crate::dispersion::{group_index, DispersionProvider};
use crate::fft::{angular_frequencies, Fft};
use crate::phasematch::idler_wavelength;
use crate::units::{omega_from_um, HBAR, SPEED_OF_LIGHT};
use crate::{Error, Result};

/// Field order used by every per-field array in this module.
pub const FIELD_NAMES: [&str; 4] = ["p1", "p2", "s", "i"];
const P1: usize = 0;
const P2: usize = 1;
const S: usize = 2;
const I: usize = 3;

/// Per-step nonlinear phase above which a warning is raised.
pub const NONLINEAR_PHASE_WARNING: f64 = 0.05;

/// Pump-2 launch as a superposition of the even and odd supermodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Launch {
    Even,
    Odd,
    /// Equal superposition; for identical guides all of pump 2 enters guide A.
    Mixed,
    /// Fraction of pump-2 power in the odd supermode, in [0, 1].
    OddFraction(f64),
}

impl Launch {
    pub fn odd_fraction(&self) -> Result<f64> {
        let t = match self {
            Launch::Even => 0.0,
            Launch::Odd => 1.0,
            Launch::Mixed => 0.5,
            Launch::OddFraction(t) => *t,
        };
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid("launch odd fraction must lie in [0, 1]"));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    Cw,
    /// Gaussian in power with the given intensity FWHM.
    Gaussian { fwhm_ps: f64 },
}

/// Initial signal/idler content.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seeding {
    pub signal_w: f64,
    pub idler_w: f64,
    /// Adds half a photon per mode of complex Gaussian noise to signal and
    /// idler, drawn from a ChaCha8 stream with this seed.
    pub noise_seed: Option<u64>,
}

impl Default for Seeding {
    fn default() -> Self {
        Seeding { signal_w: 0.0, idler_w: 1e-9, noise_seed: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub guide_a: DispersionProvider,
    /// Bus guide; `None` for an identical pair.
    pub guide_b: Option<DispersionProvider>,
    pub lambda_p1_um: f64,
    pub lambda_p2_um: f64,
    pub lambda_s_um: f64,
    /// Coupling constants `[p1, p2, s, i]`, 1/m.
    pub kappa: [f64; 4],
    /// Nonlinear parameter, 1/(W m).
    pub gamma: f64,
    pub power_p1_w: f64,
    pub power_p2_w: f64,
    pub pump1: PulseShape,
    pub launch: Launch,
    pub seeding: Seeding,
    pub time_window_ps: f64,
    pub grid_size: usize,
    pub length_m: f64,
    pub dz_m: f64,
    /// Record powers every this many steps (the final step is always kept).
    pub record_every: usize,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 256 || !self.grid_size.is_power_of_two() {
            return Err(Error::invalid("grid size must be a power of two >= 256"));
        }
        if !(self.length_m > 0.0 && self.dz_m > 0.0 && self.dz_m <= self.length_m) {
            return Err(Error::invalid("need 0 < dz <= L"));
        }
        if !(self.time_window_ps > 0.0) {
            return Err(Error::invalid("time window must be positive"));
        }
        if !(self.gamma >= 0.0 && self.power_p1_w >= 0.0 && self.power_p2_w >= 0.0) {
            return Err(Error::invalid("gamma and pump powers must be non-negative"));
        }
        if self.kappa.iter().any(|k| !(*k >= 0.0) || !k.is_finite()) {
            return Err(Error::invalid("coupling constants must be finite and non-negative"));
        }
        if !(self.seeding.signal_w >= 0.0 && self.seeding.idler_w >= 0.0) {
            return Err(Error::invalid("seed powers must be non-negative"));
        }
        if let PulseShape::Gaussian { fwhm_ps } = self.pump1 {
            if !(fwhm_ps > 0.0) {
                return Err(Error::invalid("pulse duration must be positive"));
            }
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every must be at least 1"));
        }
        if !(self.lambda_p1_um > 0.0 && self.lambda_p1_um < self.lambda_p2_um) {
            return Err(Error::invalid("pump wavelengths must satisfy 0 < lambda_p1 < lambda_p2"));
        }
        self.launch.odd_fraction()?;
        Ok(())
    }

    pub fn lambda_i_um(&self) -> Result<f64> {
        idler_wavelength(self.lambda_p1_um, self.lambda_p2_um, self.lambda_s_um)
    }

    /// Carrier angular frequencies `[p1, p2, s, i]`.
    pub fn carriers(&self) -> Result<[f64; 4]> {
        Ok([
            omega_from_um(self.lambda_p1_um),
            omega_from_um(self.lambda_p2_um),
            omega_from_um(self.lambda_s_um),
            omega_from_um(self.lambda_i_um()?),
        ])
    }

    pub fn dt(&self) -> f64 {
        self.time_window_ps * 1e-12 / self.grid_size as f64
    }

    /// Number of steps and the length of the last one.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.length_m / self.dz_m - 1e-9).ceil().max(1.0) as usize;
        let last = self.length_m - (n - 1) as f64 * self.dz_m;
        (n, last)
    }

    fn beta_b(&self, omega: f64) -> Result<f64> {
        match &self.guide_b {
            Some(b) => b.beta(omega),
            None => self.guide_a.beta(omega),
        }
    }
}

/// Envelopes `fields[guide][field][sample]` in sqrt(W), guide 0 = A.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    pub z: f64,
    pub fields: [[Vec<Complex64>; 4]; 2],
}

impl SimulationState {
    /// Window-averaged power of one field in one guide.
    pub fn power(&self, guide: usize, field: usize) -> f64 {
        mean_power(&self.fields[guide][field])
    }

    pub fn powers(&self) -> [f64; 8] {
        let mut p = [0.0; 8];
        for g in 0..2 {
            for f in 0..4 {
                p[4 * g + f] = self.power(g, f);
            }
        }
        p
    }

    pub fn total_power(&self) -> f64 {
        self.powers().iter().sum()
    }

    fn check_finite(&self) -> Result<()> {
        let bad = self.fields.iter().flatten().flatten().any(|a| !a.re.is_finite() || !a.im.is_finite());
        if bad {
            return Err(Error::numerical(alloc::format!("non-finite field at z = {:e} m", self.z)));
        }
        Ok(())
    }
}

fn mean_power(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>() / a.len() as f64
}

/// Pump-2 guide amplitudes `(c_A, c_B)` for a launch; the odd mode is taken
/// with `c_A >= 0`, so an equal superposition adds up in guide A.
pub fn launch_coefficients(config: &SimulationConfig) -> Result<[f64; 2]> {
    let theta = config.launch.odd_fraction()?;
    let w = omega_from_um(config.lambda_p2_um);
    let db = 0.5 * (config.guide_a.beta(w)? - config.beta_b(w)?);
    let modes = supermode_fields(db, config.kappa[P2]);
    let mut odd = modes.odd;
    if odd[0] < 0.0 {
        odd = [-odd[0], -odd[1]];
    }
    let (ce, co) = ((1.0 - theta).sqrt(), theta.sqrt());
    Ok([ce * modes.even[0] + co * odd[0], ce * modes.even[1] + co * odd[1]])
}

pub fn build_state(config: &SimulationConfig) -> Result<SimulationState> {
    config.validate()?;
    let n = config.grid_size;
    let zero = || alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut fields = [[zero(), zero(), zero(), zero()], [zero(), zero(), zero(), zero()]];
    let dt = config.dt();
    let p1 = config.power_p1_w.sqrt();
    match config.pump1 {
        PulseShape::Cw => fields[0][P1].iter_mut().for_each(|a| *a = Complex64::new(p1, 0.0)),
        PulseShape::Gaussian { fwhm_ps } => {
            let t0 = fwhm_ps * 1e-12 / (2.0 * libm::sqrt(core::f64::consts::LN_2));
            for (k, a) in fields[0][P1].iter_mut().enumerate() {
                let t = (k as f64 - (n / 2) as f64) * dt;
                *a = Complex64::new(p1 * (-0.5 * (t / t0) * (t / t0)).exp(), 0.0);
            }
        }
    }
    let c = launch_coefficients(config)?;
    let p2 = config.power_p2_w.sqrt();
    for g in 0..2 {
        fields[g][P2].iter_mut().for_each(|a| *a = Complex64::new(p2 * c[g], 0.0));
    }
    let (ss, si) = (config.seeding.signal_w.sqrt(), config.seeding.idler_w.sqrt());
    fields[0][S].iter_mut().for_each(|a| *a = Complex64::new(ss, 0.0));
    fields[0][I].iter_mut().for_each(|a| *a = Complex64::new(si, 0.0));
    if let Some(seed) = config.seeding.noise_seed {
        let carriers = config.carriers()?;
        let fft = Fft::new(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let window = config.time_window_ps * 1e-12;
        for f in [S, I] {
            // Half a photon per mode: <|a_k|^2> = hbar omega / (2 T).
            let sigma = (HBAR * carriers[f] / (2.0 * window) / 2.0).sqrt();
            let mut spec: Vec<Complex64> = (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * sigma, im * sigma) * n as f64
                })
                .collect();
            fft.inverse(&mut spec);
            for (a, v) in fields[0][f].iter_mut().zip(spec) {
                *a += v;
            }
        }
    }
    Ok(SimulationState { z: 0.0, fields })
}

/// Exact `exp(i M h)` of `M = [[m11, k], [k, m22]]`, row-major.
fn coupled_exponential(m11: f64, m22: f64, kappa: f64, h: f64) -> [Complex64; 4] {
    let mean = 0.5 * (m11 + m22);
    let d = 0.5 * (m11 - m22);
    let psi = d.hypot(kappa);
    let (c, sinc_h) = if psi * h == 0.0 {
        (1.0, h)
    } else {
        ((psi * h).cos(), (psi * h).sin() / psi)
    };
    let phase = Complex64::new((mean * h).cos(), (mean * h).sin());
    let i = Complex64::new(0.0, 1.0);
    [
        phase * (c + i * sinc_h * d),
        phase * i * sinc_h * kappa,
        phase * i * sinc_h * kappa,
        phase * (c - i * sinc_h * d),
    ]
}

/// Precomputed operators for one configuration.
pub struct Propagator {
    config: SimulationConfig,
    fft: Fft,
    /// `beta_A - ref` and `beta_B - ref` per field and bin.
    detuning: [[Vec<f64>; 2]; 4],
    delta_k: f64,
    carriers: [f64; 4],
    omega_ref: f64,
    /// CW fields without noise stay constant in time: only the zero bin is
    /// populated, so `run` integrates a single sample and broadcasts it.
    uniform: bool,
}

impl Propagator {
    pub fn new(config: &SimulationConfig) -> Result<Self> {
        config.validate()?;
        let n = config.grid_size;
        let carriers = config.carriers()?;
        let uniform = config.pump1 == PulseShape::Cw && config.seeding.noise_seed.is_none();
        let offsets =
            if uniform { alloc::vec![0.0] } else { angular_frequencies(n, config.time_window_ps * 1e-12) };
        let beta1 = group_index(&config.guide_a, carriers[P2])? / SPEED_OF_LIGHT;
        let mut detuning: [[Vec<f64>; 2]; 4] = Default::default();
        let mut ref0 = [0.0; 4];
        for f in 0..4 {
            let w0 = carriers[f];
            ref0[f] = config.guide_a.beta(w0)?;
            let mut da = Vec::with_capacity(n);
            let mut db = Vec::with_capacity(n);
            for &dw in &offsets {
                let r = ref0[f] + beta1 * dw;
                if dw == 0.0 {
                    da.push(0.0);
                } else {
                    da.push(config.guide_a.beta(w0 + dw)? - r);
                }
                db.push(config.beta_b(w0 + dw)? - r);
            }
            detuning[f] = [da, db];
        }
        let delta_k = ref0[P1] + ref0[P2] - ref0[S] - ref0[I];
        let omega_ref = carriers.iter().sum::<f64>() / 4.0;
        Ok(Propagator { config: config.clone(), fft: Fft::new(n)?, detuning, delta_k, carriers, omega_ref, uniform })
    }

    /// Carrier mismatch `beta_p1 + beta_p2 - beta_s - beta_i` of guide A.
    pub fn delta_k(&self) -> f64 {
        self.delta_k
    }

    fn linear_operator(&self, h: f64) -> [Vec<[Complex64; 4]>; 4] {
        let mut ops: [Vec<[Complex64; 4]>; 4] = Default::default();
        for f in 0..4 {
            let [da, db] = &self.detuning[f];
            ops[f] = da
                .iter()
                .zip(db)
                .map(|(&a, &b)| coupled_exponential(a, b, self.config.kappa[f], h))
                .collect();
        }
        ops
    }

    fn to_spectrum(&self, state: &mut SimulationState) {
        if self.uniform {
            return;
        }
        for g in 0..2 {
            for f in 0..4 {
                self.fft.forward(&mut state.fields[g][f]);
            }
        }
    }

    fn to_time(&self, state: &mut SimulationState) {
        if self.uniform {
            return;
        }
        for g in 0..2 {
            for f in 0..4 {
                self.fft.inverse(&mut state.fields[g][f]);
            }
        }
    }

    fn apply_spectral(&self, state: &mut SimulationState, ops: &[Vec<[Complex64; 4]>; 4]) {
        for f in 0..4 {
            let (ga, gb) = state.fields.split_at_mut(1);
            for ((a, b), u) in ga[0][f].iter_mut().zip(gb[0][f].iter_mut()).zip(&ops[f]) {
                let (x, y) = (*a, *b);
                *a = u[0] * x + u[1] * y;
                *b = u[2] * x + u[3] * y;
            }
        }
    }

    /// Window-averaged powers from a spectrum (Parseval).
    fn spectral_powers(&self, state: &SimulationState) -> [f64; 8] {
        let n = if self.uniform { 1.0 } else { self.config.grid_size as f64 };
        let mut p = [0.0; 8];
        for g in 0..2 {
            for f in 0..4 {
                p[4 * g + f] = state.fields[g][f].iter().map(|v| v.norm_sqr()).sum::<f64>() / (n * n);
            }
        }
        p
    }

    /// Full nonlinear step over `h` starting at `z`: half SPM/XPM rotation,
    /// RK4 of the parametric terms, half rotation. The rotation is exact and
    /// norm preserving, so only the parametric increments are added to
    /// `tally`. Returns the largest per-sample nonlinear phase
    /// `gamma sum |A|^2 h` (XPM-weighted).
    fn nonlinear(&self, state: &mut SimulationState, z: f64, h: f64, tally: &mut [Kahan; 4]) -> f64 {
        let gamma = self.config.gamma;
        if gamma == 0.0 {
            return 0.0;
        }
        let zm = z + 0.5 * h;
        let e = Complex64::new((self.delta_k * zm).cos(), (self.delta_k * zm).sin());
        let ec = e.conj();
        let n = state.fields[0][0].len();
        let mut max_phase: f64 = 0.0;
        let mut dp = [0.0; 4];
        for g in 0..2 {
            for k in 0..n {
                let mut a = [
                    state.fields[g][P1][k],
                    state.fields[g][P2][k],
                    state.fields[g][S][k],
                    state.fields[g][I][k],
                ];
                let total: f64 = a.iter().map(|v| v.norm_sqr()).sum();
                max_phase = max_phase.max(2.0 * gamma * total * h);
                rotate(&mut a, gamma, 0.5 * h);
                let d = rk4_increment(a, gamma, e, ec, h);
                for f in 0..4 {
                    // Tallied before the sum is rounded: storing a 500 W pump
                    // loses ~1e-13 W per step, far above a seed's exchange.
                    dp[f] += power_change(a[f], d[f]);
                    a[f] += d[f];
                }
                rotate(&mut a, gamma, 0.5 * h);
                for f in 0..4 {
                    state.fields[g][f][k] = a[f];
                }
            }
        }
        for f in 0..4 {
            tally[f].add(dp[f] / n as f64);
        }
        max_phase
    }

    /// One symmetric step: half linear, full nonlinear, half linear.
    pub fn step(&self, state: &mut SimulationState, h: f64) -> Result<()> {
        if self.uniform {
            let mut one = compress(state);
            self.step_inner(&mut one, h)?;
            *state = expand(one, self.config.grid_size);
            return Ok(());
        }
        self.step_inner(state, h)
    }

    fn step_inner(&self, state: &mut SimulationState, h: f64) -> Result<()> {
        let half = self.linear_operator(0.5 * h);
        let mut tally: [Kahan; 4] = Default::default();
        self.to_spectrum(state);
        self.apply_spectral(state, &half);
        self.to_time(state);
        let z = state.z;
        self.nonlinear(state, z, h, &mut tally);
        self.to_spectrum(state);
        self.apply_spectral(state, &half);
        self.to_time(state);
        state.z += h;
        state.check_finite()
    }

    /// Runs to `L`, merging adjacent linear half steps.
    pub fn run(&self, state: SimulationState) -> Result<(SimulationState, PropagationRecord)> {
        if self.uniform {
            let (one, rec) = self.run_inner(compress(&state))?;
            return Ok((expand(one, self.config.grid_size), rec));
        }
        self.run_inner(state)
    }

    fn run_inner(&self, mut state: SimulationState) -> Result<(SimulationState, PropagationRecord)> {
        let cfg = &self.config;
        let (n_steps, last) = cfg.steps();
        let half = self.linear_operator(0.5 * cfg.dz_m);
        let full = self.linear_operator(cfg.dz_m);
        let half_last = self.linear_operator(0.5 * last);
        let bridge_last = if last == cfg.dz_m { None } else { Some(self.linear_operator(0.5 * (cfg.dz_m + last))) };

        let mut rec = PropagationRecord::new(self.carriers, self.omega_ref);
        rec.push(state.z, state.powers());
        let mut tally: [Kahan; 4] = Default::default();

        self.to_spectrum(&mut state);
        let first = if n_steps == 1 { &half_last } else { &half };
        self.apply_spectral(&mut state, first);
        for k in 0..n_steps {
            let h = if k + 1 == n_steps { last } else { cfg.dz_m };
            self.to_time(&mut state);
            let phase = { let z = state.z; self.nonlinear(&mut state, z, h, &mut tally) };
            if phase > NONLINEAR_PHASE_WARNING {
                if rec.phase_warnings == 0 {
                    log::warn!(
                        "nonlinear phase per step {phase:.3} rad exceeds {NONLINEAR_PHASE_WARNING} rad; reduce dz"
                    );
                }
                rec.phase_warnings += 1;
            }
            rec.max_nonlinear_phase = rec.max_nonlinear_phase.max(phase);
            state.z = if k + 1 == n_steps { cfg.length_m } else { state.z + h };
            self.to_spectrum(&mut state);
            let recording = (k + 1) % cfg.record_every == 0 || k + 1 == n_steps;
            if k + 1 == n_steps {
                self.apply_spectral(&mut state, &half_last);
            } else if recording {
                self.apply_spectral(&mut state, &half);
            }
            if recording {
                let p = self.spectral_powers(&state);
                if p.iter().any(|v| !v.is_finite()) {
                    return Err(Error::numerical(alloc::format!("non-finite field at z = {:e} m", state.z)));
                }
                rec.push(state.z, p);
            }
            if k + 1 < n_steps {
                let next_last = k + 2 == n_steps;
                match (recording, next_last, &bridge_last) {
                    (true, true, _) => self.apply_spectral(&mut state, &half_last),
                    (true, false, _) => self.apply_spectral(&mut state, &half),
                    (false, true, Some(b)) => self.apply_spectral(&mut state, b),
                    _ => self.apply_spectral(&mut state, &full),
                }
            }
        }
        self.to_time(&mut state);
        state.check_finite()?;
        for f in 0..4 {
            rec.exchanged_w[f] = tally[f].sum();
        }
        Ok((state, rec))
    }
}

fn compress(state: &SimulationState) -> SimulationState {
    let take = |g: usize, f: usize| alloc::vec![state.fields[g][f][0]];
    SimulationState {
        z: state.z,
        fields: [[take(0, 0), take(0, 1), take(0, 2), take(0, 3)], [take(1, 0), take(1, 1), take(1, 2), take(1, 3)]],
    }
}

fn expand(state: SimulationState, n: usize) -> SimulationState {
    let fill = |v: &Vec<Complex64>| alloc::vec![v[0]; n];
    let f = &state.fields;
    SimulationState {
        z: state.z,
        fields: [
            [fill(&f[0][0]), fill(&f[0][1]), fill(&f[0][2]), fill(&f[0][3])],
            [fill(&f[1][0]), fill(&f[1][1]), fill(&f[1][2]), fill(&f[1][3])],
        ],
    }
}

/// `|a + d|^2 - |a|^2` without cancellation error. A pump increment is
/// ~1e-20 of the pump power, so products are split exactly with fused
/// multiply-add.
fn power_change(a: Complex64, d: Complex64) -> f64 {
    let prod = |x: f64, y: f64| {
        let p = x * y;
        (p, libm::fma(x, y, -p))
    };
    let two_sum = |x: f64, y: f64| {
        let s = x + y;
        let v = s - x;
        (s, (x - (s - v)) + (y - v))
    };
    let (t1, e1) = prod(a.re, d.re);
    let (t2, e2) = prod(a.im, d.im);
    let (t3, e3) = prod(d.re, d.re);
    let (t4, e4) = prod(d.im, d.im);
    let (s12, r12) = two_sum(t1, t2);
    let (s34, r34) = two_sum(t3, t4);
    let (head, r) = two_sum(2.0 * s12, s34);
    head + (r + 2.0 * (r12 + e1 + e2) + r34 + e3 + e4)
}

/// Compensated summation.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    fn sum(&self) -> f64 {
        self.sum
    }
}

/// Exact SPM/XPM flow over `h`: each field turns by
/// `gamma (|A_F|^2 + 2 sum_{J != F} |A_J|^2) h`, which leaves every power
/// unchanged.
fn rotate(a: &mut [Complex64; 4], gamma: f64, h: f64) {
    let p = [a[0].norm_sqr(), a[1].norm_sqr(), a[2].norm_sqr(), a[3].norm_sqr()];
    let total: f64 = p.iter().sum();
    for f in 0..4 {
        let theta = gamma * (2.0 * total - p[f]) * h;
        a[f] *= Complex64::new(theta.cos(), theta.sin());
    }
}

/// Parametric terms only.
fn rhs(a: [Complex64; 4], gamma: f64, e: Complex64, ec: Complex64) -> [Complex64; 4] {
    let ig = Complex64::new(0.0, 2.0 * gamma);
    let pump = a[P1] * a[P2];
    let pair = a[S] * a[I];
    [
        ig * a[P2].conj() * pair * ec,
        ig * a[P1].conj() * pair * ec,
        ig * a[I].conj() * pump * e,
        ig * a[S].conj() * pump * e,
    ]
}

fn rk4_increment(a: [Complex64; 4], gamma: f64, e: Complex64, ec: Complex64, h: f64) -> [Complex64; 4] {
    let add = |x: [Complex64; 4], k: [Complex64; 4], s: f64| {
        [x[0] + k[0] * s, x[1] + k[1] * s, x[2] + k[2] * s, x[3] + k[3] * s]
    };
    let k1 = rhs(a, gamma, e, ec);
    let k2 = rhs(add(a, k1, 0.5 * h), gamma, e, ec);
    let k3 = rhs(add(a, k2, 0.5 * h), gamma, e, ec);
    let k4 = rhs(add(a, k3, h), gamma, e, ec);
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for f in 0..4 {
        out[f] = (k1[f] + 2.0 * k2[f] + 2.0 * k3[f] + k4[f]) * (h / 6.0);
    }
    out
}

/// One Strang step of `state` by `dz`.
pub fn step(state: &mut SimulationState, config: &SimulationConfig, dz: f64) -> Result<()> {
    Propagator::new(config)?.step(state, dz)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationRecord {
    pub z: Vec<f64>,
    /// `[p1A, p2A, sA, iA, p1B, p2B, sB, iB]` in W.
    pub powers: Vec<[f64; 8]>,
    /// Net power each field gained from the nonlinear steps, W.
    pub exchanged_w: [f64; 4],
    pub carriers: [f64; 4],
    /// Photon energy scale of the flux tallies, rad/s.
    pub omega_ref: f64,
    pub max_nonlinear_phase: f64,
    pub phase_warnings: usize,
}

impl PropagationRecord {
    fn new(carriers: [f64; 4], omega_ref: f64) -> Self {
        PropagationRecord {
            z: Vec::new(),
            powers: Vec::new(),
            exchanged_w: [0.0; 4],
            carriers,
            omega_ref,
            max_nonlinear_phase: 0.0,
            phase_warnings: 0,
        }
    }

    fn push(&mut self, z: f64, p: [f64; 8]) {
        self.z.push(z);
        self.powers.push(p);
    }

    /// Photon-flux tallies (1/s). The envelope equations use one `gamma`
    /// for every field, so `|A|^2` counts photons at the common energy
    /// `hbar omega_ref`.
    pub fn photon_tallies(&self) -> [f64; 4] {
        let e = HBAR * self.omega_ref;
        [
            self.exchanged_w[0] / e,
            self.exchanged_w[1] / e,
            self.exchanged_w[2] / e,
            self.exchanged_w[3] / e,
        ]
    }

    /// Largest deviation from `dN_s = dN_i = -dN_p1 = -dN_p2`, relative to
    /// the photons exchanged.
    pub fn manley_rowe_residual(&self) -> f64 {
        let n = self.photon_tallies();
        let scale = n.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let r = [(n[2] - n[3]).abs(), (n[2] + n[0]).abs(), (n[2] + n[1]).abs()];
        r.iter().fold(0.0_f64, |a, b| a.max(*b)) / scale
    }

    pub fn field_total(&self, k: usize, field: usize) -> f64 {
        self.powers[k][field] + self.powers[k][field + 4]
    }

    /// Idler gain `10 log10(P_i(L) / P_i(0))` over both guides.
    pub fn idler_gain_db(&self) -> f64 {
        let last = self.powers.len() - 1;
        10.0 * (self.field_total(last, I) / self.field_total(0, I)).log10()
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.powers.iter().map(|p| p[k]).collect()
    }
}

pub fn propagate(config: &SimulationConfig) -> Result<PropagationRecord> {
    let prop = Propagator::new(config)?;
    let state = build_state(config)?;
    Ok(prop.run(state)?.1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPoint {
    pub kappa_per_m: f64,
    pub gain_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainSpectrum {
    pub points: Vec<GainPoint>,
    pub peak_kappa_per_m: f64,
    pub peak_gain_db: f64,
    /// Full width at half maximum of the dB gain, 1/m (linear interpolation
    /// between scan points; `None` if it reaches the scan edge).
    pub bandwidth_per_m: Option<f64>,
}

/// Gain with pump 2 coupled at `kappa`.
pub fn gain_at(config: &SimulationConfig, kappa: f64) -> Result<GainPoint> {
    let mut c = config.clone();
    c.kappa[P2] = kappa;
    c.record_every = usize::MAX;
    if c.seeding.idler_w <= 0.0 {
        return Err(Error::invalid("gain scan needs a seeded idler"));
    }
    Ok(GainPoint { kappa_per_m: kappa, gain_db: propagate(&c)?.idler_gain_db() })
}

pub fn gain_scan(config: &SimulationConfig, kappas: &[f64]) -> Result<GainSpectrum> {
    let points = kappas.iter().map(|&k| gain_at(config, k)).collect::<Result<Vec<_>>>()?;
    summarize_gain(points)
}

pub fn summarize_gain(mut points: Vec<GainPoint>) -> Result<GainSpectrum> {
    if points.is_empty() {
        return Err(Error::invalid("empty gain scan"));
    }
    points.sort_by(|a, b| a.kappa_per_m.total_cmp(&b.kappa_per_m));
    let (ip, peak) = points
        .iter()
        .enumerate()
        .fold((0, points[0]), |acc, (i, p)| if p.gain_db > acc.1.gain_db { (i, *p) } else { acc });
    let level = 0.5 * peak.gain_db;
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = ip;
        for i in range {
            if points[i].gain_db < level {
                let (a, b) = (points[i], points[prev]);
                let t = (level - a.gain_db) / (b.gain_db - a.gain_db);
                return Some(a.kappa_per_m + t * (b.kappa_per_m - a.kappa_per_m));
            }
            prev = i;
        }
        None
    };
    let lo = cross(&mut (0..ip).rev());
    let hi = cross(&mut (ip + 1..points.len()));
    let bandwidth_per_m = match (lo, hi) {
        (Some(a), Some(b)) => Some(b - a),
        _ => None,
    };
    Ok(GainSpectrum { points, peak_kappa_per_m: peak.kappa_per_m, peak_gain_db: peak.gain_db, bandwidth_per_m })
}

/// Mean spacing of alternate crossings of the mean level, i.e. the period
/// of an oscillating sampled signal. `None` with fewer than three crossings.
pub fn oscillation_period(z: &[f64], y: &[f64]) -> Option<f64> {
    if z.len() != y.len() || z.len() < 3 {
        return None;
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut crossings = Vec::new();
    for k in 0..y.len() - 1 {
        let (a, b) = (y[k] - mean, y[k + 1] - mean);
        if a == 0.0 || a.signum() != b.signum() && b != 0.0 {
            let t = if a == b { 0.0 } else { a / (a - b) };
            crossings.push(z[k] + t * (z[k + 1] - z[k]));
        }
    }
    if crossings.len() < 3 {
        return None;
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    Some(2.0 * span / (crossings.len() - 1) as f64)
}

/// Local growth rate `d ln P / dz` by central differences.
pub fn growth_rate(z: &[f64], p: &[f64]) -> Vec<f64> {
    let n = z.len();
    (0..n)
        .map(|k| {
            let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
            (p[b].ln() - p[a].ln()) / (z[b] - z[a])
        })
        .collect()
}

/// Period of the pump-2 guide-A power exchange for identical guides,
/// `pi / kappa_p2`.
pub fn exchange_period(kappa_p2: f64) -> f64 {
    PI / kappa_p2
}
