//! Subcommand implementations. Each reads a [`LoadedConfig`], writes its
//! artifacts through an [`Output`] and returns the manifest.

use std::f64::consts::PI;

use coupled_fwm_core::coupledmode::{coupling_eval, CouplingModel};
use coupled_fwm_core::designsearch::{
    calibrate_coupling, evaluate, rank, refine_with_trace, sweep_points, Candidate, CouplingLaw, DesignTarget,
    GeometryBounds,
};
use coupled_fwm_core::dispersion::{load_tabulated, DeviceGeometry, DispersionProvider, FiberParams, Polarization};
use coupled_fwm_core::jsa::{
    build_jsa, schmidt, ApodizationProfile, JointSpectrum, JsaGrid, PmTerms, PumpSpec, PumpTwo, SchmidtReport,
};
use coupled_fwm_core::phasematch::{
    assemble_contours, collapse_branch, collapse_kappa, contour_roots, degenerate_wavelength, gvm_report,
    phase_mismatch, pump_samples, Branch, ContourOptions, ContourSet, CouplingScope, ProcessConfig,
};
use coupled_fwm_core::propagation::{
    exchange_period, gain_at, growth_rate, oscillation_period, summarize_gain, Launch, PropagationRecord, Propagator, PulseShape, Seeding,
    SimulationConfig,
};
use coupled_fwm_core::{Error, VERSION as CORE_VERSION};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    ApodizationBlock, BranchName, CouplingBlock, DispersionBlock, LaunchName, LoadedConfig, PolarizationName,
    PulseBlock, ScopeName, SimulationBlock, TermsName,
};
use crate::error::CliError;
use crate::io;
use crate::manifest::{sha256_hex, Manifest, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Contours,
    GainScan,
    Propagate,
    Jsa,
    Purity,
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Contours => "contours",
            Command::GainScan => "gain-scan",
            Command::Propagate => "propagate",
            Command::Jsa => "jsa",
            Command::Purity => "purity",
            Command::Sweep => "sweep",
        }
    }
}

/// Everything a command needs besides the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
}

pub fn run(command: Command, lc: &LoadedConfig, out: &std::path::Path, opts: RunOptions) -> Result<Manifest, CliError> {
    let mut output = Output::create(out)?;
    match command {
        Command::Contours => contours(lc, &mut output)?,
        Command::GainScan => gain_scan(lc, &mut output, opts)?,
        Command::Propagate => propagate(lc, &mut output, opts)?,
        Command::Jsa => jsa(lc, &mut output)?,
        Command::Purity => purity(lc, &mut output)?,
        Command::Sweep => sweep(lc, &mut output)?,
    }
    let config = serde_json::to_value(&lc.config).map_err(|e| CliError::Io(e.to_string()))?;
    output.finish(Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        core_version: CORE_VERSION,
        command: command.name().to_string(),
        scenario: lc.config.scenario.clone(),
        config_file: lc.path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        config_sha256: sha256_hex(lc.raw.as_bytes()),
        seed: opts.seed,
        config,
        artifacts: Vec::new(),
    })
}

fn missing(block: &str) -> CliError {
    CliError::Config(format!("missing `{block}` block"))
}

/// Prefixes a core input error with the line of the offending key.
fn at<'a>(lc: &'a LoadedConfig, key: &str) -> impl Fn(Error) -> CliError + 'a {
    let key = key.to_string();
    move |e| match CliError::from(e) {
        CliError::Config(m) => match lc.line_of(&key) {
            Some(l) => CliError::Config(format!("line {l} (`{key}`): {m}")),
            None => CliError::Config(format!("`{key}`: {m}")),
        },
        other => other,
    }
}

/// Isolated guides of the configured structure.
pub struct Structure {
    pub guide_a: DispersionProvider,
    pub guide_b: Option<DispersionProvider>,
    pub fiber: Option<FiberParams>,
    pub geometry: Option<DeviceGeometry>,
    pub polarization: Polarization,
    pub window_um: Option<(f64, f64, usize)>,
}

fn polarization(p: PolarizationName) -> Polarization {
    match p {
        PolarizationName::Te => Polarization::Te,
        PolarizationName::Tm => Polarization::Tm,
    }
}

pub fn structure(lc: &LoadedConfig) -> Result<Structure, CliError> {
    match &lc.config.dispersion {
        DispersionBlock::FiberPair { core_radius_um, relative_index_step, lambda_min_um, lambda_max_um, cache_nodes } => {
            let params = FiberParams {
                core_radius_um: *core_radius_um,
                core_index_step: *relative_index_step,
                ..FiberParams::smf28_like()
            };
            let guide = DispersionProvider::fiber(params.clone(), *lambda_min_um, *lambda_max_um)
                .map_err(at(lc, "dispersion"))?;
            Ok(Structure {
                guide_a: guide,
                guide_b: None,
                fiber: Some(params),
                geometry: None,
                polarization: Polarization::Te,
                window_um: cache_nodes.map(|n| (*lambda_min_um, *lambda_max_um, n)),
            })
        }
        DispersionBlock::SiliconCoupler { geometry, polarization: pol, lambda_min_um, lambda_max_um, cache_nodes } => {
            let g = DeviceGeometry {
                w_a_um: geometry.w_a_um,
                h_a_um: geometry.h_a_um,
                w_b_um: geometry.w_b_um,
                h_b_um: geometry.h_b_um,
                separation_um: geometry.separation_um,
                pedestal_height_um: geometry.pedestal_height_um,
            };
            g.validate().map_err(at(lc, "geometry"))?;
            let pol = polarization(*pol);
            let a = DispersionProvider::rect(g.guide_a(pol), *lambda_min_um, *lambda_max_um)
                .map_err(at(lc, "dispersion"))?;
            let b = DispersionProvider::rect(g.guide_b(pol), *lambda_min_um, *lambda_max_um)
                .map_err(at(lc, "dispersion"))?;
            Ok(Structure {
                guide_a: a,
                guide_b: Some(b),
                fiber: None,
                geometry: Some(g),
                polarization: pol,
                window_um: cache_nodes.map(|n| (*lambda_min_um, *lambda_max_um, n)),
            })
        }
        DispersionBlock::Tabulated { guide_a_csv, guide_b_csv } => {
            let a = load_tabulated(&io::read_table(&lc.resolve(guide_a_csv))?).map_err(at(lc, "guide_a_csv"))?;
            let b = match guide_b_csv {
                Some(p) => Some(load_tabulated(&io::read_table(&lc.resolve(p))?).map_err(at(lc, "guide_b_csv"))?),
                None => None,
            };
            Ok(Structure { guide_a: a, guide_b: b, fiber: None, geometry: None, polarization: Polarization::Te, window_um: None })
        }
    }
}

/// The configured process with coupling and branch resolved.
pub struct Resolved {
    pub structure: Structure,
    pub process: ProcessConfig,
}

fn branch_of(name: BranchName) -> Option<Branch> {
    match name {
        BranchName::None => Some(Branch::None),
        BranchName::Even => Some(Branch::Even),
        BranchName::Odd => Some(Branch::Odd),
        BranchName::Auto => None,
    }
}

pub fn resolve(lc: &LoadedConfig) -> Result<Resolved, CliError> {
    let s = structure(lc)?;
    let p = lc.config.process;
    let mut process = ProcessConfig {
        guide_a: s.guide_a.clone(),
        guide_b: s.guide_b.clone(),
        coupling: CouplingModel::none(),
        scope: match p.scope {
            ScopeName::PumpTwo => CouplingScope::PumpTwo,
            ScopeName::AllFields => CouplingScope::AllFields,
        },
        lambda_p1_um: p.lambda_p1_um,
        lambda_p2_um: p.lambda_p2_um,
        gamma: p.gamma_per_w_m,
        power_w: p.power_w,
        branch: Branch::None,
    };
    process.validate().map_err(at(lc, "process"))?;
    if let Some((lo, hi, n)) = s.window_um {
        process = process.cached(lo, hi, n).map_err(at(lc, "cache_nodes"))?;
    }
    let branch = match branch_of(p.branch) {
        Some(b) => b,
        None => collapse_branch(&process)?,
    };
    process.branch = branch;
    let coupling = match &lc.config.coupling {
        CouplingBlock::None => CouplingModel::none(),
        CouplingBlock::Constant { kappa_per_m } => {
            if !(*kappa_per_m >= 0.0) {
                return Err(CliError::Config(format!(
                    "line {}: kappa_per_m must be non-negative",
                    lc.line_of("kappa_per_m").unwrap_or(0)
                )));
            }
            CouplingModel::Constant(*kappa_per_m)
        }
        CouplingBlock::Fiber { separation_um } => {
            let params = s
                .fiber
                .clone()
                .ok_or_else(|| CliError::Config("`fiber` coupling needs a `fiber_pair` dispersion block".into()))?;
            CouplingModel::Fiber { params, separation_um: *separation_um }
        }
        CouplingBlock::Exponential { kappa0_per_m, lambda0_um, rate_per_um } => {
            CouplingModel::exponential(*kappa0_per_m, *lambda0_um, *rate_per_um).map_err(at(lc, "kappa0_per_m"))?
        }
        CouplingBlock::Calibrated { lambda_s_um, rate_min_per_um, rate_max_per_um } => {
            let cal = calibrate_coupling(&process, *lambda_s_um, (*rate_min_per_um, *rate_max_per_um))
                .map_err(at(lc, "coupling"))?;
            log::info!(
                "calibrated coupling: kappa0 = {} 1/m, rate = {} 1/um, GVM margin = {}",
                cal.kappa0_per_m,
                cal.rate_per_um,
                cal.gvm_margin
            );
            cal.model
        }
        CouplingBlock::Collapse { kappa_min_per_m, kappa_max_per_m } => {
            let c = collapse_kappa(&process, (*kappa_min_per_m, *kappa_max_per_m), branch)
                .map_err(at(lc, "coupling"))?;
            log::info!("collapse coupling {} 1/m on {}", c.kappa_per_m, branch.label());
            CouplingModel::Constant(c.kappa_per_m)
        }
    };
    process.coupling = coupling;
    Ok(Resolved { structure: s, process })
}

fn contour_set(process: &ProcessConfig, range: (f64, f64), n: usize, opts: &ContourOptions) -> Result<ContourSet, CliError> {
    if n == 0 || !(range.0 <= range.1) {
        return Err(CliError::Config("pump-1 range must be non-empty and increasing".into()));
    }
    let per_sample = pump_samples(range, n)
        .par_iter()
        .map(|&l| contour_roots(process, l, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble_contours(process.branch, per_sample, opts.max_jump_um))
}

#[derive(Serialize)]
struct ContourFamily {
    branch: &'static str,
    kappa_per_m: f64,
    file: String,
    polylines: usize,
    vertices: usize,
    failures: usize,
    /// First and last signal wavelength of each polyline.
    polyline_ends_um: Vec<(f64, f64)>,
}

fn contours(lc: &LoadedConfig, out: &mut Output) -> Result<(), CliError> {
    let block = lc.config.contours.as_ref().ok_or_else(|| missing("contours"))?;
    let r = resolve(lc)?;
    let mut opts = ContourOptions::default();
    if let Some(n) = block.n_signal {
        opts.n_signal = n;
    }
    if let Some(t) = block.tolerance_per_m {
        opts.tolerance = t;
    }
    let range = (block.lambda_p1_min_um, block.lambda_p1_max_um);
    let mut runs = vec![(Branch::None, 0.0)];
    for &k in &block.kappa_list_per_m {
        if !(k >= 0.0) {
            return Err(CliError::Config(format!(
                "line {}: kappa_list_per_m entries must be non-negative",
                lc.line_of("kappa_list_per_m").unwrap_or(0)
            )));
        }
        runs.push((Branch::Even, k));
        runs.push((Branch::Odd, k));
    }
    let mut families = Vec::new();
    for (branch, kappa) in runs {
        let process = r.process.with_branch(branch).with_coupling(CouplingModel::Constant(kappa));
        let set = contour_set(&process, range, block.n_pump_samples, &opts)?;
        let file = if branch == Branch::None {
            format!("contour_{}.csv", branch.label())
        } else {
            format!("contour_{}_kappa_{}.csv", branch.label(), io::num(kappa))
        };
        out.write(&file, &io::contours_csv(&set)?)?;
        families.push(ContourFamily {
            branch: branch.label(),
            kappa_per_m: kappa,
            file,
            polylines: set.polylines.len(),
            vertices: set.vertices().count(),
            failures: set.failures.len(),
            polyline_ends_um: set
                .polylines
                .iter()
                .map(|l| (l[0].lambda_s_um, l[l.len() - 1].lambda_s_um))
                .collect(),
        });
    }
    let collapse = match block.collapse {
        None => Value::Null,
        Some(range) => {
            let branch = match r.process.branch {
                Branch::None => collapse_branch(&r.process)?,
                b => b,
            };
            match collapse_kappa(&r.process, (range.kappa_min_per_m, range.kappa_max_per_m), branch) {
                Ok(c) => {
                    let deg = degenerate_wavelength(&r.process);
                    let dk = phase_mismatch(&r.process.with_branch(Branch::None), deg)?;
                    json!({
                        "branch": c.branch.label(),
                        "kappa_per_m": c.kappa_per_m,
                        "degenerate_um": c.degenerate_um,
                        "closed_form_degenerate_um": deg,
                        "closed_form_kappa_per_m": -branch.sign() * dk,
                    })
                }
                Err(e @ Error::NoCollapse(_)) => json!({ "branch": branch.label(), "not_found": e.to_string() }),
                Err(e) => return Err(e.into()),
            }
        }
    };
    let summary = json!({
        "scenario": lc.config.scenario,
        "lambda_p2_um": r.process.lambda_p2_um,
        "lambda_p1_range_um": [range.0, range.1],
        "families": families,
        "collapse": collapse,
    });
    out.write("contours.json", &io::json_bytes(&summary)?)?;
    Ok(())
}

fn launch(name: LaunchName) -> Launch {
    match name {
        LaunchName::Even => Launch::Even,
        LaunchName::Odd => Launch::Odd,
        LaunchName::Mixed => Launch::Mixed,
    }
}

/// Simulation config with coupling from the resolved process.
pub fn simulation_config(
    r: &Resolved,
    sim: &SimulationBlock,
    launch_name: LaunchName,
    seed: u64,
) -> Result<SimulationConfig, CliError> {
    let p = &r.process;
    let lambda_s_um = sim.lambda_s_um.unwrap_or_else(|| degenerate_wavelength(p));
    let mut cfg = SimulationConfig {
        guide_a: p.guide_a.clone(),
        guide_b: p.guide_b.clone(),
        lambda_p1_um: p.lambda_p1_um,
        lambda_p2_um: p.lambda_p2_um,
        lambda_s_um,
        kappa: [0.0; 4],
        gamma: p.gamma,
        power_p1_w: sim.power_p1_w,
        power_p2_w: sim.power_p2_w,
        pump1: match sim.pump1 {
            PulseBlock::Cw => PulseShape::Cw,
            PulseBlock::Gaussian { fwhm_ps } => PulseShape::Gaussian { fwhm_ps },
        },
        launch: launch(launch_name),
        seeding: Seeding {
            signal_w: sim.seed_signal_w,
            idler_w: sim.seed_idler_w,
            noise_seed: sim.noise.then_some(seed),
        },
        time_window_ps: sim.time_window_ps,
        grid_size: sim.grid_size,
        length_m: sim.length_m,
        dz_m: sim.dz_m,
        record_every: sim.record_every,
    };
    let carriers = cfg.carriers()?;
    for (k, w) in carriers.iter().enumerate() {
        let coupled = p.scope == CouplingScope::AllFields || k == 1;
        if coupled {
            cfg.kappa[k] = coupling_eval(&p.coupling, *w)?;
        }
    }
    cfg.validate().map_err(at_block("simulation"))?;
    Ok(cfg)
}

fn at_block(block: &'static str) -> impl Fn(Error) -> CliError {
    move |e| match CliError::from(e) {
        CliError::Config(m) => CliError::Config(format!("`{block}`: {m}")),
        other => other,
    }
}

#[derive(Serialize)]
struct RunSummary {
    launch: &'static str,
    file: String,
    kappa_per_m: [f64; 4],
    delta_k_per_m: f64,
    idler_gain_db: f64,
    manley_rowe_residual: f64,
    max_nonlinear_phase_rad: f64,
    phase_warnings: usize,
    /// Period of the guide-A pump-2 power, if it oscillates.
    pump2_period_m: Option<f64>,
    /// Period of the idler growth rate `d ln P_i / dz` in guide A.
    idler_rate_period_m: Option<f64>,
    /// `pi / kappa_p2`.
    exchange_period_m: Option<f64>,
}

fn propagate(lc: &LoadedConfig, out: &mut Output, opts: RunOptions) -> Result<(), CliError> {
    let sim = lc.config.simulation.as_ref().ok_or_else(|| missing("simulation"))?;
    if sim.launches.is_empty() {
        return Err(CliError::Config("`simulation.launches` is empty".into()));
    }
    let r = resolve(lc)?;
    let configs = sim
        .launches
        .iter()
        .map(|&l| simulation_config(&r, sim, l, opts.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let runs: Vec<(f64, PropagationRecord)> = configs
        .par_iter()
        .map(|c| -> Result<_, Error> {
            let prop = Propagator::new(c)?;
            let state = coupled_fwm_core::propagation::build_state(c)?;
            Ok((prop.delta_k(), prop.run(state)?.1))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut summaries = Vec::new();
    for ((name, cfg), (dk, rec)) in sim.launches.iter().zip(&configs).zip(&runs) {
        let file = format!("growth_{}.csv", name.label());
        out.write(&file, &io::growth_csv(rec)?)?;
        summaries.push(RunSummary {
            launch: name.label(),
            file,
            kappa_per_m: cfg.kappa,
            delta_k_per_m: *dk,
            idler_gain_db: rec.idler_gain_db(),
            manley_rowe_residual: rec.manley_rowe_residual(),
            max_nonlinear_phase_rad: rec.max_nonlinear_phase,
            phase_warnings: rec.phase_warnings,
            pump2_period_m: oscillation_period(&rec.z, &rec.column(1)),
            idler_rate_period_m: {
                let rate = growth_rate(&rec.z, &rec.column(3));
                oscillation_period(&rec.z[1..], &rate[1..])
            },
            exchange_period_m: (cfg.kappa[1] > 0.0).then(|| exchange_period(cfg.kappa[1])),
        });
    }
    let summary = json!({ "scenario": lc.config.scenario, "runs": summaries });
    out.write("propagate.json", &io::json_bytes(&summary)?)?;
    Ok(())
}

fn gain_scan(lc: &LoadedConfig, out: &mut Output, opts: RunOptions) -> Result<(), CliError> {
    let sim = lc.config.simulation.as_ref().ok_or_else(|| missing("simulation"))?;
    let scan = lc.config.gain_scan.ok_or_else(|| missing("gain_scan"))?;
    if scan.n_kappa < 2 || !(scan.offset_min_per_m < scan.offset_max_per_m) {
        return Err(CliError::Config("`gain_scan` needs n_kappa >= 2 and offset_min < offset_max".into()));
    }
    let r = resolve(lc)?;
    let cfg = simulation_config(&r, sim, scan.launch, opts.seed)?;
    let centre = cfg.kappa[1];
    let kappas: Vec<f64> = (0..scan.n_kappa)
        .map(|k| {
            let t = k as f64 / (scan.n_kappa - 1) as f64;
            centre + scan.offset_min_per_m + t * (scan.offset_max_per_m - scan.offset_min_per_m)
        })
        .collect();
    if kappas[0] < 0.0 {
        return Err(CliError::Config("gain scan reaches negative coupling".into()));
    }
    let points = kappas.par_iter().map(|&k| gain_at(&cfg, k)).collect::<Result<Vec<_>, _>>()?;
    let spectrum = summarize_gain(points)?;
    out.write("gain_scan.csv", &io::gain_csv(&spectrum)?)?;
    let summary = json!({
        "scenario": lc.config.scenario,
        "launch": scan.launch.label(),
        "center_kappa_per_m": centre,
        "peak_kappa_per_m": spectrum.peak_kappa_per_m,
        "peak_gain_db": spectrum.peak_gain_db,
        "bandwidth_per_m": spectrum.bandwidth_per_m,
    });
    out.write("gain_scan.json", &io::json_bytes(&summary)?)?;
    Ok(())
}

fn profile(block: ApodizationBlock, length_m: f64) -> Result<Option<ApodizationProfile>, CliError> {
    Ok(match block {
        ApodizationBlock::None => None,
        ApodizationBlock::RaisedCosine { n_samples } => {
            Some(ApodizationProfile::raised_cosine(length_m, n_samples).map_err(at_block("apodization"))?)
        }
        ApodizationBlock::Gaussian { n_samples, width_fraction } => Some(
            ApodizationProfile::gaussian(length_m, n_samples, width_fraction).map_err(at_block("apodization"))?,
        ),
    })
}

#[derive(Clone)]
struct JsaSetup {
    process: ProcessConfig,
    pump: PumpSpec,
    grid: JsaGrid,
    profile: Option<ApodizationProfile>,
    length_m: f64,
    terms: PmTerms,
}

impl JsaSetup {
    fn build(&self) -> Result<JointSpectrum, CliError> {
        Ok(build_jsa(&self.process, &self.pump, &self.grid, self.profile.as_ref(), self.length_m, self.terms)?)
    }
}

fn jsa_setup(lc: &LoadedConfig) -> Result<JsaSetup, CliError> {
    let block = lc.config.jsa.as_ref().ok_or_else(|| missing("jsa"))?;
    let r = resolve(lc)?;
    let length_m = block.length_mm * 1e-3;
    let pump = PumpSpec {
        lambda_p1_um: r.process.lambda_p1_um,
        sigma_p1_nm: block.sigma_p1_nm,
        lambda_p2_um: r.process.lambda_p2_um,
        pump2: match block.sigma_p2_nm {
            None => PumpTwo::Cw,
            Some(sigma_nm) => PumpTwo::Pulsed { sigma_nm },
        },
    };
    pump.validate().map_err(at(lc, "sigma_p1_nm"))?;
    Ok(JsaSetup {
        process: r.process,
        pump,
        grid: JsaGrid {
            n_signal: block.n_signal,
            n_idler: block.n_idler,
            center_signal_um: block.center_signal_um,
            half_width_sigmas: block.half_width_sigmas,
        },
        profile: profile(block.apodization, length_m)?,
        length_m,
        terms: match block.terms {
            TermsName::SelectedBranch => PmTerms::SelectedBranch,
            TermsName::BothBranches => PmTerms::BothBranches,
        },
    })
}

fn report_json(rep: &SchmidtReport, top: usize) -> Value {
    json!({
        "singular_values": rep.singular_values.iter().take(top).collect::<Vec<_>>(),
        "schmidt_number": rep.schmidt_number,
        "purity": rep.purity,
    })
}

fn jsa(lc: &LoadedConfig, out: &mut Output) -> Result<(), CliError> {
    let setup = jsa_setup(lc)?;
    let js = setup.build()?;
    let rep = schmidt(&js)?;
    out.write("jsi.csv", &io::jsi_csv(&js)?)?;
    let centre = setup.grid.center_signal_um;
    let gvm = gvm_report(&setup.process, centre)?;
    let (ns, ni) = js.shape();
    let summary = json!({
        "scenario": lc.config.scenario,
        "branch": setup.process.branch.label(),
        "n_signal": ns,
        "n_idler": ni,
        "signal_range_um": [js.signal_um[0], js.signal_um[ns - 1]],
        "idler_range_um": [js.idler_um[0], js.idler_um[ni - 1]],
        "mismatch_at_center_per_m": phase_mismatch(&setup.process, centre)?,
        "gvm": {
            "group_index_p1_p2_s_i": gvm.group_index,
            "pump1_between_signal_and_idler": gvm.between,
            "margin": gvm.margin,
        },
        "schmidt": report_json(&rep, 10),
    });
    out.write("jsa.json", &io::json_bytes(&summary)?)?;
    Ok(())
}

fn purity(lc: &LoadedConfig, out: &mut Output) -> Result<(), CliError> {
    let block = lc.config.jsa.as_ref().ok_or_else(|| missing("jsa"))?;
    let setup = jsa_setup(lc)?;
    let rep = schmidt(&setup.build()?)?;
    let mut comparisons = serde_json::Map::new();
    if block.compare_uncoupled {
        let off = JsaSetup { process: setup.process.with_branch(Branch::None), profile: None, ..setup.clone() };
        comparisons.insert("uncoupled".into(), report_json(&schmidt(&off.build()?)?, 10));
    }
    if let Some(apod) = block.compare_apodization {
        let with = JsaSetup { profile: profile(apod, setup.length_m)?, ..setup.clone() };
        comparisons.insert("apodized".into(), report_json(&schmidt(&with.build()?)?, 10));
    }
    if !block.convergence_n.is_empty() {
        let table = block
            .convergence_n
            .par_iter()
            .map(|&n| -> Result<Value, CliError> {
                let grid = JsaGrid { n_signal: n, n_idler: n, ..setup.grid };
                let s = JsaSetup { grid, ..setup.clone() };
                Ok(json!({ "n": n, "purity": schmidt(&s.build()?)?.purity }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        comparisons.insert("convergence".into(), Value::Array(table));
    }
    let mut summary = report_json(&rep, usize::MAX);
    let map = summary.as_object_mut().expect("object");
    map.insert("scenario".into(), json!(lc.config.scenario));
    map.insert("branch".into(), json!(setup.process.branch.label()));
    map.insert("comparisons".into(), Value::Object(comparisons));
    out.write("purity.json", &io::json_bytes(&summary)?)?;
    Ok(())
}

pub fn design_target(lc: &LoadedConfig, r: &Resolved) -> Result<DesignTarget, CliError> {
    let block = lc.config.search.as_ref().ok_or_else(|| missing("search"))?;
    let g = r
        .structure
        .geometry
        .ok_or_else(|| CliError::Config("`sweep` needs a `silicon_coupler` dispersion block".into()))?;
    let length_m = block.length_mm * 1e-3;
    let bounds = match (block.bounds, block.bounds_fraction) {
        (Some(b), _) => GeometryBounds {
            w_a_um: b.w_a_um,
            h_a_um: b.h_a_um,
            w_b_um: b.w_b_um,
            h_b_um: b.h_b_um,
            separation_um: b.separation_um,
        },
        (None, Some(f)) => GeometryBounds::around(&g, f),
        (None, None) => return Err(CliError::Config("`search` needs `bounds` or `bounds_fraction`".into())),
    };
    let target = DesignTarget {
        lambda_p1_um: r.process.lambda_p1_um,
        lambda_p2_um: r.process.lambda_p2_um,
        lambda_s_um: block.lambda_s_um,
        length_m,
        tolerance_per_m: block.tolerance_per_m.unwrap_or(0.1 * 2.0 * PI / length_m),
        require_gvm: block.require_gvm,
        bounds,
        pedestal_height_um: g.pedestal_height_um,
        polarization: r.structure.polarization,
        branch: r.process.branch,
        coupling: CouplingLaw { reference: r.process.coupling.clone(), reference_separation_um: g.separation_um },
        gamma: r.process.gamma,
        power_w: r.process.power_w,
        lambda_p1_bounds: block.lambda_p1_bounds_um,
    };
    target.validate().map_err(at(lc, "search"))?;
    Ok(target)
}

fn sweep(lc: &LoadedConfig, out: &mut Output) -> Result<(), CliError> {
    let block = lc.config.search.as_ref().ok_or_else(|| missing("search"))?;
    let r = resolve(lc)?;
    let target = design_target(lc, &r)?;
    let points = sweep_points(&target, block.samples, block.budget).map_err(at(lc, "budget"))?;
    let mut ranked: Vec<Candidate> =
        points.par_iter().map(|g| evaluate(g, target.lambda_p1_um, &target)).collect();
    rank(&mut ranked);
    out.write("sweep.jsonl", &io::jsonl_bytes(&ranked)?)?;
    if block.refine {
        let start = ranked[0];
        if !start.objective.is_finite() {
            return Err(CliError::Numerical("best sweep candidate has a non-finite objective".into()));
        }
        let r = refine_with_trace(&start, &target);
        let summary = json!({
            "scenario": lc.config.scenario,
            "start": io::CandidateLine::new(0, &start),
            "refined": io::CandidateLine::new(0, &r.candidate),
            "iterations": r.iterations,
            "trace": r.trace,
        });
        out.write("refine.json", &io::json_bytes(&summary)?)?;
    }
    Ok(())
}
