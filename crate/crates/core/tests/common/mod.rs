#![allow(dead_code)]

use coupled_fwm_core::dispersion::{DispersionProvider, FiberParams};
use coupled_fwm_core::propagation::{Launch, PulseShape, Seeding, SimulationConfig};

pub fn smf28() -> DispersionProvider {
    DispersionProvider::fiber(FiberParams::smf28_like(), 0.45, 1.9).unwrap()
}

/// 532/1550 nm pumps, degenerate signal, 500 W each, 10 cm.
pub fn degenerate_run(kappa_p2: f64, launch: Launch) -> SimulationConfig {
    SimulationConfig {
        guide_a: smf28(),
        guide_b: None,
        lambda_p1_um: 0.532,
        lambda_p2_um: 1.55,
        lambda_s_um: 2.0 / (1.0 / 0.532 + 1.0 / 1.55),
        kappa: [0.0, kappa_p2, 0.0, 0.0],
        gamma: 0.01,
        power_p1_w: 500.0,
        power_p2_w: 500.0,
        pump1: PulseShape::Cw,
        launch,
        seeding: Seeding::default(),
        time_window_ps: 100.0,
        grid_size: 256,
        length_m: 0.1,
        dz_m: 2e-6,
        record_every: 50,
    }
}

use coupled_fwm_core::coupledmode::CouplingModel;
use coupled_fwm_core::designsearch::{calibrate_coupling, Calibration, CouplingLaw, DesignTarget, GeometryBounds};
use coupled_fwm_core::dispersion::{DeviceGeometry, Polarization};
use coupled_fwm_core::phasematch::{Branch, CouplingScope, ProcessConfig};
use std::sync::OnceLock;

pub const SI_P1: f64 = 1.265;
pub const SI_P2: f64 = 1.59;
pub const SI_S: f64 = 1.342;

/// Reference silicon coupler, even branch, coupling not yet set.
pub fn coupler_process() -> ProcessConfig {
    let g = DeviceGeometry::reference_coupler();
    ProcessConfig {
        guide_a: DispersionProvider::rect(g.guide_a(Polarization::Te), 1.2, 1.7).unwrap(),
        guide_b: Some(DispersionProvider::rect(g.guide_b(Polarization::Te), 1.2, 1.7).unwrap()),
        coupling: CouplingModel::none(),
        scope: CouplingScope::AllFields,
        lambda_p1_um: SI_P1,
        lambda_p2_um: SI_P2,
        gamma: 0.0,
        power_w: 0.0,
        branch: Branch::Even,
    }
}

pub fn coupler_calibration() -> &'static Calibration {
    static CAL: OnceLock<Calibration> = OnceLock::new();
    CAL.get_or_init(|| calibrate_coupling(&coupler_process(), SI_S, (0.6, 1.2)).unwrap())
}

pub fn coupler_calibrated() -> ProcessConfig {
    coupler_process().with_coupling(coupler_calibration().model.clone())
}

pub fn coupler_target() -> DesignTarget {
    let g = DeviceGeometry::reference_coupler();
    DesignTarget {
        lambda_p1_um: SI_P1,
        lambda_p2_um: SI_P2,
        lambda_s_um: SI_S,
        length_m: 0.015,
        tolerance_per_m: 0.1 * 2.0 * std::f64::consts::PI / 0.015,
        require_gvm: true,
        bounds: GeometryBounds::around(&g, 0.1),
        pedestal_height_um: g.pedestal_height_um,
        polarization: Polarization::Te,
        branch: Branch::Even,
        coupling: CouplingLaw { reference: coupler_calibration().model.clone(), reference_separation_um: g.separation_um },
        gamma: 0.0,
        power_w: 0.0,
        lambda_p1_bounds: None,
    }
}
