mod common;

use common::*;
use coupled_fwm_core::designsearch::{evaluate, grid_sweep, objective, refine_with_trace};
use coupled_fwm_core::dispersion::DeviceGeometry;
use coupled_fwm_core::jsa::{build_jsa, schmidt, ApodizationProfile, JsaGrid, PmTerms, PumpSpec, PumpTwo};
use coupled_fwm_core::phasematch::{gvm_report, phase_mismatch, Branch};

fn pump() -> PumpSpec {
    PumpSpec { lambda_p1_um: SI_P1, sigma_p1_nm: 2.0, lambda_p2_um: SI_P2, pump2: PumpTwo::Cw }
}

#[test]
fn calibration_phase_matches_and_orders_group_indices() {
    let cal = coupler_calibration();
    let p = coupler_calibrated();
    assert!(phase_mismatch(&p, SI_S).unwrap().abs() < 1e-3);
    let r = gvm_report(&p, SI_S).unwrap();
    assert!(r.between && r.margin > 0.0, "{r:?}");
    assert!((r.margin - cal.gvm_margin).abs() < 1e-12);
    println!("calibration {cal:?} report {r:?}");
    let off = gvm_report(&p.with_branch(Branch::None), SI_S).unwrap();
    assert!(!off.between, "{off:?}");
}

#[test]
fn coupler_purity_beats_uncoupled() {
    let p = coupler_calibrated();
    let run = |cfg: &coupled_fwm_core::phasematch::ProcessConfig, n: usize| {
        let js = build_jsa(cfg, &pump(), &JsaGrid::square(n, SI_S), None, 0.015, PmTerms::SelectedBranch).unwrap();
        schmidt(&js).unwrap().purity
    };
    let coupled = run(&p, 128);
    let uncoupled = run(&p.with_branch(Branch::None), 128);
    println!("purity coupled {coupled} uncoupled {uncoupled}");
    assert!(coupled > uncoupled);
}

#[test]
fn uniform_profile_reproduces_unapodized_jsa() {
    let p = coupler_calibrated();
    let grid = JsaGrid::square(48, SI_S);
    let plain = build_jsa(&p, &pump(), &grid, None, 0.015, PmTerms::SelectedBranch).unwrap();
    let flat = ApodizationProfile::uniform(0.015, 128).unwrap();
    let apod = build_jsa(&p, &pump(), &grid, Some(&flat), 0.015, PmTerms::SelectedBranch).unwrap();
    for (a, b) in plain.f.iter().zip(&apod.f) {
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn coupler_purity_self_converges() {
    let p = coupler_calibrated();
    let purity = |n: usize| {
        let js = build_jsa(&p, &pump(), &JsaGrid::square(n, SI_S), None, 0.015, PmTerms::SelectedBranch).unwrap();
        schmidt(&js).unwrap().purity
    };
    let (a, b) = (purity(256), purity(512));
    assert!((a / b - 1.0).abs() < 5e-3, "{a} {b}");
}

#[test]
fn reference_objective_is_zero_and_sweep_finds_it() {
    let t = coupler_target();
    assert_eq!(objective(&DeviceGeometry::reference_coupler(), &t), 0.0);
    let ranked = grid_sweep(&t, [3, 3, 3, 3, 3], 243).unwrap();
    let best = ranked[0].geometry;
    let cell = |lo: f64, hi: f64| 0.5 * (hi - lo);
    let b = t.bounds;
    let g = DeviceGeometry::reference_coupler();
    assert!((best.w_a_um - g.w_a_um).abs() <= cell(b.w_a_um.0, b.w_a_um.1) + 1e-12);
    assert!((best.h_a_um - g.h_a_um).abs() <= cell(b.h_a_um.0, b.h_a_um.1) + 1e-12);
    assert!((best.separation_um - g.separation_um).abs() <= cell(b.separation_um.0, b.separation_um.1) + 1e-12);
    println!("best {:?}", ranked[0]);
}

#[test]
fn refine_improves_perturbed_design() {
    let t = coupler_target();
    let mut g = DeviceGeometry::reference_coupler();
    g.w_a_um *= 1.02;
    let start = evaluate(&g, t.lambda_p1_um, &t);
    assert!(start.objective > 0.0 && start.objective.is_finite());
    let r = refine_with_trace(&start, &t);
    assert!(r.candidate.objective < start.objective);
    assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    println!("refined {:?} from {} in {} iterations", r.candidate, start.objective, r.iterations);
}
