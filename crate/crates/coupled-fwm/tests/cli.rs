use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coupled-fwm")).args(args).output().unwrap()
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn edited(dir: &Path, name: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(scenario(name)).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join(format!("edited-{name}"));
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn run(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    bin(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_key_is_a_config_error_with_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "fiber_fig1b.json", |v| {
        v["contours"]["stray_um"] = 1.0.into();
    });
    let o = run("contours", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("stray_um") && err.contains("line "), "{err}");
}

#[test]
fn unit_less_numeric_field_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "fiber_fig1b.json", |v| {
        let d = v["dispersion"].as_object_mut().unwrap();
        let r = d.remove("core_radius_um").unwrap();
        d.insert("core_radius".into(), r);
    });
    let o = run("contours", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`dispersion.core_radius` has no unit suffix"), "{}", stderr(&o));
}

#[test]
fn malformed_json_reports_position() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("broken.json");
    std::fs::write(&cfg, "{\n  \"scenario\": \"x\",\n  \"process\": \n}\n").unwrap();
    let o = run("contours", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn pump_outside_the_dispersion_window_is_a_domain_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "fiber_fig1b.json", |v| {
        v["process"]["lambda_p1_um"] = 0.3.into();
    });
    let o = run("contours", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn missing_block_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run("jsa", &scenario("fiber_fig1b.json"), &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`jsa`"));
}

#[test]
fn bundled_contours_emit_three_branch_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run("contours", &scenario("fiber_fig1b.json"), &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csvs: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    assert_eq!(csvs.len(), 3, "{csvs:?}");
    let summary: Value = serde_json::from_slice(&std::fs::read(out.join("contours.json")).unwrap()).unwrap();
    assert!(summary["collapse"]["kappa_per_m"].as_f64().unwrap() > 0.0);
    // The uncoupled family ends on the pump wavelengths.
    let plain = &summary["families"][0];
    assert_eq!(plain["branch"], "dk");
    for ends in plain["polyline_ends_um"].as_array().unwrap() {
        for end in ends.as_array().unwrap() {
            let l = end.as_f64().unwrap();
            assert!((l - 0.5).abs() < 1e-6 || (l - 0.7).abs() < 1e-6 || (l - 1.55).abs() < 1e-6, "{l}");
        }
    }
}

#[test]
fn empty_kappa_list_emits_only_the_uncoupled_branch() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "fiber_fig1b.json", |v| {
        v["contours"]["kappa_list_per_m"] = Value::Array(vec![]);
    });
    let out = tmp.path().join("out");
    let o = run("contours", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut names: Vec<String> =
        std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names, ["contour_dk.csv", "contours.json", "manifest.json"]);
}

#[test]
fn kappa_list_gives_one_family_per_value() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "fiber_fig1b.json", |v| {
        v["contours"]["kappa_list_per_m"] = serde_json::json!([250.0, 1e4, 3e4]);
    });
    let out = tmp.path().join("out");
    assert!(run("contours", &cfg, &out, &[]).status.success());
    let summary: Value = serde_json::from_slice(&std::fs::read(out.join("contours.json")).unwrap()).unwrap();
    let families = summary["families"].as_array().unwrap();
    assert_eq!(families.len(), 7);
    // Odd-branch loop around the degenerate point shrinks with coupling.
    let spans: Vec<f64> = families
        .iter()
        .filter(|f| f["branch"] == "dk_minus")
        .map(|f| {
            let ends = f["polyline_ends_um"].as_array().unwrap();
            let first = ends[0][0].as_f64().unwrap();
            let second = ends[1][0].as_f64().unwrap();
            (second - first).abs()
        })
        .collect();
    assert!(spans.windows(2).all(|w| w[1] < w[0]), "{spans:?}");
}

#[test]
fn manifest_records_config_hash_seed_and_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = scenario("silicon_table1.json");
    assert!(run("jsa", &cfg, &out, &["--seed", "42", "--threads", "2"]).status.success());
    let m: Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 42);
    assert_eq!(m["command"], "jsa");
    assert_eq!(m["config_sha256"], coupled_fwm::manifest::sha256_hex(&std::fs::read(&cfg).unwrap()));
    let artifacts = m["artifacts"].as_array().unwrap();
    assert_eq!(artifacts.len(), 2);
    for a in artifacts {
        let bytes = std::fs::read(out.join(a["file"].as_str().unwrap())).unwrap();
        assert_eq!(a["sha256"], coupled_fwm::manifest::sha256_hex(&bytes));
    }
    // The embedded config parses back to the same run.
    let back: coupled_fwm::config::RunConfig = serde_json::from_value(m["config"].clone()).unwrap();
    assert_eq!(back, coupled_fwm::config::load(&cfg).unwrap().config);
}

#[test]
fn noise_seed_controls_the_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "fiber_fig2.json", |v| {
        let s = &mut v["simulation"];
        s["noise"] = true.into();
        s["grid_size"] = 256.into();
        s["length_m"] = 2e-3.into();
        s["record_every"] = 100.into();
        s["launches"] = serde_json::json!(["odd"]);
    });
    let go = |seed: &str, k: usize| {
        let out = tmp.path().join(format!("s{seed}-{k}"));
        let o = run("propagate", &cfg, &out, &["--seed", seed]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out.join("growth_odd.csv")).unwrap()
    };
    let (a, b, c) = (go("1", 0), go("1", 1), go("2", 0));
    assert_eq!(a, b);
    assert_ne!(a, c);
}
