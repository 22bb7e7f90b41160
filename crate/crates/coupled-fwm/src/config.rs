//! Run configuration. Every block rejects unknown keys and every physical
//! quantity carries its unit in the field name.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Unit suffixes accepted on numeric fields.
pub const UNIT_SUFFIXES: [&str; 9] = ["_um", "_nm", "_mm", "_m", "_per_m", "_w", "_ps", "_per_w_m", "_per_um"];

/// Numeric fields that are counts or ratios.
pub const DIMENSIONLESS: [&str; 11] = [
    "grid_size",
    "record_every",
    "cache_nodes",
    "budget",
    "samples",
    "seed",
    "relative_index_step",
    "width_fraction",
    "half_width_sigmas",
    "bounds_fraction",
    "convergence_n",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub dispersion: DispersionBlock,
    #[serde(default)]
    pub coupling: CouplingBlock,
    pub process: ProcessBlock,
    #[serde(default)]
    pub contours: Option<ContoursBlock>,
    #[serde(default)]
    pub simulation: Option<SimulationBlock>,
    #[serde(default)]
    pub gain_scan: Option<GainScanBlock>,
    #[serde(default)]
    pub jsa: Option<JsaBlock>,
    #[serde(default)]
    pub search: Option<SearchBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DispersionBlock {
    /// Two identical step-index cores over fused silica.
    FiberPair {
        core_radius_um: f64,
        relative_index_step: f64,
        lambda_min_um: f64,
        lambda_max_um: f64,
        #[serde(default)]
        cache_nodes: Option<usize>,
    },
    /// Silicon-on-silica coupler; guide A is the FWM guide.
    SiliconCoupler {
        geometry: GeometryBlock,
        #[serde(default)]
        polarization: PolarizationName,
        lambda_min_um: f64,
        lambda_max_um: f64,
        #[serde(default)]
        cache_nodes: Option<usize>,
    },
    /// `wavelength_um,n_eff` tables; paths are relative to the config file.
    Tabulated {
        guide_a_csv: PathBuf,
        #[serde(default)]
        guide_b_csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub w_a_um: f64,
    pub h_a_um: f64,
    pub w_b_um: f64,
    pub h_b_um: f64,
    pub separation_um: f64,
    pub pedestal_height_um: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationName {
    #[default]
    Te,
    Tm,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingBlock {
    #[default]
    None,
    Constant {
        kappa_per_m: f64,
    },
    /// Twin-core formula for a `fiber_pair` at this centre separation.
    Fiber {
        separation_um: f64,
    },
    Exponential {
        kappa0_per_m: f64,
        lambda0_um: f64,
        rate_per_um: f64,
    },
    /// Exponential law solved for zero mismatch at `lambda_s_um` with the
    /// rate maximizing the group-velocity ordering margin.
    Calibrated {
        lambda_s_um: f64,
        rate_min_per_um: f64,
        rate_max_per_um: f64,
    },
    /// Constant coupling at the collapse point of the configured process.
    Collapse {
        kappa_min_per_m: f64,
        kappa_max_per_m: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchName {
    None,
    Even,
    Odd,
    /// The branch that collapses: odd when the degenerate mismatch exceeds
    /// `gamma P`.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScopeName {
    #[default]
    PumpTwo,
    AllFields,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessBlock {
    pub lambda_p1_um: f64,
    pub lambda_p2_um: f64,
    #[serde(default)]
    pub gamma_per_w_m: f64,
    #[serde(default)]
    pub power_w: f64,
    #[serde(default)]
    pub branch: BranchName,
    #[serde(default)]
    pub scope: ScopeName,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaRange {
    pub kappa_min_per_m: f64,
    pub kappa_max_per_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContoursBlock {
    pub lambda_p1_min_um: f64,
    pub lambda_p1_max_um: f64,
    pub n_pump_samples: usize,
    /// One contour family per value; empty emits only the uncoupled branch.
    #[serde(default)]
    pub kappa_list_per_m: Vec<f64>,
    #[serde(default)]
    pub n_signal: Option<usize>,
    #[serde(default)]
    pub tolerance_per_m: Option<f64>,
    #[serde(default)]
    pub collapse: Option<KappaRange>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaunchName {
    Even,
    Odd,
    Mixed,
}

impl LaunchName {
    pub fn label(&self) -> &'static str {
        match self {
            LaunchName::Even => "even",
            LaunchName::Odd => "odd",
            LaunchName::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseBlock {
    #[default]
    Cw,
    Gaussian {
        fwhm_ps: f64,
    },
}

fn default_idler_seed() -> f64 {
    1e-9
}

fn default_launches() -> Vec<LaunchName> {
    vec![LaunchName::Odd]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationBlock {
    /// Defaults to the degenerate wavelength of the pumps.
    #[serde(default)]
    pub lambda_s_um: Option<f64>,
    pub power_p1_w: f64,
    pub power_p2_w: f64,
    #[serde(default)]
    pub pump1: PulseBlock,
    #[serde(default = "default_launches")]
    pub launches: Vec<LaunchName>,
    #[serde(default)]
    pub seed_signal_w: f64,
    #[serde(default = "default_idler_seed")]
    pub seed_idler_w: f64,
    /// Adds vacuum noise drawn from the run seed.
    #[serde(default)]
    pub noise: bool,
    pub time_window_ps: f64,
    pub grid_size: usize,
    pub length_m: f64,
    pub dz_m: f64,
    pub record_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainScanBlock {
    /// Scan limits relative to the configured pump-2 coupling.
    pub offset_min_per_m: f64,
    pub offset_max_per_m: f64,
    pub n_kappa: usize,
    #[serde(default = "default_launch")]
    pub launch: LaunchName,
}

fn default_launch() -> LaunchName {
    LaunchName::Odd
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ApodizationBlock {
    #[default]
    None,
    RaisedCosine {
        n_samples: usize,
    },
    Gaussian {
        n_samples: usize,
        width_fraction: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermsName {
    #[default]
    SelectedBranch,
    BothBranches,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsaBlock {
    /// Amplitude standard deviation in wavelength.
    pub sigma_p1_nm: f64,
    /// Absent for a CW pump 2.
    #[serde(default)]
    pub sigma_p2_nm: Option<f64>,
    pub length_mm: f64,
    pub center_signal_um: f64,
    pub n_signal: usize,
    pub n_idler: usize,
    /// Absent sizes the grid from the pump and phase-matching bandwidths.
    #[serde(default)]
    pub half_width_sigmas: Option<f64>,
    #[serde(default)]
    pub apodization: ApodizationBlock,
    #[serde(default)]
    pub terms: TermsName,
    /// Purity comparisons: same design with the coupling branch disabled,
    /// and with this apodization profile.
    #[serde(default)]
    pub compare_uncoupled: bool,
    #[serde(default)]
    pub compare_apodization: Option<ApodizationBlock>,
    /// Grid sizes for a purity self-convergence table.
    #[serde(default)]
    pub convergence_n: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsBlock {
    pub w_a_um: (f64, f64),
    pub h_a_um: (f64, f64),
    pub w_b_um: (f64, f64),
    pub h_b_um: (f64, f64),
    pub separation_um: (f64, f64),
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBlock {
    pub lambda_s_um: f64,
    pub length_mm: f64,
    /// Defaults to a tenth of `2 pi / L`.
    #[serde(default)]
    pub tolerance_per_m: Option<f64>,
    #[serde(default = "default_true")]
    pub require_gvm: bool,
    /// Bounds as a fraction around the configured geometry, unless
    /// explicit bounds are given.
    #[serde(default)]
    pub bounds_fraction: Option<f64>,
    #[serde(default)]
    pub bounds: Option<BoundsBlock>,
    pub samples: [usize; 5],
    pub budget: usize,
    #[serde(default)]
    pub refine: bool,
    #[serde(default)]
    pub lambda_p1_bounds_um: Option<(f64, f64)>,
}

/// A parsed config together with its raw text and location.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub raw: String,
    pub path: PathBuf,
}

impl LoadedConfig {
    /// Resolves a path given in the config relative to the config file.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }

    /// 1-based line of the first occurrence of `"key"` in the raw text.
    pub fn line_of(&self, key: &str) -> Option<usize> {
        line_of(&self.raw, key)
    }
}

pub fn line_of(raw: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    raw.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
}

pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config = parse(&raw).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok(LoadedConfig { config, raw, path: path.to_path_buf() })
}

/// Parses and checks the unit-suffix rule.
pub fn parse(raw: &str) -> Result<RunConfig, CliError> {
    let value: Value = serde_json::from_str(raw).map_err(json_error)?;
    check_units(&value, raw, "")?;
    serde_json::from_str(raw).map_err(json_error)
}

fn json_error(e: serde_json::Error) -> CliError {
    let msg = e.to_string();
    let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m);
    CliError::Config(format!("line {} column {}: {msg}", e.line(), e.column()))
}

fn has_unit(key: &str) -> bool {
    UNIT_SUFFIXES.iter().any(|s| key.ends_with(s)) || DIMENSIONLESS.contains(&key) || key.starts_with("n_")
}

fn numeric(v: &Value) -> bool {
    match v {
        Value::Number(_) => true,
        Value::Array(items) => !items.is_empty() && items.iter().all(numeric),
        _ => false,
    }
}

fn check_units(v: &Value, raw: &str, path: &str) -> Result<(), CliError> {
    match v {
        Value::Object(map) => {
            for (key, child) in map {
                let here = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                if numeric(child) && !has_unit(key) {
                    let line = line_of(raw, key).map(|l| format!("line {l}: ")).unwrap_or_default();
                    return Err(CliError::Config(format!("{line}numeric field `{here}` has no unit suffix")));
                }
                check_units(child, raw, &here)?;
            }
            Ok(())
        }
        Value::Array(items) => items.iter().try_for_each(|c| check_units(c, raw, path)),
        _ => Ok(()),
    }
}
