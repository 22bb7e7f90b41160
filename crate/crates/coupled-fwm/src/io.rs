//! CSV and JSON artifact formats.

use std::path::Path;

use coupled_fwm_core::designsearch::Candidate;
use coupled_fwm_core::jsa::JointSpectrum;
use coupled_fwm_core::phasematch::ContourSet;
use coupled_fwm_core::propagation::{GainSpectrum, PropagationRecord, FIELD_NAMES};
use serde::Serialize;

use crate::error::CliError;

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Reads a `wavelength_um,n_eff` table; `#` starts a comment line.
pub fn read_table(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let header = reader.headers().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if header.len() != 2 || &header[0] != "wavelength_um" || &header[1] != "n_eff" {
        return Err(CliError::Config(format!("{}: header must be `wavelength_um,n_eff`", path.display())));
    }
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let field = |i: usize| -> Result<f64, CliError> {
            record[i].parse::<f64>().map_err(|e| {
                let line = record.position().map(|p| p.line()).unwrap_or(k as u64 + 2);
                CliError::Config(format!("{} line {line}: {e}", path.display()))
            })
        };
        rows.push((field(0)?, field(1)?));
    }
    Ok(rows)
}

pub fn contours_csv(set: &ContourSet) -> Result<Vec<u8>, CliError> {
    let header = strings(&["polyline", "lambda_p1_um", "lambda_s_um", "lambda_i_um", "mismatch_per_m"]);
    let rows = set.polylines.iter().enumerate().flat_map(|(k, line)| {
        line.iter().map(move |v| {
            vec![k.to_string(), num(v.lambda_p1_um), num(v.lambda_s_um), num(v.lambda_i_um), num(v.mismatch_per_m)]
        })
    });
    csv_bytes(&header, rows)
}

/// Powers in both guides against z, plus the two field totals of the idler
/// and pump 2.
pub fn growth_csv(record: &PropagationRecord) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["z_m".to_string()];
    for guide in ["a", "b"] {
        for f in FIELD_NAMES {
            header.push(format!("{f}_{guide}_w"));
        }
    }
    let rows = record.z.iter().zip(&record.powers).map(|(z, p)| {
        let mut row = vec![num(*z)];
        row.extend(p.iter().map(|v| num(*v)));
        row
    });
    csv_bytes(&header, rows)
}

pub fn gain_csv(spectrum: &GainSpectrum) -> Result<Vec<u8>, CliError> {
    let rows = spectrum.points.iter().map(|p| vec![num(p.kappa_per_m), num(p.gain_db)]);
    csv_bytes(&strings(&["kappa_per_m", "gain_db"]), rows)
}

/// Joint spectral intensity `|f|^2`: the first row holds the idler axis,
/// the first column the signal axis.
pub fn jsi_csv(js: &JointSpectrum) -> Result<Vec<u8>, CliError> {
    let (ns, ni) = js.shape();
    let mut header = vec!["signal_um\\idler_um".to_string()];
    header.extend(js.idler_um.iter().map(|v| num(*v)));
    let rows = (0..ns).map(|r| {
        let mut row = vec![num(js.signal_um[r])];
        row.extend((0..ni).map(|c| num(js.at(r, c).norm_sqr())));
        row
    });
    csv_bytes(&header, rows)
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateLine {
    pub rank: usize,
    pub w_a_um: f64,
    pub h_a_um: f64,
    pub w_b_um: f64,
    pub h_b_um: f64,
    pub separation_um: f64,
    pub pedestal_height_um: f64,
    pub lambda_p1_um: f64,
    pub objective: f64,
    pub dk_residual_per_m: f64,
    pub gvm_margin: f64,
}

impl CandidateLine {
    pub fn new(rank: usize, c: &Candidate) -> Self {
        let g = c.geometry;
        CandidateLine {
            rank,
            w_a_um: g.w_a_um,
            h_a_um: g.h_a_um,
            w_b_um: g.w_b_um,
            h_b_um: g.h_b_um,
            separation_um: g.separation_um,
            pedestal_height_um: g.pedestal_height_um,
            lambda_p1_um: c.lambda_p1_um,
            objective: c.objective,
            dk_residual_per_m: c.dk_residual_per_m,
            gvm_margin: c.gvm_margin,
        }
    }
}

/// One JSON object per line.
pub fn jsonl_bytes(candidates: &[Candidate]) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    for (k, c) in candidates.iter().enumerate() {
        serde_json::to_writer(&mut out, &CandidateLine::new(k, c)).map_err(|e| CliError::Io(e.to_string()))?;
        out.push(b'\n');
    }
    Ok(out)
}
