//! File formats: the flat counts CSV, the Stokes JSON input, and the
//! input digest stamped into reports.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use tomofit_core::stokes::{MeasurementRecord, MeasurementSet, Setting, StokesVector};

use crate::CliError;

pub const COUNTS_HEADER: &str = "setting,count,shots";

/// Parse a counts CSV: header `setting,count,shots`, one row per setting,
/// tensor labels joined with no separator (`H`, `HD`, …).
pub fn parse_counts_csv(text: &str) -> Result<MeasurementSet, CliError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::parse("empty input", 1))?;
    if header.trim() != COUNTS_HEADER {
        return Err(CliError::parse(
            &format!("expected header `{COUNTS_HEADER}`, got `{}`", header.trim()),
            1,
        ));
    }

    let mut records = Vec::new();
    let mut n_qubits: Option<usize> = None;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::parse(
                &format!("expected 3 comma-separated fields, got {}", fields.len()),
                line_no,
            ));
        }
        let setting: Setting = fields[0]
            .trim()
            .parse()
            .map_err(|e| CliError::parse(&format!("{e}"), line_no))?;
        let count: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| CliError::parse(&format!("invalid count `{}`", fields[1]), line_no))?;
        let shots: u64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| CliError::parse(&format!("invalid shots `{}`", fields[2]), line_no))?;
        match n_qubits {
            None => n_qubits = Some(setting.n_qubits()),
            Some(n) if n != setting.n_qubits() => {
                return Err(CliError::parse(
                    &format!("setting `{setting}` has {} qubits, expected {n}", setting.n_qubits()),
                    line_no,
                ));
            }
            _ => {}
        }
        records.push(MeasurementRecord::new(setting, count, shots).map_err(CliError::from_core)?);
    }
    let n_qubits = n_qubits.ok_or_else(|| CliError::parse("no data rows", 2))?;
    MeasurementSet::new(n_qubits, records).map_err(CliError::from_core)
}

/// Render a measurement set as the counts CSV, canonical record order.
pub fn write_counts_csv(set: &MeasurementSet) -> String {
    let mut out = String::new();
    out.push_str(COUNTS_HEADER);
    out.push('\n');
    for r in set.records() {
        let _ = writeln!(out, "{},{},{}", r.setting, format_count(r.count), r.shots);
    }
    out
}

/// Integral counts print as integers; exact expected counts keep their
/// fractional part.
pub fn format_count(count: f64) -> String {
    if count.fract() == 0.0 && count.abs() < 9e15 {
        format!("{}", count as i64)
    } else {
        format!("{count}")
    }
}

#[derive(Deserialize)]
struct StokesJson {
    s1: f64,
    s2: f64,
    s3: f64,
}

/// Parse `{"s1": …, "s2": …, "s3": …}`, radially clamping onto the unit
/// ball if needed. Returns the vector and whether clamping occurred.
pub fn parse_stokes_json(text: &str) -> Result<(StokesVector, bool), CliError> {
    let raw: StokesJson =
        serde_json::from_str(text).map_err(|e| CliError::parse(&format!("{e}"), e.line()))?;
    StokesVector::clamped(raw.s1, raw.s2, raw.s3).map_err(CliError::from_core)
}

/// FNV-1a 64-bit digest, hex encoded; stamps the report with the exact
/// input it was produced from.
pub fn digest(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("fnv1a64:{hash:016x}")
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::internal(&format!("cannot read {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let text = "setting,count,shots\nH,500,1000\nV,500,1000\nD,500,1000\nA,500,1000\nR,500,1000\nL,500,1000\n";
        let set = parse_counts_csv(text).unwrap();
        assert_eq!(set.n_qubits(), 1);
        assert_eq!(write_counts_csv(&set), text);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let text = "setting,count,shots\nH,500,1000\nV,bad,1000\n";
        let err = parse_counts_csv(text).unwrap_err();
        assert!(format!("{err}").contains("line 3"), "{err}");

        let text = "wrong,header\n";
        let err = parse_counts_csv(text).unwrap_err();
        assert!(format!("{err}").contains("line 1"));
    }

    #[test]
    fn csv_rejects_count_over_shots() {
        let text = "setting,count,shots\nH,1001,1000\nV,0,1000\nD,500,1000\nA,500,1000\nR,500,1000\nL,500,1000\n";
        let err = parse_counts_csv(text).unwrap_err();
        assert!(err.unphysical);
    }

    #[test]
    fn stokes_json_clamps() {
        let (v, clamped) = parse_stokes_json(r#"{"s1":0.8,"s2":0.8,"s3":0.0}"#).unwrap();
        assert!(clamped);
        assert!((v.norm_sq() - 1.0).abs() < 1e-12);
        let (v, clamped) = parse_stokes_json(r#"{"s1":0.0,"s2":0.0,"s3":1.0}"#).unwrap();
        assert!(!clamped);
        assert_eq!(v.components(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(b""), "fnv1a64:cbf29ce484222325");
        assert_eq!(digest(b"tomofit"), digest(b"tomofit"));
        assert_ne!(digest(b"a"), digest(b"b"));
    }
}
