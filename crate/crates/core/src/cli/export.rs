//! Pattern tables.
//!
//! CSV columns: `theta_deg, phi_deg, E_theta_re, E_theta_im, E_phi_re,
//! E_phi_im, power_db`, numbers with 9 significant digits. JSON carries the
//! same rows under a metadata header.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::config::{Normalization, OutputFormat};
use super::CliError;
use crate::radiation::{CutSamples, FarFieldPattern, POWER_DB_FLOOR};

pub const PATTERN_COLUMNS: [&str; 7] = [
    "theta_deg",
    "phi_deg",
    "E_theta_re",
    "E_theta_im",
    "E_phi_re",
    "E_phi_im",
    "power_db",
];

/// 9 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.8e}")
}

fn rounded(v: f64) -> f64 {
    num(v).parse().expect("formatted float parses")
}

fn power_db(pattern: &FarFieldPattern, normalization: Normalization) -> Result<Vec<f64>, CliError> {
    let power = pattern.power();
    let reference = match normalization {
        Normalization::Raw => 1.0,
        Normalization::DbNormalized => {
            let max = pattern.max_power();
            if max <= 0.0 {
                return Err(CliError {
                    kind: super::ErrorKind::Scenario,
                    key: Some("output.normalization".into()),
                    message: "pattern has no radiated power to normalize".into(),
                });
            }
            max
        }
    };
    Ok(power
        .iter()
        .map(|&u| {
            if u > 0.0 {
                (10.0 * (u / reference).log10()).max(POWER_DB_FLOOR)
            } else {
                POWER_DB_FLOOR
            }
        })
        .collect())
}

fn check(pattern: &FarFieldPattern) -> Result<(), CliError> {
    if pattern.grid().is_empty() {
        return Err(CliError {
            kind: super::ErrorKind::Scenario,
            key: None,
            message: "pattern grid is empty".into(),
        });
    }
    if !pattern.is_finite() {
        return Err(CliError {
            kind: super::ErrorKind::Scenario,
            key: None,
            message: "pattern contains non-finite samples".into(),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRow {
    theta_deg: f64,
    phi_deg: f64,
    #[serde(rename = "E_theta_re")]
    e_theta_re: f64,
    #[serde(rename = "E_theta_im")]
    e_theta_im: f64,
    #[serde(rename = "E_phi_re")]
    e_phi_re: f64,
    #[serde(rename = "E_phi_im")]
    e_phi_im: f64,
    power_db: f64,
}

/// Render the pattern. Nothing is produced for an empty or non-finite pattern.
pub fn export_pattern(
    pattern: &FarFieldPattern,
    format: OutputFormat,
    normalization: Normalization,
) -> Result<String, CliError> {
    check(pattern)?;
    let db = power_db(pattern, normalization)?;
    let grid = pattern.grid();
    let rows = (0..grid.theta_count()).flat_map(|i| (0..grid.phi_count()).map(move |j| (i, j)));
    match format {
        OutputFormat::Csv => {
            let mut out = PATTERN_COLUMNS.join(",");
            out.push('\n');
            for (i, j) in rows {
                let (et, ep) = pattern.sample(i, j);
                let idx = grid.index(i, j);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    num(grid.theta()[i].to_degrees()),
                    num(grid.phi()[j].to_degrees()),
                    num(et.re),
                    num(et.im),
                    num(ep.re),
                    num(ep.im),
                    num(db[idx])
                )
                .expect("write to string");
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let rows: Vec<JsonRow> = rows
                .map(|(i, j)| {
                    let (et, ep) = pattern.sample(i, j);
                    JsonRow {
                        theta_deg: rounded(grid.theta()[i].to_degrees()),
                        phi_deg: rounded(grid.phi()[j].to_degrees()),
                        e_theta_re: rounded(et.re),
                        e_theta_im: rounded(et.im),
                        e_phi_re: rounded(ep.re),
                        e_phi_im: rounded(ep.im),
                        power_db: rounded(db[grid.index(i, j)]),
                    }
                })
                .collect();
            let doc = serde_json::json!({
                "metadata": {
                    "columns": PATTERN_COLUMNS,
                    "normalization": normalization,
                    "theta_count": grid.theta_count(),
                    "phi_count": grid.phi_count(),
                    "polarization_axis": pattern.axis(),
                    "generator": concat!("fluidrad ", env!("CARGO_PKG_VERSION")),
                },
                "rows": rows,
            });
            Ok(serde_json::to_string_pretty(&doc).expect("json") + "\n")
        }
    }
}

/// Render and write in one step; the file is only created on success.
pub fn write_pattern(
    path: &Path,
    pattern: &FarFieldPattern,
    format: OutputFormat,
    normalization: Normalization,
) -> Result<(), CliError> {
    let text = export_pattern(pattern, format, normalization)?;
    write_file(path, &text)
}

/// Cut table: `angle_deg, power_db` relative to the cut maximum.
pub fn export_cut(samples: &CutSamples) -> String {
    let max = samples.max();
    let mut out = String::from("angle_deg,power_db\n");
    for (i, &u) in samples.power.iter().enumerate() {
        let db = if max > 0.0 && u > 0.0 {
            (10.0 * (u / max).log10()).max(POWER_DB_FLOOR)
        } else {
            POWER_DB_FLOOR
        };
        writeln!(out, "{},{}", num(samples.angle(i).to_degrees()), num(db)).expect("write to string");
    }
    out
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiation::AngleGrid;
    use crate::Complex64;

    #[test]
    fn isotropic_normalizes_to_zero_db() {
        let grid = AngleGrid::new(181, 4).unwrap();
        let p = FarFieldPattern::isotropic(&grid);
        let csv = export_pattern(&p, OutputFormat::Csv, Normalization::DbNormalized).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), PATTERN_COLUMNS.join(","));
        let mut n = 0;
        for l in lines {
            let db: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
            assert_eq!(db, 0.0);
            n += 1;
        }
        assert_eq!(n, 181 * 4);
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(num(1.0 / 3.0), "3.33333333e-1");
        assert_eq!(num(-1234.5), "-1.23450000e3");
    }

    #[test]
    fn non_finite_pattern_writes_nothing() {
        let grid = AngleGrid::new(181, 1).unwrap();
        let p = FarFieldPattern::from_fn(&grid, |_| Complex64::new(f64::NAN, 0.0));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        assert!(write_pattern(&path, &p, OutputFormat::Csv, Normalization::Raw).is_err());
        assert!(!path.exists());
    }

    #[test]
    fn json_mirrors_csv() {
        let grid = AngleGrid::new(181, 2).unwrap();
        let p = FarFieldPattern::from_fn(&grid, |d| Complex64::new(d.sin_theta, 0.0));
        let j = export_pattern(&p, OutputFormat::Json, Normalization::DbNormalized).unwrap();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 362);
        assert_eq!(rows[90 * 2]["theta_deg"], 90.0);
        assert_eq!(rows[90 * 2]["power_db"], 0.0);
        assert!(v["metadata"]["columns"].as_array().unwrap().len() == 7);
    }
}
